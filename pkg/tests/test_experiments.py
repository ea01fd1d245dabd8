from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from center_shadow import experiments as E
from center_shadow.errors import MalformedSequence, WrongModel
from center_shadow.io import dump_json, load_json
from center_shadow.leaves import leaf
from center_shadow.shadowing import periodic_certificate
from center_shadow.torus import T2Point, apply


def roundtrip(tmp_path, verdict):
    """Write the verdict payload to JSON and read it back."""
    path = tmp_path / f"{verdict.name}.json"
    dump_json(path, verdict.to_payload())
    return load_json(path)


class TestRationalHelpers:
    def test_rational_orbit_matches_float(self, pillow):
        orbit = E.rational_orbit(pillow, Fraction(1, 64), Fraction(3, 64), 10)
        p = T2Point(1 / 64, 3 / 64)
        for k, (fx, fy) in enumerate(orbit):
            q = apply(pillow.A, p, k)
            assert (float(fx), float(fy)) == q.as_tuple()

    def test_lattice_near_sorted(self):
        pts = E.lattice_near(T2Point(0.5, 0.5), 0.1, 10)
        d = [r[0] for r in pts]
        assert d == sorted(d) and pts[0][1:] == (Fraction(1, 2), Fraction(1, 2))

    def test_periodic_leaf_from_orbit(self, pillow):
        W, period = E.periodic_leaf_from_orbit(pillow, Fraction(1, 8), Fraction(3, 8))
        assert periodic_certificate(pillow, W, period) is not None

    def test_model_parameters_roundtrip(self, skewed):
        m = E.model_from_parameters(json.loads(json.dumps(E.model_parameters(skewed))))
        assert m.A == skewed.A and m.K == skewed.K


class TestSeparation:
    def test_steps_formula(self, trivial):
        lu = trivial.S.lambda_u
        assert E.separation_steps(trivial, 0.02 / lu**3 * 0.999, 0.02) == 4

    def test_trivial_probe(self, trivial):
        v = E.expansivity_probe(trivial, trials=40, seed=1)
        assert v.passed
        assert E.reverify(json.loads(json.dumps(v.to_payload(), default=float)))


@pytest.fixture(scope="module")
def pair(pillow):
    return E.homoclinic_pair(pillow, eps=0.05, horizon=50)


@pytest.fixture(scope="module")
def verdict(pillow):
    return E.asymptotic_non_stable(pillow, "+" * 10, "+-" * 5)


class TestHomoclinic:
    def test_verdict(self, pair):
        W, W1, v = pair
        assert v.passed and W != W1 and v.witness["max_distance"] <= 0.05

    def test_reverify(self, pair, tmp_path):
        assert E.reverify(roundtrip(tmp_path, pair[2]))

    def test_tampered_witness_rejected(self, pair, tmp_path):
        payload = roundtrip(tmp_path, pair[2])
        payload["parameters"]["eps"] = "1e-6"
        assert not E.reverify(payload)

    def test_pillowcase_expansivity_reuses_pair(self, pillow):
        v = E.expansivity_probe(pillow)
        assert v.name == "expansivity" and v.passed

    def test_trivial_rejected(self, trivial):
        with pytest.raises(WrongModel):
            E.homoclinic_pair(trivial)


class TestIntersections:
    def test_single_crossing(self, pillow):
        base = T2Point(0.3, 0.6)
        L = leaf(pillow, base + pillow.S.e_s * 0.004)
        taus = E.intersection_params(pillow, base, L, 0.02)
        assert taus == pytest.approx([0.004], abs=1e-12)

    def test_singular_base_meets_leaf_twice(self, pillow):
        """The stable segment through a singular point meets both lifts of a nearby leaf on it."""
        s = T2Point(0.5, 0.0)
        L = leaf(pillow, s + pillow.S.e_s * 0.004)
        assert E.intersection_params(pillow, s, L, 0.02) == pytest.approx([-0.004, 0.004], abs=1e-12)
        assert not E.intersection_count(pillow, s, L, 0.02).passed

    def test_trivial_single(self, trivial):
        base = T2Point(0.3, 0.6)
        L = leaf(trivial, base + trivial.S.e_s * 0.004)
        assert len(E.intersection_params(trivial, base, L, 0.02)) == 1

    def test_probe_small(self, pillow, tmp_path):
        v = E.intersection_probe(pillow, trials=40, seed=3, doublings=6)
        assert v.passed and v.witness["max_count"] == 1
        assert E.reverify(roundtrip(tmp_path, v))


class TestPlaque:
    def test_trial(self, pillow):
        r = E.plaque_trial(pillow, T2Point(0.25, 0.125), 0.003, 60, 0.01, np.random.default_rng(0))
        assert r["max_xz"] <= 1e-10 and r["max_base_gap"] <= 1e-10 and r["max_fiber_jump"] <= 0.01

    def test_probe_small(self, trivial, tmp_path):
        v = E.plaque_expansivity_probe(trivial, horizon=80, trials=5)
        assert v.passed and E.reverify(roundtrip(tmp_path, v))

    def test_eta_above_mu(self, pillow):
        with pytest.raises(ValueError):
            E.plaque_expansivity_probe(pillow, eta=0.1, trials=1)


class TestGrowth:
    def test_probe(self, pillow, tmp_path):
        v = E.cs_growth_probe(pillow, steps=6)
        assert v.passed and E.reverify(roundtrip(tmp_path, v))

    def test_closure_positive(self, pillow):
        assert E.stable_line_closure(pillow, 10.0) > 0


class TestPeriodicDensity:
    def test_small(self, pillow, tmp_path):
        v = E.periodic_density(pillow, trials=8, seed=2)
        assert v.passed and E.reverify(roundtrip(tmp_path, v))

    def test_leaves_are_close(self, trivial):
        v = E.periodic_density(trivial, trials=5, seed=1)
        assert all(r["distance"] <= 0.02 for r in v.witness["leaves"])


class TestAsymptotic:
    def test_passes(self, verdict):
        w = verdict.witness
        assert verdict.passed and w["floor"] > 1e-3 and w["envelope_ok"] and w["outward_decay"]

    def test_reverify(self, verdict, tmp_path):
        assert E.reverify(roundtrip(tmp_path, verdict))

    def test_tampered_points_rejected(self, verdict, tmp_path):
        payload = roundtrip(tmp_path, verdict)
        payload["witness"]["z_nu"][7][0] = repr(float(payload["witness"]["z_nu"][7][0]) + 1e-4)
        assert not E.reverify(payload)

    def test_identical_sequences_have_zero_distance(self, pillow):
        v = E.asymptotic_non_stable(pillow, "+-" * 5, "+-" * 5)
        assert not v.passed and not v.witness["pattern_ok"]
        assert max(v.witness["quotient_distance_at_boundaries"]) < 1e-12

    def test_single_disagreement_is_local(self, pillow):
        """Flipping one block changes the lift floor there and leaves the quotient distance small elsewhere."""
        v = E.asymptotic_non_stable(pillow, "+" * 10, "+" * 5 + "-" + "+" * 4)
        assert v.witness["block_floor"][5] > 1e-3
        assert not v.witness["pattern_ok"]
        assert max(v.witness["quotient_distance_at_boundaries"]) <= 2 * max(v.witness["envelope_at_boundaries"])

    @pytest.mark.parametrize("mu, nu", [("+++", "++"), ("++x", "+++"), ("", "")])
    def test_malformed(self, pillow, mu, nu):
        with pytest.raises(MalformedSequence):
            E.asymptotic_non_stable(pillow, mu, nu)

    def test_trivial_rejected(self, trivial):
        with pytest.raises(WrongModel):
            E.asymptotic_non_stable(trivial, "++", "+-")


class TestMultiplicity:
    def test_small(self, pillow, tmp_path):
        v = E.decoration_multiplicity(pillow, k=2)
        w = v.witness
        assert v.passed and len(w["shadows"]) == 4
        assert w["repeat_gap"] <= 1e-12 and w["min_pairwise_orbit_distance"] > 10 * w["epsilon"]
        assert E.reverify(roundtrip(tmp_path, v))

    def test_trivial_rejected(self, trivial):
        with pytest.raises(WrongModel):
            E.decoration_multiplicity(trivial, k=1)


class TestSmallProbes:
    def test_expansion_law(self, skewed):
        v = E.expansion_law_probe(skewed, trials=500)
        assert v.passed

    def test_metric(self, pillow, tmp_path):
        v = E.metric_suite(pillow, triples=500)
        assert v.passed and E.reverify(roundtrip(tmp_path, v))

    def test_shadow_bound(self, skewed):
        v = E.shadow_bound_probe(skewed, orbits=3, length=200)
        assert v.passed and v.witness["ledger_violations"] == 0

    def test_unknown_reverify(self):
        with pytest.raises(ValueError):
            E.reverify({"name": "nope", "parameters": E.model_parameters(E.ModelSystem.create()), "witness": {}})

    def test_probe_registry(self):
        assert {"expansivity", "homoclinic", "asymptotic", "intersection", "plaque", "growth", "periodic-density"} <= set(E.PROBES)
