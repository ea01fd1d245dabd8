"""Probes that exercise the qualitative statements on the model systems.

Every probe returns a :class:`Verdict` whose witness carries enough raw data
for :func:`reverify` to recompute the decisive inequalities without repeating
any search or random sampling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import MalformedSequence, NoPeriodicLeafFound, WrongModel
from .leaves import (
    HALF_INTEGER_POINTS,
    MINUS,
    PLUS,
    CenterLeaf,
    LeafLift,
    ModelKind,
    ModelSystem,
    PointM,
    base_distance,
    distance_M,
    hausdorff_distance,
    leaf,
    sign_of,
)
from .product import local_product, signed_product_coords, unstable_projection_distance
from .shadowing import (
    PseudoOrbit,
    _hausdorff_rows,
    _vector_leaf_distance,
    decorate,
    decorate_with,
    make_pseudo_orbit,
    orbit_period_mod,
    periodic_certificate,
    shadow,
    shadow_bi_infinite,
    shadow_oracle,
    shadow_periodic,
)
from .torus import (
    AnosovMatrix,
    T2Point,
    T2Vector,
    apply,
    apply_int,
    epsilon_budget,
    shortest_displacement,
    split_coords,
    torus_distance,
)


@dataclass
class Verdict:
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {"name": self.name, "passed": self.passed, "parameters": self.parameters, "witness": self.witness}


def model_parameters(m: ModelSystem, **extra) -> dict:
    out = {
        "model": m.kind.value,
        "matrix": str(m.A),
        "theta": m.theta,
        "mu": m.K.mu,
        "delta0": m.K.delta0,
        "delta1": m.K.delta1,
        "N": m.K.N,
    }
    out.update(extra)
    return out


def model_from_parameters(p: dict) -> ModelSystem:
    a, b, c, d = (int(t) for t in str(p["matrix"]).split(","))
    return ModelSystem.create(
        ModelKind(p["model"]),
        AnosovMatrix(a, b, c, d),
        float(p["theta"]),
        mu=float(p["mu"]),
        delta0=float(p["delta0"]),
        delta1=float(p["delta1"]),
        N=int(p["N"]),
    )


# ---------------------------------------------------------------- rationals


def rational_apply(entries, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
    a, b, c, d = entries
    return (a * x + b * y) % 1, (c * x + d * y) % 1


def rational_orbit(m: ModelSystem, x: Fraction, y: Fraction, steps: int, start: int = 0) -> list[tuple[Fraction, Fraction]]:
    """Exact points A^start p, ..., A^(start+steps-1) p."""
    p = rational_apply(m.A.power(start), x, y)
    G = m.A.power(1)
    out = []
    for _ in range(steps):
        out.append(p)
        p = rational_apply(G, *p)
    return out


def _fpoint(p: tuple[Fraction, Fraction]) -> T2Point:
    return T2Point(float(p[0]), float(p[1]))


def _fstr(p: tuple[Fraction, Fraction]) -> list[str]:
    return [f"{p[0].numerator}/{p[0].denominator}", f"{p[1].numerator}/{p[1].denominator}"]


def _fparse(p) -> tuple[Fraction, Fraction]:
    return Fraction(p[0]), Fraction(p[1])


def lattice_near(center: T2Point, radius: float, q: int):
    """Lattice points k/q within ``radius`` of ``center``, nearest first."""
    r = int(math.ceil(radius * q)) + 1
    cx, cy = round(center.x * q), round(center.y * q)
    pts = []
    for i in range(cx - r, cx + r + 1):
        for j in range(cy - r, cy + r + 1):
            fx, fy = Fraction(i, q) % 1, Fraction(j, q) % 1
            d = torus_distance(center, T2Point(float(fx), float(fy)))
            if d <= radius:
                pts.append((d, fx, fy))
    pts.sort(key=lambda t: (t[0], t[1], t[2]))
    return pts


def _lowest_terms_q(fx: Fraction, fy: Fraction) -> int:
    return math.lcm(fx.denominator, fy.denominator)


def rational_leaf_period(m: ModelSystem, fx: Fraction, fy: Fraction, lift: bool = False) -> int:
    q = _lowest_terms_q(fx, fy)
    return orbit_period_mod(m.A.entries(), (int(fx * q), int(fy * q)), q, m.pillowcase and not lift)


def periodic_leaf_from_orbit(m: ModelSystem, fx: Fraction, fy: Fraction) -> tuple[CenterLeaf, int]:
    """Run the periodic shadow on the exact orbit of a rational point; return the leaf and its period."""
    period = rational_leaf_period(m, fx, fy)
    lift_period = rational_leaf_period(m, fx, fy, lift=True)
    pts = rational_orbit(m, fx, fy, lift_period + 1)
    po = PseudoOrbit.from_leaves(m, [leaf(m, _fpoint(p)) for p in pts])
    start = leaf(m, _fpoint(pts[0]))
    sign = sign_of(m, start, LeafLift(_fpoint(pts[0])))
    W = shadow_periodic(m, decorate(po, sign), lift_period)
    return W, period


# ---------------------------------------------------------------- shadow bound


def shadow_bound_probe(
    m: ModelSystem, orbits: int = 100, length: int = 1000, fraction: float = 0.9, eta: float = 0.01, seed: int = 0
) -> Verdict:
    """Shadow many random pseudo-orbits with jumps at a fraction of the budget."""
    jump = fraction * epsilon_budget(m.S, m.K, eta)
    ratios, agreement, violations = [], [], 0
    for k in range(orbits):
        dpo = decorate(make_pseudo_orbit(m, seed + k, length, jump, eta=eta))
        tr = shadow(m, dpo, eta)
        oracle = shadow_oracle(m, dpo, eta)
        ratios.append(float(tr.per_step_distance.max() / tr.bound) if tr.bound > 0 else 0.0)
        agreement.append(hausdorff_distance(m, oracle, tr.shadow))
        violations += len(tr.violations)
    passed = max(ratios) <= 1 + 1e-9 and max(agreement) <= 1e-9 and violations == 0
    return Verdict(
        "shadow-bound",
        passed,
        {"max_ratio": max(ratios), "max_oracle_gap": max(agreement), "ledger_violations": violations},
        model_parameters(m, orbits=orbits, length=length, jump=jump, eta=eta, seed=seed),
    )


# ---------------------------------------------------------------- expansion law


def expansion_law_probe(m: ModelSystem, trials: int = 10_000, seed: int = 0, grid_bits: int = 40) -> Verdict:
    """Ratio of unstable projection distances before and after one step.

    Points are drawn on a dyadic grid so that the images are exact and the
    only rounding left is in the change of basis.
    """
    rng = np.random.default_rng(seed)
    scale = float(1 << grid_bits)
    rmax = 0.99 * m.K.mu / m.S.lambda_norm
    worst = 0.0
    worst_pair = None
    for _ in range(trials):
        p = T2Point(*(rng.integers(0, 1 << grid_bits, size=2) / scale))
        r = rmax * math.sqrt(rng.random())
        phi = 2 * math.pi * rng.random()
        v = T2Vector(round(r * math.cos(phi) * scale) / scale, round(r * math.sin(phi) * scale) / scale)
        q = p + v
        d0 = unstable_projection_distance(m, LeafLift(p), LeafLift(q))
        d1 = unstable_projection_distance(m, LeafLift(apply(m.A, p)), LeafLift(apply(m.A, q)))
        if d0 == 0:
            continue
        rel = abs(d1 / (m.S.lambda_u * d0) - 1)
        if rel > worst:
            worst, worst_pair = rel, (p, q)
    return Verdict(
        "expansion-law",
        worst <= 1e-10,
        {"max_relative_error": worst, "worst_pair": [list(worst_pair[0].as_tuple()), list(worst_pair[1].as_tuple())]},
        model_parameters(m, trials=trials, seed=seed, grid_bits=grid_bits),
    )


# ---------------------------------------------------------------- metric suite


def _random_bases(rng, n):
    return rng.random((n, 2))


def metric_suite(m: ModelSystem, triples: int = 10_000, seed: int = 0) -> Verdict:
    """Symmetry, triangle inequality and the equivalence sandwich for d_H and the thresholded distance.

    Two families of triples are tested: uniform ones and clustered ones whose
    pairwise distances all lie below delta1.
    """
    rng = np.random.default_rng(seed)
    K = m.K
    A = m.A.as_array()
    families = {"uniform": [_random_bases(rng, triples) for _ in range(3)]}
    center = _random_bases(rng, triples)
    spread = K.delta1 / 3
    clustered = []
    for _ in range(3):
        ang = 2 * np.pi * rng.random(triples)
        rad = spread * np.sqrt(rng.random(triples))
        clustered.append((center + np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])) % 1.0)
    families["clustered"] = clustered

    def capped(d):
        return np.where(d >= K.delta1, K.delta0 / 2, np.minimum(d, K.delta0 / 2))

    report = {}
    passed = True
    for name, (X, Y, Z) in families.items():
        dxy, dyx = _hausdorff_rows(m, X, Y), _hausdorff_rows(m, Y, X)
        dyz, dxz = _hausdorff_rows(m, Y, Z), _hausdorff_rows(m, X, Z)
        Dxy, Dyz, Dxz = capped(dxy), capped(dyz), capped(dxz)
        sym = int(np.count_nonzero(dxy != dyx) + np.count_nonzero(capped(dyx) != Dxy))
        tri_h = int(np.count_nonzero(dxz > dxy + dyz + 1e-12))
        tri_mod = dxz_gap = Dxz - (Dxy + Dyz)
        tri_m = int(np.count_nonzero(tri_mod > 1e-12))
        lower = int(np.count_nonzero(np.minimum(K.delta0 / 2, dxy) > Dxy + 1e-15))
        upper = int(np.count_nonzero((dxy < K.delta1) & (Dxy > dxy + 1e-15)))
        fx, fy = (X @ A.T) % 1.0, (Y @ A.T) % 1.0
        equi = int(np.count_nonzero(_hausdorff_rows(m, fx, fy) > m.S.lambda_norm * dxy + 1e-12))
        entry = {
            "symmetry_failures": sym,
            "triangle_failures_hausdorff": tri_h,
            "triangle_failures_modified": tri_m,
            "sandwich_failures": lower + upper,
            "equivariance_failures": equi,
        }
        if tri_m:
            k = int(np.argmax(dxz_gap))
            entry["worst_modified_triangle"] = {
                "points": [X[k].tolist(), Y[k].tolist(), Z[k].tolist()],
                "excess": float(dxz_gap[k]),
            }
        report[name] = entry
        passed &= sym == tri_h == tri_m == lower == upper == equi == 0
    return Verdict("metric", bool(passed), report, model_parameters(m, triples=triples, seed=seed))


# ---------------------------------------------------------------- expansivity


def separation_steps(m: ModelSystem, d0: float, mu: float) -> int:
    """Steps after which an unstable (or, backward, stable) split coordinate d0 exceeds C*mu."""
    if d0 <= 0:
        return 0
    return max(0, math.floor(math.log(m.S.C * mu / d0) / math.log(m.S.lambda_u)) + 1)


def _first_separation(m: ModelSystem, p: T2Point, q: T2Point, mu: float, n_max: int) -> int | None:
    """Smallest |n| <= n_max with d(A^n p, A^n q) > mu, or None."""
    for n in range(0, n_max + 1):
        for s in (n, -n) if n else (0,):
            if torus_distance(apply(m.A, p, s), apply(m.A, q, s)) > mu:
                return s
    return None


def expansivity_probe(
    m: ModelSystem, mu: float | None = None, horizon: int = 50, trials: int = 100, seed: int = 0, eps: float = 0.05
) -> Verdict:
    """Trivial holonomy: distinct nearby leaves separate within the predicted time.

    Pillowcase: the verdict is the verified non-expansive pair of
    :func:`homoclinic_pair`.
    """
    mu = m.K.mu if mu is None else mu
    if m.pillowcase:
        _, _, v = homoclinic_pair(m, eps=eps, horizon=horizon)
        v.name = "expansivity"
        return v
    rng = np.random.default_rng(seed)
    pairs = []
    passed = True
    for k in range(trials):
        p = T2Point(*rng.random(2))
        if k < max(1, trials // 20):
            q = p
        else:
            r = mu * 10 ** (-8 * rng.random())
            phi = 2 * math.pi * rng.random()
            q = p + T2Vector(r * math.cos(phi), r * math.sin(phi))
        c_s, c_u = split_coords(shortest_displacement(p, q), m.S)
        d0 = max(abs(c_s), abs(c_u))
        n_star = separation_steps(m, d0, mu)
        if d0 == 0:
            sep = _first_separation(m, p, q, mu, horizon)
            ok = sep is None and torus_distance(p, q) <= m.S.lambda_s**horizon * mu * m.S.C
        else:
            sep = _first_separation(m, p, q, mu, n_star)
            ok = sep is not None
        passed &= ok
        pairs.append({"p": list(p.as_tuple()), "q": list(q.as_tuple()), "d0": d0, "bound_steps": n_star, "separated_at": sep, "ok": ok})
    return Verdict("expansivity", bool(passed), {"pairs": pairs}, model_parameters(m, mu_probe=mu, horizon=horizon, trials=trials, seed=seed))


def homoclinic_pair(
    m: ModelSystem,
    eps: float = 0.05,
    horizon: int = 50,
    singular: int = 0,
    max_den: int = 64,
    den_cap: int = 1024,
) -> tuple[CenterLeaf, CenterLeaf, Verdict]:
    """A periodic leaf W near a singular leaf and a second leaf W1 asymptotic to it in both time directions.

    W is the leaf over a rational point x. W1 is the leaf over the
    intersection of the stable line through x with the unstable line through
    -x, so F^n(W1) approaches F^n(W) forward along the stable direction and
    backward along the unstable one.
    """
    if not m.pillowcase:
        raise WrongModel("the homoclinic pair needs the pillowcase model")
    if not eps < m.K.delta0:
        raise ValueError(f"eps={eps} must be below delta0={m.K.delta0}")
    s = HALF_INTEGER_POINTS[singular]
    den = max_den
    while den <= den_cap:
        for q in range(2, den + 1):
            for _, fx, fy in lattice_near(s, eps, q):
                x = T2Point(float(fx), float(fy))
                if leaf(m, x).singular or _lowest_terms_q(fx, fy) != q:
                    continue
                witness = _homoclinic_witness(m, fx, fy, horizon)
                if witness is None or witness["max_distance"] > eps:
                    continue
                W, period = periodic_leaf_from_orbit(m, fx, fy)
                witness["period"] = period
                witness["periodic_exact"] = periodic_certificate(m, W, period) is not None
                W1 = leaf(m, T2Point(*witness["w"]))
                passed = witness["periodic_exact"] and witness["leaf_gap"] > 1e-12 and witness["max_distance"] <= eps
                v = Verdict(
                    "homoclinic",
                    bool(passed),
                    witness,
                    model_parameters(m, eps=eps, horizon=horizon, singular=list(s.as_tuple()), denominator=q),
                )
                return W, W1, v
        den *= 2
    raise NoPeriodicLeafFound(f"no rational leaf with denominator <= {den_cap} gives a pair within eps={eps}")


def _homoclinic_witness(m: ModelSystem, fx: Fraction, fy: Fraction, horizon: int) -> dict | None:
    S = m.S
    x = T2Point(float(fx), float(fy))
    two = ((2 * fx + Fraction(1, 2)) % 1 - Fraction(1, 2), (2 * fy + Fraction(1, 2)) % 1 - Fraction(1, 2))
    try:
        c_s, c_u = split_coords(T2Vector(float(two[0]), float(two[1])), S)
        signed_product_coords(m, -x, x, m.K.delta0)
    except ValueError:
        return None
    w_fwd = x + S.e_s * (-c_s)
    w_bwd = -x + S.e_u * c_u
    if torus_distance(w_fwd, w_bwd) > 1e-12:
        return None
    dist = _homoclinic_distances(m, fx, fy, c_s, c_u, horizon)
    return {
        "x": _fstr((fx, fy)),
        "w": list(w_fwd.as_tuple()),
        "c_s": c_s,
        "c_u": c_u,
        "distances": dist,
        "max_distance": max(dist),
        "leaf_gap": hausdorff_distance(m, leaf(m, x), leaf(m, w_fwd)),
    }


def _homoclinic_distances(m: ModelSystem, fx, fy, c_s, c_u, horizon) -> list[float]:
    """d_H(F^n W, F^n W1) for n = -horizon..horizon, with exact rational orbits of W."""
    S = m.S
    out = []
    for n in range(-horizon, horizon + 1):
        X = _fpoint(rational_apply(m.A.power(n), fx, fy))
        if n >= 0:
            w = X + S.e_s * (-c_s * S.eig_s**n)
        else:
            w = (-X) + S.e_u * (c_u * S.eig_u**n)
        out.append(base_distance(m, X.x, X.y, w.x, w.y))
    return out


# ---------------------------------------------------------------- asymptotic but not stable


def _check_signs(seq) -> tuple[str, ...]:
    seq = tuple(seq)
    if not seq or any(s not in (PLUS, MINUS) for s in seq):
        raise MalformedSequence("sign sequences must be non-empty strings of '+' and '-'")
    return seq


def _abs_envelope(c_s: np.ndarray, c_u: np.ndarray, alpha: float) -> np.ndarray:
    """Upper bound on |shadow - chain| from the absolute jump components."""
    n = len(c_s) + 1
    S = np.zeros(n)
    U = np.zeros(n)
    for i in range(n - 1):
        S[i + 1] = alpha * S[i] + abs(c_s[i])
    for i in range(n - 2, -1, -1):
        U[i] = alpha * (U[i + 1] + abs(c_u[i]))
    return S + U


def _split_jumps(m: ModelSystem, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = m.A.as_array()
    e = pts[1:] - pts[:-1] @ A.T
    e -= np.round(e)
    es, eu = m.S.e_s.as_array(), m.S.e_u.as_array()
    D = es[0] * eu[1] - es[1] * eu[0]
    return (e[:, 0] * eu[1] - e[:, 1] * eu[0]) / D, (es[0] * e[:, 1] - es[1] * e[:, 0]) / D


def block_chain(m: ModelSystem, signs, denominators) -> tuple[np.ndarray, list[int]]:
    """Lifted chain: block n runs one lift period of signs[n] * (1/q_n, 0)."""
    pts, starts = [], []
    for s, q in zip(signs, denominators):
        starts.append(len(pts))
        period = orbit_period_mod(m.A.entries(), (1, 0), q, False)
        p = T2Point(1.0 / q, 0.0)
        if s == MINUS:
            p = -p
        for _ in range(period):
            pts.append(p.as_tuple())
            p = apply(m.A, p)
    return np.array(pts), starts


def asymptotic_non_stable(
    m: ModelSystem, mu_seq, nu_seq, q0: int = 64, eta: float = 0.25, floor_min: float = 1e-3
) -> Verdict:
    """Two decorations of one leaf pseudo-orbit whose shadows are asymptotic in the quotient but not on lifts.

    Block n is one lift period of +-(1/q_n, 0) with q_n = q0 * 2^|n - origin|,
    so the jumps between blocks shrink toward both ends of the window.
    """
    if not m.pillowcase:
        raise WrongModel("the construction needs the pillowcase model")
    mu_seq, nu_seq = _check_signs(mu_seq), _check_signs(nu_seq)
    if len(mu_seq) != len(nu_seq):
        raise MalformedSequence("sign sequences must have the same number of blocks")
    B = len(mu_seq)
    ob = B // 2
    dens = [q0 * 2 ** abs(n - ob) for n in range(B)]
    chain_mu, starts = block_chain(m, mu_seq, dens)
    chain_nu, _ = block_chain(m, nu_seq, dens)
    origin = starts[ob]
    shadows = []
    for chain in (chain_mu, chain_nu):
        leaves = [leaf(m, T2Point(*p)) for p in chain]
        po = PseudoOrbit.from_leaves(m, leaves)
        signs = [sign_of(m, W, LeafLift(T2Point(*p))) for W, p in zip(leaves, chain)]
        shadows.append(shadow_bi_infinite(m, decorate_with(po, signs), eta, origin=origin))
    zmu, znu = shadows[0].points, shadows[1].points
    witness = {
        "mu_seq": "".join(mu_seq),
        "nu_seq": "".join(nu_seq),
        "denominators": dens,
        "block_starts": starts,
        "origin": origin,
        "z_mu": zmu,
        "z_nu": znu,
    }
    witness.update(_asymptotic_checks(m, mu_seq, nu_seq, starts, origin, chain_mu, chain_nu, zmu, znu, floor_min))
    return Verdict(
        "asymptotic",
        witness["passed"],
        witness,
        model_parameters(m, q0=q0, eta=eta, floor_min=floor_min, blocks=B),
    )


def _lift_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    v = b - a
    v -= np.round(v)
    return np.hypot(v[:, 0], v[:, 1])


def _asymptotic_checks(m, mu_seq, nu_seq, starts, origin, chain_mu, chain_nu, zmu, znu, floor_min) -> dict:
    T = len(chain_mu)
    ends = starts[1:] + [T]
    A = m.A.as_array()
    residual = max(
        float(_lift_dist(z[1:], (z[:-1] @ A.T) % 1.0).max(initial=0.0)) for z in (zmu, znu)
    )
    D = _hausdorff_rows(m, zmu, znu)
    env = _abs_envelope(*_split_jumps(m, chain_mu), m.S.alpha) + _abs_envelope(*_split_jumps(m, chain_nu), m.S.alpha)
    envelope_ok = bool(np.all(D <= env + 1e-12))
    bnd = starts[1:]
    left = [b for b in bnd if b <= origin]
    right = [b for b in bnd if b > origin]
    env_left = [float(env[b]) for b in left]
    env_right = [float(env[b]) for b in right]
    outward_decay = all(x <= y + 1e-15 for x, y in zip(env_left, env_left[1:])) and all(
        x >= y - 1e-15 for x, y in zip(env_right, env_right[1:])
    )
    lift_gap = _lift_dist(zmu, znu)
    reflected_gap = _lift_dist((-zmu) % 1.0, znu)
    block_floor, spec_min = [], []
    for n, (a, b) in enumerate(zip(starts, ends)):
        gap = lift_gap[a:b] if mu_seq[n] != nu_seq[n] else reflected_gap[a:b]
        block_floor.append(float(gap.max()))
        spec_min.append(float(np.minimum(lift_gap[a:b], reflected_gap[a:b]).min()))
    ob = starts.index(origin)
    disagree = [n for n in range(len(starts)) if mu_seq[n] != nu_seq[n]]
    agree = [n for n in range(len(starts)) if mu_seq[n] == nu_seq[n]]
    pattern_ok = (
        any(n < ob for n in disagree)
        and any(n > ob for n in disagree)
        and any(n < ob for n in agree)
        and any(n > ob for n in agree)
    )
    floor = min(block_floor)
    passed = bool(pattern_ok and residual <= 1e-9 and envelope_ok and outward_decay and floor > floor_min)
    return {
        "orbit_residual": residual,
        "quotient_distance_at_boundaries": [float(D[b]) for b in bnd],
        "envelope_at_boundaries": [float(env[b]) for b in bnd],
        "envelope_ok": envelope_ok,
        "outward_decay": bool(outward_decay),
        "block_floor": block_floor,
        "floor": floor,
        "min_form_per_block": spec_min,
        "pattern_ok": bool(pattern_ok),
        "passed": passed,
    }


# ---------------------------------------------------------------- intersections


def intersection_params(m: ModelSystem, base: T2Point, L: CenterLeaf, stable_arc: float, tol: float = 1e-9) -> list[float]:
    """Parameters tau in [-arc/2, arc/2] where base + tau*e_s lies over the leaf L."""
    es = m.S.e_s
    half = stable_arc / 2
    targets = [L.base] if (L.singular or not m.pillowcase) else [L.base, -L.base]
    taus: list[float] = []
    # the segment's x-coordinate is monotone in tau because e_s.dx > 0
    lo, hi = base.x - half * es.dx, base.x + half * es.dx
    for t in targets:
        for kx in range(math.floor(lo - t.x) - 1, math.ceil(hi - t.x) + 2):
            tau = (t.x + kx - base.x) / es.dx
            if abs(tau) > half:
                continue
            ry = base.y + tau * es.dy - t.y
            if abs(ry - round(ry)) * es.dx <= tol:
                if all(abs(tau - u) > 1e-12 for u in taus):
                    taus.append(tau)
    return sorted(taus)


def intersection_count(m: ModelSystem, base_point: T2Point, L: CenterLeaf, stable_arc: float) -> Verdict:
    """Count points of the stable segment through (base_point, 0) that lie on the center circle of L."""
    taus = intersection_params(m, base_point, L, stable_arc)
    limit = 1 if m.pillowcase else 0
    return Verdict(
        "intersection",
        len(taus) <= max(limit, 1),
        {"base": list(base_point.as_tuple()), "leaf": list(L.base.as_tuple()), "taus": taus, "count": len(taus)},
        model_parameters(m, stable_arc=stable_arc),
    )


def intersection_probe(m: ModelSystem, trials: int = 1000, seed: int = 0, doublings: int = 10) -> Verdict:
    """Random leaves placed on the stable line of a random base point, arcs doubling up to 2^doublings * mu."""
    rng = np.random.default_rng(seed)
    mu = m.K.mu
    max_count = 0
    records = []
    for k in range(trials):
        base = T2Point(*rng.random(2))
        if k % 2 == 0:
            tau0 = (rng.random() - 0.5) * mu
            L = leaf(m, base + m.S.e_s * tau0)
        else:
            L = leaf(m, T2Point(*rng.random(2)))
        counts = [len(intersection_params(m, base, L, mu * 2**j)) for j in range(doublings + 1)]
        max_count = max(max_count, max(counts))
        records.append({"base": list(base.as_tuple()), "leaf": list(L.base.as_tuple()), "counts": counts})
    return Verdict(
        "intersection",
        max_count <= 1,
        {"max_count": max_count, "trials": records},
        model_parameters(m, trials=trials, seed=seed, doublings=doublings),
    )


# ---------------------------------------------------------------- plaque expansivity


def _circle_gap(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def plaque_trial(m: ModelSystem, a0: T2Point, c: float, horizon: int, eta: float, rng=None) -> dict:
    """One pair of plaque-respecting pseudo-orbits and the projected sequence z.

    The base of x follows the exact orbit of a0; the base of y is the exact
    orbit of a0 + c*e_s in closed form. Fiber coordinates jump within the
    center plaque by at most eta/2 per step. For the pillowcase, y is stored
    through a randomly chosen representative of its point in M.
    """
    S = m.S
    G = m.A.power(1)
    a = a0
    tx = ty = 0.0
    xs, zs = [], []
    max_base_gap = max_fiber = max_u = 0.0
    prev_z = None
    for i in range(horizon + 1):
        yb = a + S.e_s * (c * S.eig_s**i)
        y = PointM(yb, ty)
        if m.pillowcase and rng is not None and rng.random() < 0.5:
            y = PointM(-yb, ty + 0.5)
        x = PointM(a, tx)
        # matched representative of y's base next to x's base
        ref = y.base if not m.pillowcase or torus_distance(a, y.base) <= torus_distance(a, -y.base) else -y.base
        pr = local_product(m, a, ref)
        z = PointM(pr.point, tx)
        max_u = max(max_u, pr.u_component)
        if prev_z is not None:
            max_base_gap = max(max_base_gap, torus_distance(apply_int(G, prev_z.base), z.base))
            max_fiber = max(max_fiber, _circle_gap(prev_z.t + m.theta, z.t))
        xs.append(x)
        zs.append(z)
        prev_z = z
        a = apply_int(G, a)
        jx = (rng.random() - 0.5) * eta if rng is not None else 0.0
        jy = (rng.random() - 0.5) * eta if rng is not None else 0.0
        tx, ty = tx + m.theta + jx, ty + m.theta + jy
    xz = max(distance_M(m, x, z) for x, z in zip(xs, zs))
    return {"max_xz": xz, "max_base_gap": max_base_gap, "max_fiber_jump": max_fiber, "max_u": max_u}


def plaque_expansivity_probe(m: ModelSystem, eta: float = 0.01, horizon: int = 500, trials: int = 100, seed: int = 0) -> Verdict:
    if not eta <= m.K.mu:
        raise ValueError(f"eta={eta} must not exceed mu={m.K.mu}")
    rng = np.random.default_rng(seed)
    scale = float(1 << 40)
    rows = []
    passed = True
    for _ in range(trials):
        a0 = T2Point(*(rng.integers(0, 1 << 40, size=2) / scale))
        c = (rng.random() - 0.5) * eta
        r = plaque_trial(m, a0, c, horizon, eta, rng)
        ok = r["max_base_gap"] <= 1e-10 and r["max_fiber_jump"] <= eta and r["max_xz"] <= 1e-10 and r["max_u"] < m.K.mu
        passed &= ok
        rows.append({"a0": list(a0.as_tuple()), "c": c, **r, "ok": ok})
    return Verdict("plaque", bool(passed), {"trials": rows}, model_parameters(m, eta=eta, horizon=horizon, trials=trials, seed=seed))


# ---------------------------------------------------------------- cs growth


def stable_line_closure(m: ModelSystem, length: float) -> float:
    """Distance from the origin's stable segment of half-length ``length`` to the nonzero integer lattice."""
    es = m.S.e_s
    best = math.inf
    kmax = int(math.ceil(length * abs(es.dx))) + 1
    for kx in range(-kmax, kmax + 1):
        # nearest lattice points to the line above kx
        y_on_line = kx * es.dy / es.dx
        for ky in (math.floor(y_on_line), math.ceil(y_on_line)):
            if kx == 0 and ky == 0:
                continue
            k = T2Vector(kx, ky)
            along = k.dx * es.dx + k.dy * es.dy
            if abs(along) > length:
                continue
            best = min(best, abs(k.cross(es)))
    return best


def cs_growth_probe(m: ModelSystem, start: T2Point | None = None, steps: int = 10) -> Verdict:
    start = T2Point(0.0, 0.0) if start is None else start
    S = m.S
    mu = m.K.mu
    closures = [stable_line_closure(m, mu * 2.0**j) for j in range(steps + 1)]
    growth = []
    n = 0
    while S.lambda_u**n * mu < 0.5 and n <= steps:
        M = np.array(m.A.power(-n), dtype=float).reshape(2, 2)
        v = M @ (mu * S.e_s.as_array())
        growth.append(float(np.hypot(*v)))
        n += 1
    monotone = all(b > a for a, b in zip(growth, growth[1:]))
    rates_u, rates_s = [], []
    for k in range(1, steps + 1):
        Mk = np.array(m.A.power(k), dtype=float).reshape(2, 2)
        rates_u.append(abs(np.hypot(*(Mk @ S.e_u.as_array())) / S.lambda_u**k - 1))
        rates_s.append(abs(np.hypot(*(Mk @ S.e_s.as_array())) / S.lambda_s**k - 1))
    passed = min(closures) > 1e-9 and monotone and max(rates_u) <= 1e-10 and max(rates_s) <= 1e-6
    return Verdict(
        "growth",
        bool(passed),
        {
            "start": list(start.as_tuple()),
            "closure_distance": closures,
            "backward_cs_diameter": growth,
            "unstable_rate_error": max(rates_u),
            "stable_rate_error": max(rates_s),
        },
        model_parameters(m, steps=steps),
    )


# ---------------------------------------------------------------- periodic density


def periodic_density(m: ModelSystem, trials: int = 100, delta: float = 0.02, seed: int = 0, q: int = 64) -> Verdict:
    """Periodic leaves near random leaves, seeded at the nearest point of the 1/q lattice."""
    rng = np.random.default_rng(seed)
    rows = []
    passed = True
    for _ in range(trials):
        x = T2Point(*rng.random(2))
        fx, fy = Fraction(round(x.x * q) % q, q), Fraction(round(x.y * q) % q, q)
        W, period = periodic_leaf_from_orbit(m, fx, fy)
        cert = periodic_certificate(m, W, period)
        d = hausdorff_distance(m, W, leaf(m, x))
        ok = cert is not None and d <= delta
        passed &= ok
        rows.append({"target": list(x.as_tuple()), "leaf": _fstr(cert) if cert else None, "period": period, "distance": d, "ok": ok})
    return Verdict("periodic-density", bool(passed), {"leaves": rows}, model_parameters(m, trials=trials, delta=delta, seed=seed, q=q))


# ---------------------------------------------------------------- decorations


def find_short_period_leaf(m: ModelSystem, center: T2Point, radius: float, max_den: int) -> tuple[Fraction, Fraction, int]:
    """Non-singular rational point within radius of center minimizing the leaf period."""
    best = None
    for q in range(3, max_den + 1):
        for d, fx, fy in lattice_near(center, radius, q):
            if _lowest_terms_q(fx, fy) != q or leaf(m, T2Point(float(fx), float(fy))).singular:
                continue
            p = rational_leaf_period(m, fx, fy)
            key = (p, d, q)
            if best is None or key < best[0]:
                best = (key, fx, fy, p)
    if best is None:
        raise NoPeriodicLeafFound(f"no rational leaf within {radius} of {center} with denominator <= {max_den}")
    return best[1], best[2], best[3]


def decoration_multiplicity(
    m: ModelSystem,
    k: int = 5,
    radius: float = 0.005,
    jitter: float = 1e-9,
    eta: float = 0.1,
    seed: int = 0,
    max_den: int = 400,
) -> Verdict:
    """Shadows of all 2^k decorations of a pseudo-orbit returning k times near a singular leaf.

    The leaves follow a short periodic orbit through a rational point p near
    the singular leaf over (0,0), each perturbed by at most ``jitter``. At
    every return the decoration may keep the matched lift or switch to the
    other representative; switching costs a lift jump of about 2|p|.
    """
    if not m.pillowcase:
        raise WrongModel("decorations are inert without holonomy")
    fx, fy, period = find_short_period_leaf(m, HALF_INTEGER_POINTS[0], radius, max_den)
    n = k * period + 1
    rng = np.random.default_rng(seed)
    leaves = []
    for p in rational_orbit(m, fx, fy, n):
        r = jitter * math.sqrt(rng.random())
        phi = 2 * math.pi * rng.random()
        leaves.append(leaf(m, _fpoint(p) + T2Vector(r * math.cos(phi), r * math.sin(phi))))
    po = PseudoOrbit.from_leaves(m, leaves)
    greedy = decorate(po)
    base_signs = greedy.signs

    # uniqueness: the same decoration twice, and the oracle
    t1, t2 = shadow(m, greedy, eta), shadow(m, greedy, eta)
    repeat_gap = hausdorff_distance(m, t1.shadow, t2.shadow)
    oracle_gap = hausdorff_distance(m, t1.shadow, shadow_oracle(m, greedy, eta))

    traces, choices = [], []
    for bits in itertools.product((0, 1), repeat=k):
        signs = []
        for i, (W, s) in enumerate(zip(leaves, base_signs)):
            parity = sum(bits[j] for j in range(k) if (j + 1) * period <= i) % 2
            if parity and not W.singular:
                s = MINUS if s == PLUS else PLUS
            signs.append(s)
        traces.append(shadow(m, decorate_with(po, signs), eta))
        choices.append("".join(str(b) for b in bits))
    count = len(traces)
    pair_sup = np.zeros((count, count))
    pair_t0 = np.zeros((count, count))
    for a in range(count):
        for b in range(a + 1, count):
            d = _vector_leaf_distance(m, traces[a].points, traces[b].points)
            pair_sup[a, b] = pair_sup[b, a] = d.max()
            pair_t0[a, b] = pair_t0[b, a] = hausdorff_distance(m, traces[a].shadow, traces[b].shadow)
    off = pair_sup[~np.eye(count, dtype=bool)]
    eps = po.epsilon
    passed = (
        repeat_gap <= 1e-12
        and oracle_gap <= 1e-9
        and off.min() > 10 * eps
        and all(t.bound_holds for t in traces)
    )
    return Verdict(
        "multiplicity",
        bool(passed),
        {
            "p": _fstr((fx, fy)),
            "period": period,
            "epsilon": eps,
            "decorated_epsilon": max(t.epsilon for t in traces),
            "repeat_gap": repeat_gap,
            "oracle_gap": oracle_gap,
            "choices": choices,
            "shadows": [list(t.shadow.base.as_tuple()) for t in traces],
            "points": [t.points for t in traces],
            "min_pairwise_orbit_distance": float(off.min()),
            "min_pairwise_time0_distance": float(pair_t0[~np.eye(count, dtype=bool)].min()),
            "distinct_at_time0": int(
                sum(1 for a in range(count) for b in range(a + 1, count) if pair_t0[a, b] > 0)
            ),
        },
        model_parameters(m, k=k, radius=radius, jitter=jitter, eta=eta, seed=seed),
    )


# ---------------------------------------------------------------- re-verification


def _arr(x) -> np.ndarray:
    return np.array(x, dtype=float)


def reverify(payload: dict) -> bool:
    """Recompute the decisive inequalities of a verdict payload (as written to JSON)."""
    name = payload["name"]
    p = payload["parameters"]
    w = payload["witness"]
    m = model_from_parameters(p)
    if name in ("homoclinic", "expansivity") and m.pillowcase:
        fx, fy = _fparse(w["x"])
        c_s, c_u = float(w["c_s"]), float(w["c_u"])
        dist = _homoclinic_distances(m, fx, fy, c_s, c_u, int(p["horizon"]))
        W = leaf(m, T2Point(float(fx), float(fy)))
        W1 = leaf(m, T2Point(*(float(t) for t in w["w"])))
        period = int(w["period"])
        exact = periodic_certificate(m, W, period) is not None
        x = T2Point(float(fx), float(fy))
        on_lines = (
            torus_distance(x + m.S.e_s * (-c_s), W1.base) < 1e-12 or torus_distance(-(x + m.S.e_s * (-c_s)), W1.base) < 1e-12
        )
        return bool(exact and on_lines and max(dist) <= float(p["eps"]) and hausdorff_distance(m, W, W1) > 1e-12)
    if name == "expansivity":
        mu = float(p["mu_probe"])
        for r in w["pairs"]:
            P, Q = T2Point(*map(float, r["p"])), T2Point(*map(float, r["q"]))
            c_s, c_u = split_coords(shortest_displacement(P, Q), m.S)
            d0 = max(abs(c_s), abs(c_u))
            if d0 == 0:
                continue
            sep = r["separated_at"]
            if sep is None or abs(int(sep)) > separation_steps(m, d0, mu):
                return False
            if not torus_distance(apply(m.A, P, int(sep)), apply(m.A, Q, int(sep))) > mu:
                return False
        return True
    if name == "asymptotic":
        mu_seq, nu_seq = tuple(w["mu_seq"]), tuple(w["nu_seq"])
        dens = [int(d) for d in w["denominators"]]
        chain_mu, starts = block_chain(m, mu_seq, dens)
        chain_nu, _ = block_chain(m, nu_seq, dens)
        zmu, znu = _arr(w["z_mu"]), _arr(w["z_nu"])
        if zmu.shape != chain_mu.shape or starts != [int(s) for s in w["block_starts"]]:
            return False
        chk = _asymptotic_checks(
            m, mu_seq, nu_seq, starts, int(w["origin"]), chain_mu, chain_nu, zmu, znu, float(p["floor_min"])
        )
        return chk["passed"]
    if name == "intersection":
        if "trials" not in w:
            L = leaf(m, T2Point(*map(float, w["leaf"])))
            return len(intersection_params(m, T2Point(*map(float, w["base"])), L, float(p["stable_arc"]))) <= 1
        for r in w["trials"]:
            base = T2Point(*map(float, r["base"]))
            L = leaf(m, T2Point(*map(float, r["leaf"])))
            for j in range(int(p["doublings"]) + 1):
                if len(intersection_params(m, base, L, m.K.mu * 2**j)) > 1:
                    return False
        return True
    if name == "plaque":
        for r in w["trials"]:
            a0 = T2Point(*map(float, r["a0"]))
            res = plaque_trial(m, a0, float(r["c"]), int(p["horizon"]), float(p["eta"]))
            if not (res["max_xz"] <= 1e-10 and res["max_base_gap"] <= 1e-10):
                return False
        return True
    if name == "growth":
        v = cs_growth_probe(m, T2Point(*map(float, w["start"])), int(p["steps"]))
        return v.passed
    if name == "periodic-density":
        for r in w["leaves"]:
            if r["leaf"] is None:
                return False
            fx, fy = _fparse(r["leaf"])
            W = leaf(m, T2Point(float(fx), float(fy)))
            if periodic_certificate(m, W, int(r["period"])) is None:
                return False
            if hausdorff_distance(m, W, leaf(m, T2Point(*map(float, r["target"])))) > float(p["delta"]):
                return False
        return True
    if name == "multiplicity":
        pts = [_arr(x) for x in w["points"]]
        eps = float(w["epsilon"])
        A = m.A.as_array()
        for z in pts:
            if _lift_dist(z[1:], (z[:-1] @ A.T) % 1.0).max() > 1e-9:
                return False
        return all(
            _vector_leaf_distance(m, pts[a], pts[b]).max() > 10 * eps
            for a in range(len(pts))
            for b in range(a + 1, len(pts))
        )
    if name == "metric":
        return all(
            int(v) == 0 for fam in w.values() for k, v in fam.items() if k.endswith("_failures")
        )
    if name in ("expansion-law", "shadow-bound"):
        return bool(payload["passed"])
    raise ValueError(f"no re-verification for {name!r}")


PROBES = {
    "expansivity": expansivity_probe,
    "homoclinic": homoclinic_pair,
    "asymptotic": asymptotic_non_stable,
    "intersection": intersection_probe,
    "plaque": plaque_expansivity_probe,
    "growth": cs_growth_probe,
    "periodic-density": periodic_density,
    "multiplicity": decoration_multiplicity,
    "expansion-law": expansion_law_probe,
    "metric": metric_suite,
    "shadow-bound": shadow_bound_probe,
}
