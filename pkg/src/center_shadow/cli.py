"""Command-line front end.

Subcommands::

    center-shadow shadow [--len N --jump J | --orbit FILE]
    center-shadow exp PROBE
    center-shadow constants
    center-shadow gen-orbit

A ``--config`` file holds flat ``key = value`` lines using the flag names
(without dashes); flags given on the command line win over the file. The
environment variable ``CENTER_SHADOW_OUT`` overrides ``--out``.

Exit codes: 0 success, 1 probe failed, 2 configuration error or unknown probe,
3 epsilon budget exceeded, 4 shadow bound violated or oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import experiments as E
from .errors import BudgetExceeded, CenterShadowError
from .io import dump_json, parse_matrix, parse_point, read_pseudo_orbit, to_jsonable, write_pseudo_orbit, write_trace_csv
from .leaves import ModelKind, ModelSystem, hausdorff_distance
from .shadowing import decorate, make_pseudo_orbit, shadow, shadow_oracle
from .torus import epsilon_budget, shadow_bound

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_BUDGET, EXIT_BOUND = 0, 1, 2, 3, 4
OUT_ENV = "CENTER_SHADOW_OUT"
ORACLE_TOL = 1e-9
DEFAULT_ETA = 0.01

DEFAULTS = {
    "model": "pillowcase",
    "matrix": "2,1,1,1",
    "theta": "0",
    "seed": "0",
    "len": "1000",
    "jump": "1e-4",
    "out": ".",
}

INT_KEYS = {"seed", "len", "trials", "horizon", "steps", "q", "k"}
FLOAT_KEYS = {"theta", "jump", "eta", "eps", "mu", "delta0", "delta1", "delta"}
STR_KEYS = {"model", "matrix", "out", "orbit", "mu_seq", "nu_seq", "file", "start"}


class ConfigError(CenterShadowError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: ModelSystem
    values: dict

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def out(self) -> Path:
        return Path(self.values["out"])


def read_config_file(path: str | Path) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in INT_KEYS | FLOAT_KEYS | STR_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the config file, flags and the output override, then validate."""
    merged: dict[str, str] = dict(DEFAULTS)
    if args.config:
        try:
            merged.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    for key in INT_KEYS | FLOAT_KEYS | STR_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = str(v)
    if os.environ.get(OUT_ENV):
        merged["out"] = os.environ[OUT_ENV]
    values: dict = {}
    for key, v in merged.items():
        try:
            values[key] = int(v) if key in INT_KEYS else float(v) if key in FLOAT_KEYS else v
        except ValueError as exc:
            raise ConfigError(f"{key}={v!r} is not a valid number") from exc
    try:
        kind = ModelKind(values["model"])
    except ValueError as exc:
        raise ConfigError(f"model must be 'trivial' or 'pillowcase', got {values['model']!r}") from exc
    constants = {k: values[k] for k in ("mu", "delta0", "delta1") if k in values}
    try:
        m = ModelSystem.create(kind, parse_matrix(values["matrix"]), values["theta"], **constants)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    return RunConfig(m, values)


def _write_json_stdout(payload) -> None:
    sys.stdout.write(json.dumps(to_jsonable(payload), indent=1, sort_keys=True) + "\n")


def cmd_constants(cfg: RunConfig) -> int:
    m = cfg.model
    eta = cfg.get("eta", DEFAULT_ETA)
    S, K = m.S, m.K
    payload = {
        "matrix": str(m.A),
        "model": m.kind.value,
        "lambda_u": S.lambda_u,
        "lambda_s": S.lambda_s,
        "alpha": S.alpha,
        "beta": S.beta,
        "lambda_norm": S.lambda_norm,
        "C": S.C,
        "e_u": [S.e_u.dx, S.e_u.dy],
        "e_s": [S.e_s.dx, S.e_s.dy],
        "mu": K.mu,
        "delta0": K.delta0,
        "delta1": K.delta1,
        "N": K.N,
        "eta": eta,
        "epsilon_budget": epsilon_budget(S, K, eta),
        "shadow_bound_at_budget": shadow_bound(S, K, epsilon_budget(S, K, eta)),
    }
    _write_json_stdout(payload)
    return EXIT_OK


def _pseudo_orbit_from(cfg: RunConfig):
    if cfg.get("orbit"):
        return read_pseudo_orbit(cfg.get("orbit"))
    m = cfg.model
    po = make_pseudo_orbit(m, cfg.get("seed"), cfg.get("len"), cfg.get("jump"), eta=cfg.get("eta", DEFAULT_ETA))
    return m, decorate(po)


def cmd_gen_orbit(cfg: RunConfig) -> int:
    m, dpo = _pseudo_orbit_from(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = Path(cfg.get("file")) if cfg.get("file") else cfg.out / "orbit.txt"
    write_pseudo_orbit(path, dpo)
    print(path)
    return EXIT_OK


def cmd_shadow(cfg: RunConfig) -> int:
    m, dpo = _pseudo_orbit_from(cfg)
    eta = cfg.get("eta", DEFAULT_ETA)
    trace = shadow(m, dpo, eta)
    oracle = shadow_oracle(m, dpo, eta)
    gap = hausdorff_distance(m, oracle, trace.shadow)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(cfg.out / "trace.csv", trace)
    ok = trace.bound_holds and gap <= ORACLE_TOL
    report = {
        "shadow": [trace.shadow.base.x, trace.shadow.base.y],
        "oracle": [oracle.base.x, oracle.base.y],
        "oracle_gap": gap,
        "epsilon": trace.epsilon,
        "bound": trace.bound,
        "max_distance": float(trace.per_step_distance.max()),
        "converged_at": trace.converged_at,
        "cap_hits": trace.cap_hits,
        "ledger_violations": list(trace.violations),
        "bound_holds": trace.bound_holds,
        "passed": ok,
    }
    dump_json(cfg.out / "report.json", report)
    print(f"max distance {report['max_distance']:.6g} / bound {trace.bound:.6g}, oracle gap {gap:.3g}")
    return EXIT_OK if ok else EXIT_BOUND


def _probe_kwargs(name: str, cfg: RunConfig) -> dict:
    g = cfg.get
    pick = {
        "expansivity": {"horizon": "horizon", "trials": "trials", "seed": "seed", "eps": "eps"},
        "homoclinic": {"eps": "eps", "horizon": "horizon"},
        "asymptotic": {"eta": "eta"},
        "intersection": {"trials": "trials", "seed": "seed"},
        "plaque": {"eta": "eta", "horizon": "horizon", "trials": "trials", "seed": "seed"},
        "growth": {"steps": "steps"},
        "periodic-density": {"trials": "trials", "seed": "seed", "delta": "delta", "q": "q"},
        "multiplicity": {"k": "k", "seed": "seed"},
        "expansion-law": {"trials": "trials", "seed": "seed"},
        "metric": {"triples": "trials", "seed": "seed"},
        "shadow-bound": {"orbits": "trials", "length": "len", "eta": "eta", "seed": "seed"},
    }[name]
    kw = {arg: g(key) for arg, key in pick.items() if g(key) is not None}
    if name == "asymptotic":
        kw["mu_seq"] = g("mu_seq") or "+" * 10
        kw["nu_seq"] = g("nu_seq") or "+-" * 5
    if name == "growth" and g("start"):
        kw["start"] = parse_point(g("start"))
    return kw


def cmd_experiment(cfg: RunConfig, probe: str) -> int:
    if probe not in E.PROBES:
        print(f"unknown probe {probe!r}; choose from {', '.join(sorted(E.PROBES))}", file=sys.stderr)
        return EXIT_CONFIG
    result = E.PROBES[probe](cfg.model, **_probe_kwargs(probe, cfg))
    verdict = result[2] if isinstance(result, tuple) else result
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / f"{probe}.json"
    dump_json(path, verdict.to_payload())
    print(f"{probe}: {'passed' if verdict.passed else 'FAILED'} -> {path}")
    return EXIT_OK if verdict.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    common.add_argument("--model", choices=[k.value for k in ModelKind])
    common.add_argument("--matrix", help="integer entries a,b,c,d of the Anosov matrix")
    common.add_argument("--theta", type=float, help="fiber rotation")
    common.add_argument("--seed", type=int)
    common.add_argument("--len", type=int, help="pseudo-orbit length")
    common.add_argument("--jump", type=float, help="pseudo-orbit jump scale")
    common.add_argument("--eta", type=float, help=f"shadowing accuracy (default {DEFAULT_ETA}; probes have their own defaults)")
    common.add_argument("--eps", type=float, help="closeness for the homoclinic pair")
    common.add_argument("--mu", type=float)
    common.add_argument("--delta0", type=float)
    common.add_argument("--delta1", type=float)
    common.add_argument("--out", help=f"output directory (overridden by ${OUT_ENV})")
    common.add_argument("--trials", type=int)
    common.add_argument("--horizon", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="center-shadow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("shadow", parents=[common], help="shadow a generated or stored pseudo-orbit")
    p.add_argument("--orbit", help="pseudo-orbit file to shadow instead of generating one")
    p = sub.add_parser("exp", parents=[common], help="run a probe and write its verdict")
    p.add_argument("probe")
    p.add_argument("--steps", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--mu-seq", dest="mu_seq")
    p.add_argument("--nu-seq", dest="nu_seq")
    p.add_argument("--start", help="x,y start point for the growth probe")
    sub.add_parser("constants", parents=[common], help="print the derived constants as JSON")
    p = sub.add_parser("gen-orbit", parents=[common], help="write a random decorated pseudo-orbit file")
    p.add_argument("--file", help="output file (default OUT/orbit.txt)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "constants":
            return cmd_constants(cfg)
        if args.command == "gen-orbit":
            return cmd_gen_orbit(cfg)
        if args.command == "shadow":
            return cmd_shadow(cfg)
        return cmd_experiment(cfg, args.probe)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CenterShadowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
