"""Text formats: leaves, pseudo-orbit files, shadow-trace CSV and verdict JSON.

Pseudo-orbit file::

    # model=pillowcase
    # matrix=2,1,1,1
    # theta=0
    # epsilon=0.00123
    0.123456789012,0.987654321098 +
    ...

One line per leaf: the canonical representative with 12 decimals and the sign
of the chosen lift. The first sign picks the initial lift.
"""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidPseudoOrbit
from .leaves import SIGNS, CenterLeaf, ModelKind, ModelSystem, leaf
from .shadowing import DecoratedPseudoOrbit, PseudoOrbit, ShadowTrace, decorate_with
from .torus import AnosovMatrix, T2Point

LEAF_DIGITS = 12


def format_leaf(L: CenterLeaf) -> str:
    return f"{L.base.x:.{LEAF_DIGITS}f},{L.base.y:.{LEAF_DIGITS}f}"


def parse_point(text: str) -> T2Point:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return T2Point(float(parts[0]), float(parts[1]))


def parse_matrix(text: str) -> AnosovMatrix:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"matrix needs four comma-separated integers, got {text!r}")
    try:
        return AnosovMatrix(*(int(p) for p in parts))
    except ValueError as exc:
        if "invalid literal" in str(exc):
            raise ValueError(f"matrix entries must be integers: {text!r}") from exc
        raise


def write_pseudo_orbit(path: str | Path, dpo: DecoratedPseudoOrbit) -> None:
    m = dpo.model
    lines = [
        f"# model={m.kind.value}",
        f"# matrix={m.A}",
        f"# theta={m.theta!r}",
        f"# epsilon={dpo.base.epsilon!r}",
    ]
    lines += [f"{format_leaf(W)} {s}" for W, s in zip(dpo.base.leaves, dpo.signs)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pseudo_orbit(path: str | Path, **constants) -> tuple[ModelSystem, DecoratedPseudoOrbit]:
    """Read a pseudo-orbit file; keyword arguments override the default constants.

    The header epsilon is re-validated after rounding the leaves to the file's
    precision, so it is widened by the rounding slack of two leaves.
    """
    header: dict[str, str] = {}
    leaves_txt: list[tuple[str, str]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                header[key.strip()] = value.strip()
            continue
        fields = line.split()
        if len(fields) != 2 or fields[1] not in SIGNS:
            raise InvalidPseudoOrbit(f"line {lineno}: expected 'x,y sign', got {raw!r}")
        leaves_txt.append((fields[0], fields[1]))
    for key in ("model", "matrix"):
        if key not in header:
            raise InvalidPseudoOrbit(f"missing header field {key!r}")
    m = ModelSystem.create(
        ModelKind(header["model"]),
        parse_matrix(header["matrix"]),
        float(header.get("theta", "0")),
        **constants,
    )
    leaves = [leaf(m, parse_point(t)) for t, _ in leaves_txt]
    slack = 2 * m.S.lambda_norm * 10.0**-LEAF_DIGITS
    eps = float(header["epsilon"]) + slack if "epsilon" in header else None
    po = PseudoOrbit.from_leaves(m, leaves, eps)
    return m, decorate_with(po, [s for _, s in leaves_txt])


def write_trace_csv(path: str | Path, trace: ShadowTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "dist", "correction", "bound"])
        for i, (d, c) in enumerate(zip(trace.per_step_distance, trace.corrections)):
            w.writerow([i, f"{d:.12g}", f"{c:.12g}", f"{trace.bound:.12g}"])


def read_trace_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in ("step", "dist", "correction", "bound")}


def to_jsonable(obj):
    """Recursively convert to JSON-ready values; floats become full-precision decimal strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return repr(x) if math.isfinite(x) else str(x)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, T2Point):
        return [repr(obj.x), repr(obj.y)]
    if isinstance(obj, CenterLeaf):
        return format_leaf(obj)
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(path: str | Path, payload) -> None:
    Path(path).write_text(json.dumps(to_jsonable(payload), indent=1, sort_keys=True) + "\n")


def load_json(path: str | Path):
    return json.loads(Path(path).read_text())


def num(x) -> float:
    """Inverse of the float encoding used in JSON payloads."""
    return float(x)


def frac(text: str) -> Fraction:
    return Fraction(text)
