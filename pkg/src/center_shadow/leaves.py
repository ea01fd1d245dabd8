"""Center leaves of the two model skew products and the metrics on their leaf space.

Both models are ``f = A x R_theta`` acting on ``T^2 x S^1``:

* ``TRIVIAL``: the manifold is T^3 itself; each center leaf is a circle
  ``{x} x S^1`` and the leaf space is T^2.
* ``PILLOWCASE``: the manifold is the quotient of T^3 by the free involution
  ``(r, s, t) -> (-r, -s, t + 1/2)``. A center leaf is the image of
  ``{x} x S^1`` and is determined by the unordered pair ``{x, -x}``; T^3 is a
  global double cover that realizes the holonomy cover of every leaf. The four
  leaves over half-integer points carry holonomy of order two.

Leaf-level operations ignore the fiber coordinate: every metric used here is
independent of it for a product with a rigid fiber rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import TooFar, WrongModel
from .torus import (
    CAT_MAP,
    EQ_TOL,
    AnosovMatrix,
    Constants,
    HyperbolicSplitting,
    T2Point,
    _wrap,
    apply,
    eigen_split,
    torus_distance,
)


class ModelKind(str, Enum):
    TRIVIAL = "trivial"
    PILLOWCASE = "pillowcase"


PLUS = "+"
MINUS = "-"
SIGNS = (PLUS, MINUS)


@dataclass(frozen=True)
class ModelSystem:
    kind: ModelKind
    A: AnosovMatrix
    theta: float
    S: HyperbolicSplitting
    K: Constants

    @classmethod
    def create(
        cls,
        kind: ModelKind | str = ModelKind.PILLOWCASE,
        A: AnosovMatrix = CAT_MAP,
        theta: float = 0.0,
        **constants,
    ) -> ModelSystem:
        """Build a model; keyword arguments override the default constants."""
        S = eigen_split(A)
        K = Constants.for_splitting(S, **constants)
        return cls(ModelKind(kind), A, float(theta) % 1.0, S, K)

    def __post_init__(self):
        if self.kind is ModelKind.PILLOWCASE:
            # the involution commutes with A x R_theta because A is linear
            p = T2Point(0.1234567, 0.7654321)
            assert torus_distance(apply(self.A, -p), -apply(self.A, p)) < EQ_TOL

    @property
    def pillowcase(self) -> bool:
        return self.kind is ModelKind.PILLOWCASE


def _coord_dist(t: float) -> float:
    d = abs(t) % 1.0
    return min(d, 1.0 - d)


def _flat(ax: float, ay: float, bx: float, by: float) -> float:
    """Torus distance on raw coordinates (same value as torus_distance)."""
    return math.hypot(_coord_dist(bx - ax), _coord_dist(by - ay))


def _is_half_integer(p: T2Point) -> bool:
    return math.hypot(_coord_dist(2 * p.x), _coord_dist(2 * p.y)) < EQ_TOL


def canonical_xy(pillowcase: bool, x: float, y: float) -> tuple[float, float]:
    """Canonical representative on raw coordinates, reduced into [0, 1)."""
    x, y = _wrap(x), _wrap(y)
    if not pillowcase:
        return x, y
    if math.hypot(_coord_dist(2 * x), _coord_dist(2 * y)) < EQ_TOL:
        return _wrap(round(2 * x) / 2), _wrap(round(2 * y) / 2)
    return min((x, y), (_wrap(-x), _wrap(-y)))


def canonical_base(kind: ModelKind, x: T2Point) -> T2Point:
    """Canonical representative: x itself, or the lexicographic minimum of {x, -x}."""
    return T2Point(*canonical_xy(kind is ModelKind.PILLOWCASE, x.x, x.y))


@dataclass(frozen=True, eq=False)
class CenterLeaf:
    kind: ModelKind
    base: T2Point

    singular: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "base", canonical_base(self.kind, self.base))
        object.__setattr__(self, "singular", self.kind is ModelKind.PILLOWCASE and _is_half_integer(self.base))

    @classmethod
    def from_canonical(cls, kind: ModelKind, x: float, y: float) -> CenterLeaf:
        """Build a leaf from coordinates already produced by :func:`canonical_xy`."""
        L = object.__new__(cls)
        object.__setattr__(L, "kind", kind)
        object.__setattr__(L, "base", T2Point(x, y))
        object.__setattr__(
            L, "singular", kind is ModelKind.PILLOWCASE and math.hypot(_coord_dist(2 * x), _coord_dist(2 * y)) < EQ_TOL
        )
        return L

    def __eq__(self, other) -> bool:
        if not isinstance(other, CenterLeaf):
            return NotImplemented
        return self.kind is other.kind and torus_distance(self.base, other.base) < EQ_TOL

    __hash__ = None

    def __repr__(self) -> str:
        return f"CenterLeaf({self.kind.value}, {self.base.x:.12f},{self.base.y:.12f})"


@dataclass(frozen=True)
class LeafLift:
    """A chosen representative of a leaf on the double cover."""

    rep: T2Point


@dataclass(frozen=True)
class LiftDecoration:
    sign: str = PLUS

    def __post_init__(self):
        if self.sign not in SIGNS:
            raise ValueError(f"decoration sign must be '+' or '-', got {self.sign!r}")


def leaf(m: ModelSystem, x: T2Point | tuple[float, float]) -> CenterLeaf:
    if not isinstance(x, T2Point):
        x = T2Point(*x)
    return CenterLeaf(m.kind, x)


def project(m: ModelSystem, lift: LeafLift) -> CenterLeaf:
    return CenterLeaf(m.kind, lift.rep)


def lift_for_sign(m: ModelSystem, L: CenterLeaf, sign: str) -> LeafLift:
    """'+' selects the canonical representative and '-' its negative.

    On singular leaves and in the trivial-holonomy model both signs give the
    same lift.
    """
    if sign not in SIGNS:
        raise ValueError(f"decoration sign must be '+' or '-', got {sign!r}")
    if sign == MINUS and m.pillowcase and not L.singular:
        return LeafLift(-L.base)
    return LeafLift(L.base)


def sign_of(m: ModelSystem, L: CenterLeaf, lift: LeafLift) -> str:
    if not m.pillowcase or L.singular:
        return PLUS
    return PLUS if torus_distance(lift.rep, L.base) <= torus_distance(lift.rep, -L.base) else MINUS


def quotient_map(m: ModelSystem, L: CenterLeaf, power: int = 1) -> CenterLeaf:
    """F^power on the leaf space."""
    return CenterLeaf(m.kind, apply(m.A, L.base, power))


def hausdorff_distance(m: ModelSystem, L1: CenterLeaf, L2: CenterLeaf) -> float:
    """Hausdorff distance between the two center circles for the flat product metric."""
    return base_distance(m, L1.base.x, L1.base.y, L2.base.x, L2.base.y)


def base_distance(m: ModelSystem, ax: float, ay: float, bx: float, by: float) -> float:
    """Hausdorff distance between the leaves over (ax, ay) and (bx, by), on raw coordinates."""
    d = _flat(ax, ay, bx, by)
    if m.pillowcase:
        d = min(d, _flat(ax, ay, -bx, -by))
    return d


def modified_hausdorff(m: ModelSystem, L1: CenterLeaf, L2: CenterLeaf) -> float:
    """Thresholded and capped distance computed on the holonomy cover.

    With the global double cover the minimum over lift pairs equals the
    Hausdorff distance itself, so the lower branch reduces to
    ``min(delta0/2, d_H)``.
    """
    K = m.K
    d = hausdorff_distance(m, L1, L2)
    if d >= K.delta1:
        return K.delta0 / 2
    lift_min = min(
        _flat(a.rep.x, a.rep.y, b.rep.x, b.rep.y) for a in lifts_of(m, L1) for b in lifts_of(m, L2)
    )
    return min(K.delta0 / 2, lift_min)


def modified_hausdorff_raw(m: ModelSystem, ax: float, ay: float, bx: float, by: float) -> float:
    """modified_hausdorff for the leaves over two raw base points, without building leaves.

    On the global double cover the minimum over lift pairs equals d_H, so the
    lower branch is min(delta0/2, d_H).
    """
    d = base_distance(m, ax, ay, bx, by)
    return m.K.delta0 / 2 if d >= m.K.delta1 else min(m.K.delta0 / 2, d)


def lifts_of(m: ModelSystem, L: CenterLeaf) -> list[LeafLift]:
    if not m.pillowcase or L.singular:
        return [LeafLift(L.base)]
    return [LeafLift(L.base), LeafLift(-L.base)]


def matched_lift(m: ModelSystem, reference: LeafLift, L2: CenterLeaf) -> tuple[LeafLift, LiftDecoration]:
    """The lift of ``L2`` closest to ``reference``, with the sign that selects it."""
    if hausdorff_distance(m, project(m, reference), L2) >= m.K.delta0:
        raise TooFar(f"{L2!r} is not within delta0={m.K.delta0} of the reference lift")
    best = min(lifts_of(m, L2), key=lambda lf: torus_distance(reference.rep, lf.rep))
    return best, LiftDecoration(sign_of(m, L2, best))


HALF_INTEGER_POINTS = (T2Point(0.0, 0.0), T2Point(0.5, 0.0), T2Point(0.0, 0.5), T2Point(0.5, 0.5))


def singular_leaves(m: ModelSystem) -> list[CenterLeaf]:
    if not m.pillowcase:
        raise WrongModel("the trivial-holonomy model has no singular leaves")
    return [CenterLeaf(m.kind, p) for p in HALF_INTEGER_POINTS]


def holonomy_order(m: ModelSystem, L: CenterLeaf) -> int:
    return 2 if L.singular else 1


def nearest_singular(m: ModelSystem, x: T2Point) -> tuple[CenterLeaf, float]:
    """Closest singular leaf to the leaf over x and its Hausdorff distance."""
    L = leaf(m, x)
    best = min(singular_leaves(m), key=lambda s: hausdorff_distance(m, s, L))
    return best, hausdorff_distance(m, best, L)


@dataclass(frozen=True)
class PointM:
    """A point of the 3-manifold, stored through a representative in T^2 x S^1."""

    base: T2Point
    t: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t) % 1.0)


def _circle_distance(s: float, t: float) -> float:
    d = abs(s - t) % 1.0
    return min(d, 1.0 - d)


def distance_M(m: ModelSystem, p: PointM, q: PointM) -> float:
    """Flat product distance in the 3-manifold (minimum over the involution for the pillowcase)."""
    d = math.hypot(torus_distance(p.base, q.base), _circle_distance(p.t, q.t))
    if m.pillowcase:
        d = min(d, math.hypot(torus_distance(p.base, -q.base), _circle_distance(p.t, q.t + 0.5)))
    return d


def map_M(m: ModelSystem, p: PointM, power: int = 1) -> PointM:
    return PointM(apply(m.A, p.base, power), p.t + power * m.theta)
