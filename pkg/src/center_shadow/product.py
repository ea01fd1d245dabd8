"""Local product structure and the stable/unstable projection distances between lifts.

For ``f = A x R_theta`` the strong stable and unstable leaves are straight
lines along ``e_s`` and ``e_u`` in each horizontal torus, so the local product
of two nearby points is obtained by a change of basis. The supremum over the
center circle that defines the projection distances is attained identically at
every point of the circle, hence it collapses to the value at the base points.

Projection distances take :class:`LeafLift` arguments on purpose: the value
depends on which lifts are compared, not only on the leaves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TooFar
from .leaves import LeafLift, ModelSystem
from .torus import T2Point, apply, shortest_displacement, split_coords


@dataclass(frozen=True)
class ProjectionResult:
    """``point`` is W^u_loc(p) intersected with W^s_loc(q)."""

    point: T2Point
    u_component: float
    s_component: float


def signed_product_coords(m: ModelSystem, p: T2Point, q: T2Point, radius: float) -> tuple[float, float]:
    v = shortest_displacement(p, q)
    if v.norm() >= radius:
        raise TooFar(f"points are {v.norm():.3g} apart, local product needs < {radius:.3g}")
    return split_coords(v, m.S)


def local_product(m: ModelSystem, p: T2Point, q: T2Point) -> ProjectionResult:
    c_s, c_u = signed_product_coords(m, p, q, m.K.mu / m.S.C)
    return ProjectionResult(point=p + m.S.e_u * c_u, u_component=abs(c_u), s_component=abs(c_s))


def unstable_projection_distance(m: ModelSystem, l1: LeafLift, l2: LeafLift) -> float:
    """Unstable displacement needed to move l2 onto the center-stable set of l1."""
    _, c_u = signed_product_coords(m, l1.rep, l2.rep, m.K.mu)
    return abs(c_u)


def stable_projection_distance(m: ModelSystem, l2: LeafLift, l1: LeafLift) -> float:
    c_s, _ = signed_product_coords(m, l1.rep, l2.rep, m.K.mu)
    return abs(c_s)


def lift_image(m: ModelSystem, lift: LeafLift, power: int = 1) -> LeafLift:
    """Image of a lift under the lifted dynamics A x R_theta (base part only)."""
    return LeafLift(apply(m.A, lift.rep, power))


def in_local_center_stable(m: ModelSystem, l1: LeafLift, l2: LeafLift, tol: float = 1e-12) -> bool:
    """True when l2 lies in the local center-stable set of l1 (zero unstable projection)."""
    return unstable_projection_distance(m, l1, l2) <= tol


def in_local_center_unstable(m: ModelSystem, l1: LeafLift, l2: LeafLift, tol: float = 1e-12) -> bool:
    return stable_projection_distance(m, l2, l1) <= tol
