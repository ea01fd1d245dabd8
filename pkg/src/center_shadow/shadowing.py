"""Pseudo-orbits of center leaves and their shadows.

The iterative engine :func:`shadow` follows the inductive construction at the
level of lifts: the current candidate leaf is pushed forward, projected onto
the center-stable set of the next lifted pseudo-orbit leaf along its
center-unstable set, and the unstable correction is pulled back to time zero.

:func:`shadow_oracle` solves the same linear problem in closed form and is used
to cross-check the engine. :func:`shadow_bi_infinite` and
:func:`shadow_periodic` handle two-sided windows and periodic pseudo-orbits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, DecorationMismatch, InvalidPseudoOrbit, NotPeriodic, TooFar
from .leaves import (
    MINUS,
    PLUS,
    SIGNS,
    CenterLeaf,
    canonical_xy,
    LeafLift,
    ModelSystem,
    hausdorff_distance,
    leaf,
    lift_for_sign,
    project,
    quotient_map,
    sign_of,
)
from .torus import (
    T2Point,
    _shortest_coord,
    _wrap,
    apply,
    apply_int_xy,
    epsilon_budget,
    shadow_bound,
)

log = logging.getLogger(__name__)

CONVERGENCE_CUTOFF = 1e-14
SERIES_CUTOFF = 1e-16


def _bases(leaves) -> np.ndarray:
    return np.array([W.base.as_tuple() for W in leaves]).reshape(-1, 2)


def step_gaps(m: ModelSystem, leaves) -> np.ndarray:
    """Modified Hausdorff distance between F(W_i) and W_{i+1} for every step."""
    B = _bases(leaves)
    A = np.array(m.A.power(1), dtype=float).reshape(2, 2)
    return _vector_leaf_distance(m, (B[:-1] @ A.T) % 1.0, B[1:])


@dataclass(frozen=True, eq=False)
class PseudoOrbit:
    model: ModelSystem
    leaves: tuple[CenterLeaf, ...]
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "leaves", tuple(self.leaves))
        if len(self.leaves) < 2:
            raise InvalidPseudoOrbit("a pseudo-orbit needs at least two leaves")
        worst = float(step_gaps(self.model, self.leaves).max())
        if worst > self.epsilon + 1e-12:
            raise InvalidPseudoOrbit(f"step gap {worst:.6g} exceeds epsilon {self.epsilon:.6g}")

    @classmethod
    def from_leaves(cls, model: ModelSystem, leaves, epsilon: float | None = None) -> PseudoOrbit:
        leaves = tuple(leaves)
        if epsilon is None:
            epsilon = float(step_gaps(model, leaves).max()) if len(leaves) > 1 else 0.0
        return cls(model, leaves, epsilon)

    def __len__(self) -> int:
        return len(self.leaves)


@dataclass(frozen=True, eq=False)
class DecoratedPseudoOrbit:
    """A pseudo-orbit together with the lift chosen for every leaf.

    ``decorations[i]`` selects the lift of ``leaves[i + 1]``; '+' is the
    canonical representative and '-' its negative.
    """

    base: PseudoOrbit
    decorations: tuple[str, ...]
    initial_lift: LeafLift

    def __post_init__(self):
        object.__setattr__(self, "decorations", tuple(self.decorations))
        if len(self.decorations) != len(self.base) - 1:
            raise InvalidPseudoOrbit(
                f"need {len(self.base) - 1} decorations, got {len(self.decorations)}"
            )
        if any(s not in SIGNS for s in self.decorations):
            raise InvalidPseudoOrbit("decorations must be '+' or '-'")
        m = self.base.model
        if project(m, self.initial_lift) != self.base.leaves[0]:
            raise InvalidPseudoOrbit("initial lift does not project to the first leaf")

    @property
    def model(self) -> ModelSystem:
        return self.base.model

    @property
    def signs(self) -> tuple[str, ...]:
        """One sign per leaf, the first one describing the initial lift."""
        m = self.model
        return (sign_of(m, self.base.leaves[0], self.initial_lift),) + self.decorations

    def __len__(self) -> int:
        return len(self.base)


def decorate(po: PseudoOrbit, initial_sign: str = PLUS) -> DecoratedPseudoOrbit:
    """Decorate greedily: each lift is the one closest to the image of the previous lift.

    Since A(-x) = -A(x), the image of the lift -x is the negative of the image
    of x, so each choice reduces to a relative sign computed on the canonical
    bases; only the running product of those signs is sequential.
    """
    m = po.model
    first = lift_for_sign(m, po.leaves[0], initial_sign)
    B = _bases(po.leaves)
    A = np.array(m.A.power(1), dtype=float).reshape(2, 2)
    img = (B[:-1] @ A.T) % 1.0

    def tor(v):
        v = v - np.round(v)
        return np.hypot(v[:, 0], v[:, 1])

    d_same = tor(B[1:] - img)
    d_flip = tor(B[1:] + img) if m.pillowcase else d_same
    d = np.minimum(d_same, d_flip)
    if len(d) and d.max() >= m.K.delta0:
        k = int(np.argmax(d >= m.K.delta0))
        raise TooFar(f"{po.leaves[k + 1]!r} is not within delta0={m.K.delta0} of the reference lift")
    if not m.pillowcase:
        return DecoratedPseudoOrbit(po, (PLUS,) * (len(po) - 1), first)
    relative = np.where(d_flip < d_same, -1, 1).tolist()
    singular = [W.singular for W in po.leaves]
    sign = -1 if initial_sign == MINUS and not po.leaves[0].singular else 1
    decorations = []
    for k, r in enumerate(relative):
        sign = 1 if singular[k + 1] else sign * r
        decorations.append(PLUS if sign > 0 else MINUS)
    return DecoratedPseudoOrbit(po, tuple(decorations), first)


def decorate_with(po: PseudoOrbit, signs) -> DecoratedPseudoOrbit:
    """Decorate with one explicit sign per leaf (the first one picks the initial lift)."""
    signs = tuple(signs)
    if len(signs) != len(po):
        raise InvalidPseudoOrbit(f"need {len(po)} signs, got {len(signs)}")
    return DecoratedPseudoOrbit(po, signs[1:], lift_for_sign(po.model, po.leaves[0], signs[0]))


def lifted_chain(dpo: DecoratedPseudoOrbit) -> list[T2Point]:
    m = dpo.model
    return [lift_for_sign(m, W, s).rep for W, s in zip(dpo.base.leaves, dpo.signs)]


def lifted_jumps(m: ModelSystem, chain, power: int = 1, stride: int = 1) -> np.ndarray:
    """Lengths of the jumps chain[k+stride] - A^power chain[k] on the double cover, checked against delta0."""
    pts = np.array([p.as_tuple() for p in chain]).reshape(-1, 2)
    M = np.array(m.A.power(power), dtype=float).reshape(2, 2)
    e = pts[stride::stride] - pts[:-stride:stride][: len(pts[stride::stride])] @ M.T
    e -= np.round(e)
    norms = np.hypot(e[:, 0], e[:, 1])
    if len(norms) and norms.max() >= m.K.delta0:
        k = int(np.argmax(norms >= m.K.delta0))
        raise DecorationMismatch(
            f"lift chosen at step {(k + 1) * stride} is {norms[k]:.4g} from the image lift (delta0={m.K.delta0})"
        )
    return norms


def decorated_epsilon(dpo: DecoratedPseudoOrbit) -> float:
    """Largest lift-level jump of the decorated chain."""
    return float(lifted_jumps(dpo.model, lifted_chain(dpo)).max(initial=0.0))


def _check_budget(m: ModelSystem, epsilon: float, eta: float) -> float:
    budget = epsilon_budget(m.S, m.K, eta)
    if epsilon > 0 and not epsilon < budget:
        raise BudgetExceeded(f"epsilon={epsilon:.6g} is not below the budget {budget:.6g} for eta={eta:.6g}")
    return budget


def make_pseudo_orbit(
    m: ModelSystem,
    seed: int,
    length: int,
    jump_scale: float,
    eta: float = 0.01,
    start: CenterLeaf | None = None,
) -> PseudoOrbit:
    """Reproducible random pseudo-orbit.

    Each leaf is the image of the previous one, moved by a uniform random
    displacement from the disk of radius ``jump_scale`` applied to a
    representative chosen by a fair coin.
    """
    _check_budget(m, jump_scale, eta)
    if length < 2:
        raise InvalidPseudoOrbit("length must be at least 2")
    rng = np.random.default_rng(seed)
    W = start if start is not None else leaf(m, T2Point(*rng.random(2)))
    # one row per step: lift coin, radius, angle (the order the draws were always made in)
    draws = rng.random((length - 1, 3)).tolist()
    G = m.A.power(1)
    pc = m.pillowcase
    x, y = W.base.x, W.base.y
    leaves = [W]
    for coin, u, v in draws:
        ix, iy = canonical_xy(pc, *apply_int_xy(G, x, y))
        if coin >= 0.5 and pc:
            ix, iy = _wrap(-ix), _wrap(-iy)
        r = jump_scale * math.sqrt(u)
        phi = 2 * math.pi * v
        x, y = canonical_xy(pc, ix + r * math.cos(phi), iy + r * math.sin(phi))
        leaves.append(CenterLeaf.from_canonical(m.kind, x, y))
    return PseudoOrbit.from_leaves(m, leaves)


@dataclass(frozen=True, eq=False)
class ShadowTrace:
    shadow: CenterLeaf
    shadow_lift: LeafLift
    per_step_distance: np.ndarray
    corrections: np.ndarray
    bound: float
    epsilon: float
    points: np.ndarray = field(repr=False)
    converged_at: int | None = None
    cap_hits: int = 0
    violations: tuple[str, ...] = ()

    @property
    def bound_holds(self) -> bool:
        return bool(np.all(self.per_step_distance <= self.bound + 1e-9))

    @property
    def ledger_ok(self) -> bool:
        return not self.violations


def _hausdorff_rows(m: ModelSystem, P: np.ndarray, B: np.ndarray) -> np.ndarray:
    """d_H between the leaves over the rows of P and the rows of B."""

    def tor(v):
        v = v - np.round(v)
        return np.hypot(v[:, 0], v[:, 1])

    d = tor(P - B)
    if m.pillowcase:
        d = np.minimum(d, tor(P + B))
    return d


def _vector_leaf_distance(m: ModelSystem, P: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = _hausdorff_rows(m, P, B)
    return np.where(d >= m.K.delta1, m.K.delta0 / 2, np.minimum(d, m.K.delta0 / 2))


def _distances_to_leaves(m: ModelSystem, points: np.ndarray, leaves) -> tuple[np.ndarray, int]:
    """Modified Hausdorff distance per row, and how many rows hit the threshold branch."""
    B = np.array([W.base.as_tuple() for W in leaves])
    raw = _hausdorff_rows(m, points, B)
    capped = np.where(raw >= m.K.delta1, m.K.delta0 / 2, np.minimum(raw, m.K.delta0 / 2))
    return capped, int(np.count_nonzero(raw >= m.K.delta1))


def shadow(m: ModelSystem, dpo: DecoratedPseudoOrbit, eta: float, full_ledger: bool = False) -> ShadowTrace:
    """Shadow a decorated pseudo-orbit by the inductive unstable-correction scheme.

    The step map is F^N for the iterate power N of the model. Items I and II of
    the induction are checked for every step: item I and the newest/oldest
    instances of item II always, every instance of item II when
    ``full_ledger`` is set. Violations are recorded in the trace.
    """
    S, K = m.S, m.K
    leaves = dpo.base.leaves
    chain = lifted_chain(dpo)
    n = len(chain)
    eps = max(dpo.base.epsilon, float(lifted_jumps(m, chain).max(initial=0.0)))
    _check_budget(m, eps, eta)

    N = K.N
    G = m.A.power(N)
    gu = S.eig_u**N
    aN = S.alpha**N
    times = list(range(0, n, N))
    J = len(times) - 1
    epsG = float(lifted_jumps(m, chain, power=N, stride=N).max(initial=0.0))
    epsG = max(epsG, dpo.base.epsilon)
    e_u = S.e_u
    eux, euy = e_u.dx, e_u.dy
    esx, esy = S.e_s.dx, S.e_s.dy
    D = S.e_s.cross(e_u)
    radius = K.mu / S.C
    x0, y0 = chain[0].x, chain[0].y
    base_arr = np.array([leaves[t].base.as_tuple() for t in times])
    full_bad: dict[int, list[str]] = {}

    # z_j = F^N(z_{j-1}) + c_u e_u with c_u the unstable split coordinate of the
    # lifted target relative to the image; only this recursion is sequential
    zx, zy = x0, y0
    img_arr = np.empty((J + 1, 2))
    z_arr = np.empty((J + 1, 2))
    img_arr[0] = z_arr[0] = (x0, y0)
    signed = [0.0] * (J + 1)
    t0s = np.zeros(J + 1)
    t0 = 0.0
    scale = 1.0
    converged_at = None
    tails = np.zeros(J + 1) if full_ledger else None
    for j in range(1, J + 1):
        ix, iy = apply_int_xy(G, zx, zy)
        target = chain[times[j]]
        vx, vy = _shortest_coord(target.x - ix), _shortest_coord(target.y - iy)
        dist = math.hypot(vx, vy)
        if dist >= radius:
            raise TooFar(f"points are {dist:.3g} apart, local product needs < {radius:.3g}")
        c_u = (esx * vy - esy * vx) / D
        zx, zy = _wrap(ix + eux * c_u), _wrap(iy + euy * c_u)
        scale /= gu
        pulled = c_u * scale
        if converged_at is None and abs(pulled) < CONVERGENCE_CUTOFF:
            converged_at = j
        t0 += pulled
        t0s[j] = t0
        signed[j] = c_u
        img_arr[j] = (ix, iy)
        z_arr[j] = (zx, zy)
        if full_ledger:
            idx = np.arange(j)
            tails[:j] += c_u * np.power(gu, (idx - j).astype(float))
            P = z_arr[: j + 1] + np.outer(tails[: j + 1], e_u.as_array())
            d = _vector_leaf_distance(m, P, base_arr[: j + 1])
            bnd = 2 * S.C * epsG * (1 - aN ** (j - np.arange(j + 1) + 1)) / (1 - aN)
            bad = np.nonzero(~(d < bnd + 1e-15))[0]
            if len(bad):
                full_bad[j] = [f"item II (j={jj}) at step {j}: {d[jj]:.6g} >= {bnd[jj]:.6g}" for jj in bad]

    # ledger: item I, and item II at the newest index and at time zero
    steps = np.arange(1, J + 1)
    d_I = _vector_leaf_distance(m, img_arr[1:], base_arr[1:])
    d_new = _vector_leaf_distance(m, z_arr[1:], base_arr[1:])
    start = np.array([x0, y0]) + np.outer(t0s[1:], e_u.as_array())
    d_old = _vector_leaf_distance(m, start, np.broadcast_to(base_arr[0], start.shape))
    b_old = 2 * S.C * epsG * (1 - aN ** (steps + 1)) / (1 - aN)
    bad_I = ~(d_I < 2 * epsG + 1e-15)
    bad_new = ~(d_new < 2 * S.C * epsG + 1e-15)
    bad_old = ~(d_old < b_old + 1e-15)
    violations = []
    for k in sorted(set(np.nonzero(bad_I | bad_new | bad_old)[0].tolist()) | {j - 1 for j in full_bad}):
        j = k + 1
        if bad_I[k]:
            violations.append(f"item I at step {j}: {d_I[k]:.6g} >= 2*eps={2 * epsG:.6g}")
        if bad_new[k]:
            violations.append(f"item II (j={j}) at step {j}: {d_new[k]:.6g}")
        if bad_old[k]:
            violations.append(f"item II (j=0) at step {j}: {d_old[k]:.6g} >= {b_old[k]:.6g}")
        violations.extend(full_bad.pop(j, []))

    # orbit of the final leaf, re-expanded from the F^N images
    tail = np.zeros(J + 1)
    for j in range(J - 1, -1, -1):
        tail[j] = (tail[j + 1] + signed[j + 1]) / gu
    points = np.empty((n, 2))
    for j, t in enumerate(times):
        P = T2Point(*z_arr[j]) + e_u * tail[j]
        for r in range(min(N, n - t)):
            Q = P if r == 0 else apply(m.A, P, r)
            points[t + r] = Q.as_tuple()

    shadow_lift = LeafLift(chain[0] + e_u * t0)
    dist, cap_hits = _distances_to_leaves(m, points, leaves)
    if cap_hits:
        log.warning("modified Hausdorff cap was reached at %d steps", cap_hits)
    corrections = np.zeros(n)
    corrections[times] = np.abs(signed)
    return ShadowTrace(
        shadow=project(m, shadow_lift),
        shadow_lift=shadow_lift,
        per_step_distance=dist,
        corrections=corrections,
        bound=shadow_bound(S, K, eps),
        epsilon=eps,
        points=points,
        converged_at=converged_at,
        cap_hits=cap_hits,
        violations=tuple(violations),
    )


def _jump_split(m: ModelSystem, chain) -> tuple[np.ndarray, np.ndarray]:
    """Stable and unstable coordinates of every lifted jump."""
    S = m.S
    pts = np.array([p.as_tuple() for p in chain])
    A = m.A.as_array()
    e = pts[1:] - pts[:-1] @ A.T
    e -= np.round(e)
    if len(e) and np.hypot(e[:, 0], e[:, 1]).max() >= m.K.delta0:
        k = int(np.argmax(np.hypot(e[:, 0], e[:, 1])))
        raise DecorationMismatch(f"lift chosen at step {k + 1} is not within delta0 of the image lift")
    es, eu = S.e_s.as_array(), S.e_u.as_array()
    D = es[0] * eu[1] - es[1] * eu[0]
    c_s = (e[:, 0] * eu[1] - e[:, 1] * eu[0]) / D
    c_u = (es[0] * e[:, 1] - es[1] * e[:, 0]) / D
    return c_s, c_u


def shadow_oracle(m: ModelSystem, dpo: DecoratedPseudoOrbit, eta: float | None = None) -> CenterLeaf:
    """Closed-form one-sided shadow: the time-zero lift plus a geometric series of unstable jumps."""
    chain = lifted_chain(dpo)
    _, c_u = _jump_split(m, chain)
    if eta is not None:
        _check_budget(m, max(dpo.base.epsilon, decorated_epsilon(dpo)), eta)
    k = np.arange(len(c_u))
    keep = m.S.lambda_u ** (-(k + 1.0)) > SERIES_CUTOFF
    weights = m.S.eig_u ** (-(k[keep] + 1.0))
    t = math.fsum(weights * c_u[keep])
    return leaf(m, chain[0] + m.S.e_u * t)


@dataclass(frozen=True, eq=False)
class TwoSidedShadow:
    """Shadow of a finite two-sided window; ``origin`` is the index of time zero."""

    shadow: CenterLeaf
    origin: int
    points: np.ndarray = field(repr=False)
    per_step_distance: np.ndarray = field(repr=False)
    stable_offsets: np.ndarray = field(repr=False)
    unstable_offsets: np.ndarray = field(repr=False)
    bound: float = 0.0
    epsilon: float = 0.0

    @property
    def bound_holds(self) -> bool:
        return bool(np.all(self.per_step_distance <= self.bound + 1e-9))


def shadow_bi_infinite(
    m: ModelSystem, dpo: DecoratedPseudoOrbit, eta: float, origin: int | None = None
) -> TwoSidedShadow:
    """Shadow a window indexed ``-origin .. len-1-origin``.

    The stable offsets are accumulated forward from zero at the left end and
    the unstable ones backward from zero at the right end, which gives the
    unique true orbit whose offsets vanish at the window boundaries.
    """
    S = m.S
    chain = lifted_chain(dpo)
    n = len(chain)
    origin = n // 2 if origin is None else int(origin)
    if not 0 <= origin < n:
        raise InvalidPseudoOrbit(f"origin {origin} outside the window of length {n}")
    c_s, c_u = _jump_split(m, chain)
    jumps = np.hypot(*(np.outer(c_s, S.e_s.as_array()) + np.outer(c_u, S.e_u.as_array())).T) if n > 1 else np.zeros(0)
    eps = max(dpo.base.epsilon, float(jumps.max(initial=0.0)))
    _check_budget(m, eps, eta)
    s = np.zeros(n)
    u = np.zeros(n)
    for i in range(n - 1):
        s[i + 1] = S.eig_s * s[i] - c_s[i]
    for i in range(n - 2, -1, -1):
        u[i] = (u[i + 1] + c_u[i]) / S.eig_u
    base = np.array([p.as_tuple() for p in chain])
    pts = base + np.outer(s, S.e_s.as_array()) + np.outer(u, S.e_u.as_array())
    pts %= 1.0
    dist, _ = _distances_to_leaves(m, pts, dpo.base.leaves)
    return TwoSidedShadow(
        shadow=leaf(m, T2Point(*pts[origin])),
        origin=origin,
        points=pts,
        per_step_distance=dist,
        stable_offsets=s,
        unstable_offsets=u,
        bound=shadow_bound(S, m.K, eps),
        epsilon=eps,
    )


def orbit_period_mod(A_entries: tuple[int, int, int, int], num: tuple[int, int], q: int, symmetric: bool,
                     max_period: int = 1_000_000) -> int:
    """Least p >= 1 with A^p (num/q) == num/q mod 1, or == -(num/q) when ``symmetric``."""
    a, b, c, d = A_entries
    x0, y0 = num[0] % q, num[1] % q
    neg = ((-x0) % q, (-y0) % q)
    x, y = x0, y0
    for p in range(1, max_period + 1):
        x, y = (a * x + b * y) % q, (c * x + d * y) % q
        if (x, y) == (x0, y0) or (symmetric and (x, y) == neg):
            return p
    raise NotPeriodic(f"no return within {max_period} iterates")


def leaf_period(m: ModelSystem, L: CenterLeaf, max_den: int = 1 << 20) -> int:
    """Period of a rational leaf, computed with integer arithmetic."""
    fx, fy = Fraction(L.base.x).limit_denominator(max_den), Fraction(L.base.y).limit_denominator(max_den)
    if abs(float(fx) - L.base.x) > 1e-12 or abs(float(fy) - L.base.y) > 1e-12:
        raise NotPeriodic(f"{L!r} is not rational with denominator <= {max_den}")
    q = math.lcm(fx.denominator, fy.denominator)
    return orbit_period_mod(m.A.entries(), (fx.numerator * (q // fx.denominator), fy.numerator * (q // fy.denominator)),
                            q, m.pillowcase)


def periodic_certificate(m: ModelSystem, L: CenterLeaf, period: int, max_den: int = 1 << 20) -> tuple[Fraction, Fraction] | None:
    """Rational base point of L if F^period fixes L exactly in rational arithmetic, else None."""
    fx, fy = Fraction(L.base.x).limit_denominator(max_den), Fraction(L.base.y).limit_denominator(max_den)
    if abs(float(fx) - L.base.x) > 1e-12 or abs(float(fy) - L.base.y) > 1e-12:
        return None
    a, b, c, d = m.A.power(period)
    ix, iy = (a * fx + b * fy) % 1, (c * fx + d * fy) % 1
    if (ix, iy) == (fx % 1, fy % 1):
        return fx, fy
    if m.pillowcase and (ix, iy) == ((-fx) % 1, (-fy) % 1):
        return fx, fy
    return None


def shadow_periodic(m: ModelSystem, dpo: DecoratedPseudoOrbit, period: int, tol: float = 1e-10) -> CenterLeaf:
    """Periodic leaf shadowing a periodic decorated pseudo-orbit.

    The lifted offsets over one period satisfy an affine fixed-point problem
    that contracts in both split coordinates, solved by iteration. The result
    is verified exactly when it is rational and to ``tol`` otherwise.
    """
    leaves = dpo.base.leaves
    signs = dpo.signs
    if period < 1 or period >= len(leaves):
        raise NotPeriodic(f"need more than {period} leaves to check period {period}")
    for i in range(len(leaves) - period):
        if leaves[i + period] != leaves[i] or signs[i + period] != signs[i]:
            raise NotPeriodic(f"pseudo-orbit is not {period}-periodic at index {i}")
    S = m.S
    chain = lifted_chain(dpo)[: period + 1]
    c_s, c_u = _jump_split(m, chain)
    gs, gu = S.eig_s**period, S.eig_u**period
    k = np.arange(period)
    B_s = math.fsum(S.eig_s ** (period - 1.0 - k) * c_s)
    B_u = math.fsum(S.eig_u ** (period - 1.0 - k) * c_u)
    s = u = 0.0
    for _ in range(2000):
        s_new, u_new = gs * s - B_s, (u + B_u) / gu
        if s_new == s and u_new == u:
            break
        s, u = s_new, u_new
    residual = max(abs(s - (gs * s - B_s)), abs(u - (u + B_u) / gu))
    L = leaf(m, chain[0] + S.e_s * s + S.e_u * u)
    if periodic_certificate(m, L, period) is not None:
        return L
    img = quotient_map(m, L, period)
    if residual <= tol and hausdorff_distance(m, img, L) <= max(tol, 1e-12 * S.lambda_u**period):
        return L
    raise NotPeriodic(f"fixed-point residual {residual:.3g} exceeds tol={tol}")
