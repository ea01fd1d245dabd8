"""Flat two-torus arithmetic and the hyperbolic splitting of an integer Anosov matrix.

Points live in [0, 1)^2. Displacements are plain plane vectors. Images of
points under integer matrices are computed exactly on the binary expansion
of the float coordinates and rounded once, so an orbit never accumulates
more than one rounding per call to :func:`apply`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidConstants, NotHyperbolic, NotUnimodular

EQ_TOL = 1e-12


def _wrap(t: float) -> float:
    r = float(t) % 1.0
    # -1e-18 % 1.0 == 1.0 in IEEE arithmetic
    return 0.0 if r >= 1.0 else r


@dataclass(frozen=True)
class T2Vector:
    dx: float
    dy: float

    def __add__(self, other: T2Vector) -> T2Vector:
        return T2Vector(self.dx + other.dx, self.dy + other.dy)

    def __sub__(self, other: T2Vector) -> T2Vector:
        return T2Vector(self.dx - other.dx, self.dy - other.dy)

    def __neg__(self) -> T2Vector:
        return T2Vector(-self.dx, -self.dy)

    def __mul__(self, k: float) -> T2Vector:
        return T2Vector(k * self.dx, k * self.dy)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.hypot(self.dx, self.dy)

    def cross(self, other: T2Vector) -> float:
        return self.dx * other.dy - self.dy * other.dx

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy])


@dataclass(frozen=True)
class T2Point:
    """A point of R^2/Z^2; coordinates are reduced into [0, 1) on construction."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _wrap(self.x))
        object.__setattr__(self, "y", _wrap(self.y))

    def __add__(self, v: T2Vector) -> T2Point:
        return T2Point(self.x + v.dx, self.y + v.dy)

    def __neg__(self) -> T2Point:
        return T2Point(-self.x, -self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def _shortest_coord(t: float) -> float:
    d = t - round(t)
    # exact half: the lexicographic tie rule picks the negative translate
    return -0.5 if d == 0.5 else d


def shortest_displacement(p: T2Point, q: T2Point) -> T2Vector:
    """Return q - p of minimal Euclidean norm over the integer translates.

    The norm splits coordinate-wise, so the minimum over the nine translates is
    reached by reducing each coordinate into [-1/2, 1/2]. On an exact half the
    lexicographically smaller candidate (-1/2) wins.
    """
    return T2Vector(_shortest_coord(q.x - p.x), _shortest_coord(q.y - p.y))


def torus_distance(p: T2Point, q: T2Point) -> float:
    return shortest_displacement(p, q).norm()


@dataclass(frozen=True)
class AnosovMatrix:
    """Integer 2x2 matrix [[a, b], [c, d]] with determinant 1 and |trace| > 2."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise TypeError(f"matrix entry {name}={v!r} is not an integer")
            object.__setattr__(self, name, int(v))
        if self.det != 1:
            raise NotUnimodular(f"determinant {self.det} != 1")
        if abs(self.trace) <= 2:
            raise NotHyperbolic(f"|trace| = {abs(self.trace)} <= 2")

    @classmethod
    def from_rows(cls, rows) -> AnosovMatrix:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def power(self, n: int) -> tuple[int, int, int, int]:
        """Exact integer entries of A^n; negative n uses the integer inverse."""
        return _int_power(self.entries(), int(n))

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"


CAT_MAP = AnosovMatrix(2, 1, 1, 1)


def _mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


@lru_cache(maxsize=4096)
def _int_power(m: tuple[int, int, int, int], n: int) -> tuple[int, int, int, int]:
    if n < 0:
        a, b, c, d = m
        m, n = (d, -b, -c, a), -n
    result = (1, 0, 0, 1)
    base = m
    while n:
        if n & 1:
            result = _mul(result, base)
        base = _mul(base, base)
        n >>= 1
    return result


def apply_int_xy(m: tuple[int, int, int, int], x: float, y: float) -> tuple[float, float]:
    """Exact image of (x, y) under an integer matrix, reduced into [0, 1), rounded once."""
    nx, dx = x.as_integer_ratio()
    ny, dy = y.as_integer_ratio()
    den = max(dx, dy)  # both are powers of two
    X = nx * (den // dx)
    Y = ny * (den // dy)
    a, b, c, d = m
    return _wrap(((a * X + b * Y) % den) / den), _wrap(((c * X + d * Y) % den) / den)


def apply_int(m: tuple[int, int, int, int], p: T2Point) -> T2Point:
    """Exact image of p under an integer matrix, reduced mod 1, rounded once."""
    return T2Point(*apply_int_xy(m, p.x, p.y))


def apply(A: AnosovMatrix, p: T2Point, power: int = 1) -> T2Point:
    """A^power . p mod 1 using exact integer matrix powers."""
    return apply_int(A.power(power), p)


@dataclass(frozen=True)
class HyperbolicSplitting:
    """Eigendata of an Anosov matrix and the rate constants derived from it.

    ``lambda_u``/``lambda_s`` are eigenvalue moduli; ``sign`` is the common sign
    of both eigenvalues (the sign of the trace), so ``A e_u = sign*lambda_u*e_u``.
    """

    lambda_u: float
    lambda_s: float
    sign: int
    e_u: T2Vector
    e_s: T2Vector
    alpha: float
    beta: float
    lambda_norm: float
    C: float

    @property
    def eig_u(self) -> float:
        return self.sign * self.lambda_u

    @property
    def eig_s(self) -> float:
        return self.sign * self.lambda_s


def _orient(v: T2Vector) -> T2Vector:
    n = v.norm()
    v = T2Vector(v.dx / n, v.dy / n)
    if v.dx < 0 or (v.dx == 0 and v.dy < 0):
        v = -v
    return v


def eigen_split(A: AnosovMatrix) -> HyperbolicSplitting:
    if A.det != 1:
        raise NotUnimodular(f"determinant {A.det} != 1")
    tr = A.trace
    if abs(tr) <= 2:
        raise NotHyperbolic(f"|trace| = {abs(tr)} <= 2")
    sign = 1 if tr > 0 else -1
    eig_u = (tr + sign * math.sqrt(tr * tr - 4)) / 2
    eig_s = 1.0 / eig_u  # avoids the cancellation in (tr - sqrt(tr^2 - 4)) / 2
    # b != 0 for every hyperbolic unimodular integer matrix
    e_u = _orient(T2Vector(A.b, eig_u - A.a))
    e_s = _orient(T2Vector(A.b, eig_s - A.a))
    frob2 = A.a**2 + A.b**2 + A.c**2 + A.d**2
    lambda_norm = math.sqrt((frob2 + math.sqrt(frob2 * frob2 - 4)) / 2)
    C = 1.0 / abs(e_u.cross(e_s))
    lu, ls = abs(eig_u), abs(eig_s)
    return HyperbolicSplitting(
        lambda_u=lu,
        lambda_s=ls,
        sign=sign,
        e_u=e_u,
        e_s=e_s,
        alpha=ls,
        beta=lu,
        lambda_norm=max(lambda_norm, lu),
        C=C,
    )


def split_coords(v: T2Vector, S: HyperbolicSplitting) -> tuple[float, float]:
    """Coordinates (c_s, c_u) with v = c_s*e_s + c_u*e_u."""
    D = S.e_s.cross(S.e_u)
    c_s = v.cross(S.e_u) / D
    c_u = S.e_s.cross(v) / D
    return c_s, c_u


def from_split(c_s: float, c_u: float, S: HyperbolicSplitting) -> T2Vector:
    return S.e_s * c_s + S.e_u * c_u


def iterate_power(S: HyperbolicSplitting) -> int:
    """Smallest N >= 1 with 2*C*alpha**N < 1."""
    N = 1
    while 2 * S.C * S.alpha**N >= 1:
        N += 1
    return N


@dataclass(frozen=True)
class Constants:
    """Radii and the iterate power used by the shadowing construction.

    ``mu`` is the local-manifold radius, ``delta0`` the radius on which the
    double cover is an isometry, ``delta1`` the threshold of the modified
    Hausdorff distance and ``N`` the iterate power with ``2*C*alpha**N < 1``.
    """

    mu: float = 0.02
    delta0: float = 1 / 8
    delta1: float = 1 / 64
    N: int = 1

    @classmethod
    def for_splitting(
        cls,
        S: HyperbolicSplitting,
        mu: float = 0.02,
        delta0: float = 1 / 8,
        delta1: float = 1 / 64,
        N: int | None = None,
    ) -> Constants:
        K = cls(mu=mu, delta0=delta0, delta1=delta1, N=iterate_power(S) if N is None else int(N))
        K.validate(S)
        return K

    def validate(self, S: HyperbolicSplitting) -> None:
        if not (self.mu > 0 and self.delta0 > 0 and self.delta1 > 0):
            raise InvalidConstants("mu, delta0 and delta1 must be positive")
        if self.N < 1:
            raise InvalidConstants(f"N={self.N} must be >= 1")
        if not 2 * S.C * S.alpha**self.N < 1:
            raise InvalidConstants(f"2*C*alpha^N = {2 * S.C * S.alpha**self.N:.6g} is not < 1")
        if not self.delta1 < self.delta0 / 4:
            raise InvalidConstants(f"delta1={self.delta1} is not < delta0/4={self.delta0 / 4}")
        if not self.mu <= self.delta0:
            raise InvalidConstants(f"mu={self.mu} exceeds delta0={self.delta0}")


def epsilon_budget(S: HyperbolicSplitting, K: Constants, eta: float) -> float:
    """Strict upper bound on the pseudo-orbit jump for an eta-shadow."""
    aN = S.alpha**K.N
    return min((1 - aN) * eta / (2 * S.C), K.delta0)


def shadow_bound(S: HyperbolicSplitting, K: Constants, epsilon: float) -> float:
    return 2 * S.C * epsilon / (1 - S.alpha**K.N)
