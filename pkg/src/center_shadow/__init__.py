"""Shadowing of center-leaf pseudo-orbits for linear skew products over Anosov automorphisms."""

from __future__ import annotations

from .errors import CenterShadowError
from .leaves import CenterLeaf, LeafLift, ModelKind, ModelSystem, leaf
from .shadowing import (
    DecoratedPseudoOrbit,
    PseudoOrbit,
    ShadowTrace,
    decorate,
    make_pseudo_orbit,
    shadow,
    shadow_bi_infinite,
    shadow_oracle,
    shadow_periodic,
)
from .torus import CAT_MAP, AnosovMatrix, T2Point, T2Vector, eigen_split

__all__ = [
    "CAT_MAP",
    "AnosovMatrix",
    "CenterLeaf",
    "CenterShadowError",
    "DecoratedPseudoOrbit",
    "LeafLift",
    "ModelKind",
    "ModelSystem",
    "PseudoOrbit",
    "ShadowTrace",
    "T2Point",
    "T2Vector",
    "decorate",
    "eigen_split",
    "leaf",
    "make_pseudo_orbit",
    "shadow",
    "shadow_bi_infinite",
    "shadow_oracle",
    "shadow_periodic",
]

__version__ = "0.1.0"
