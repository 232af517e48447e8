"""Type A root data and the coned deformation arrangements built from it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .core.geometry import Form

COORD_NAMES = ("z", "x", "y", "w")


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class DeformationParams:
    j: int
    k: int

    def __post_init__(self):
        if self.j < 0 or self.k < 0:
            raise ParameterError("j and k must be non-negative")

    @property
    def shifts(self) -> range:
        return range(-self.j, self.k + self.j + 1)

    @property
    def width(self) -> int:
        """Number of shifts per root, k + 2j + 1."""
        return self.k + 2 * self.j + 1

    @property
    def normal_twist(self) -> int:
        """Twist making c1 of the A2 logarithmic bundle equal to k - 1."""
        return 2 * self.k + 3 * self.j + 1


@dataclass(frozen=True)
class RootSystem:
    family: str
    m: int
    positive_roots: Tuple[Tuple[int, ...], ...]
    coxeter_number: int


def positive_roots(family: str, m: int) -> List[Tuple[int, ...]]:
    """Roots x_a + ... + x_b for 1 <= a <= b <= m, in simple coordinates.

    Ordered by length, then by starting index: for m = 2 this is x, y, x+y.
    """
    if family != "A":
        raise ParameterError(f"only family A is supported, got {family!r}")
    if m < 1:
        raise ParameterError("rank must be at least 1")
    roots = []
    for length in range(1, m + 1):
        for a in range(0, m - length + 1):
            roots.append(tuple(1 if a <= i < a + length else 0 for i in range(m)))
    return roots


def coxeter_number(family: str, m: int) -> int:
    if family != "A":
        raise ParameterError(f"only family A is supported, got {family!r}")
    if m < 1:
        raise ParameterError("rank must be at least 1")
    return m + 1


def root_system(family: str, m: int) -> RootSystem:
    return RootSystem(family, m, tuple(positive_roots(family, m)), coxeter_number(family, m))


def root_name(root: Tuple[int, ...]) -> str:
    return "+".join(COORD_NAMES[i + 1] for i, c in enumerate(root) if c)


def shifted_form(root: Tuple[int, ...], s: int) -> Form:
    """Coefficients (z, x, ...) of root - s z."""
    return (-s,) + tuple(root)


def build_deformation(phi: RootSystem, p: DeformationParams):
    """{z = 0} together with root = s z for every positive root and s in [-j, k+j]."""
    from .arrangement import Arrangement
    m = phi.m
    if m + 1 > 4:
        raise ParameterError("ambient dimension above 4 is not supported")
    forms = [(1,) + (0,) * m]
    labels = ["infinity"]
    for root in phi.positive_roots:
        for s in p.shifts:
            forms.append(shifted_form(root, s))
            labels.append(f"{root_name(root)}={s}z")
    return Arrangement(m + 1, forms, labels, params=("A", m, p.j, p.k))


def deformation(m: int, j: int, k: int):
    return build_deformation(root_system("A", m), DeformationParams(j, k))
