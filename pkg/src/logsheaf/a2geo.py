"""Geometry of the A2 deformations: the combinatorial splitting criterion,
line catalogs, the tangency conic and candidate scans."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from .arrangement import Arrangement, line_meet_count, multiple_points
from .core.geometry import cross, normalize_form
from .rootsys import deformation
from .split import Line, SplittingType, is_unstable, normal_twist

INAPPLICABLE = "criterion inapplicable"


def _ceil_half(n: int) -> int:
    return -(-n // 2)


def counting_splitting(n: int, count: int, in_arrangement: bool,
                            twist: Optional[int] = None) -> Union[SplittingType, str]:
    """Splitting forced by the number of intersection points on a line.

    Returns degrees (d1, d2) with T_A|_L = O(-d1) + O(-d2), or, when ``twist``
    is given, the splitting of T_A(twist)|_L.  Never guesses outside the two
    hypotheses.
    """
    if in_arrangement:
        h = count
        if n - h <= _ceil_half(n - 1):
            d = (n - h, h - 1)
        else:
            return INAPPLICABLE
    else:
        ell = count
        if n - ell >= _ceil_half(n):
            d = (n - ell, ell - 1)
        else:
            return INAPPLICABLE
    if twist is None:
        return SplittingType(min(d), max(d))
    a, b = twist - d[0], twist - d[1]
    return SplittingType(min(a, b), max(a, b))


def counting_splitting_for_line(A: Arrangement, L: Line) -> Union[SplittingType, str]:
    inside = L.form in A.forms
    return counting_splitting(A.n, line_meet_count(A, L.form), inside, normal_twist(A))


@dataclass(frozen=True)
class LineCatalogEntry:
    line: Line
    in_arrangement: bool
    predicted_splitting: SplittingType
    predicted_order: int
    label: str = ""

    def to_json(self):
        return {"line": self.line.to_string(), "label": self.label, "in_arrangement": self.in_arrangement,
                "predicted": [self.predicted_splitting.a1, self.predicted_splitting.a2],
                "order": self.predicted_order}


def line_x(s: int) -> Line:
    return Line((-s, 1, 0))


def line_y(s: int) -> Line:
    return Line((-s, 0, 1))


def line_sum(s: int) -> Line:
    """x + y = s z."""
    return Line((-s, 1, 1))


def chain_line(k: int, i: int) -> Line:
    """x + y = (k - i + 1) z, the line added at step i of the inner chain."""
    return line_sum(k - i + 1)


def unstable_catalog(k: int, j: int) -> List[LineCatalogEntry]:
    if k < 3:
        raise ValueError("the six-line catalog is stated for k >= 3")
    pred = SplittingType(0, k - 1)
    order = (k - 1) // 2
    entries = [
        (line_x(k + j), True, f"x={k + j}z"),
        (line_y(k + j), True, f"y={k + j}z"),
        (line_sum(-j), True, f"x+y={-j}z"),
        (line_x(-(j + 1)), False, f"x={-(j + 1)}z"),
        (line_y(-(j + 1)), False, f"y={-(j + 1)}z"),
        (line_sum(k + j + 1), False, f"x+y={k + j + 1}z"),
    ]
    return [LineCatalogEntry(L, inside, pred, order, lab) for L, inside, lab in entries]


def jump_catalog(k: int, j: int) -> List[LineCatalogEntry]:
    if k < 1:
        raise ValueError("k must be at least 1")
    out = []
    generic_low = (k - 1) // 2
    for s in range(0, (k - 1) // 2 + 1):
        pred = SplittingType(s, k - 1 - s)
        lines = [
            (line_x(k + j - s), True, f"x={k + j - s}z"),
            (line_y(k + j - s), True, f"y={k + j - s}z"),
            (chain_line(k, k + j + 1 - s), True, f"x+y={s - j}z"),
            (line_x(-(j + s + 1)), False, f"x={-(j + s + 1)}z"),
            (line_y(-(j + s + 1)), False, f"y={-(j + s + 1)}z"),
            (chain_line(k, -(j + s)), False, f"x+y={k + j + s + 1}z"),
        ]
        for L, inside, lab in lines:
            out.append(LineCatalogEntry(L, inside, pred, generic_low - s, lab))
    return out


class DualConic:
    """The conic C_j; a line l is tangent iff l^T adj(Q) l = 0."""

    def __init__(self, j: int):
        self.j = j
        qzz = Fraction(3 * j * j + 12 * j)
        # point coordinates (z, x, y); off-diagonal entries are half the cross terms
        self.Q = [[qzz, Fraction(6), Fraction(6)],
                  [Fraction(6), Fraction(-4), Fraction(-2)],
                  [Fraction(6), Fraction(-2), Fraction(-4)]]
        self.adj = _adjugate(self.Q)
        if self.det() == 0:
            raise ValueError("conic is singular")

    def det(self) -> Fraction:
        Q = self.Q
        return (Q[0][0] * (Q[1][1] * Q[2][2] - Q[1][2] * Q[2][1])
                - Q[0][1] * (Q[1][0] * Q[2][2] - Q[1][2] * Q[2][0])
                + Q[0][2] * (Q[1][0] * Q[2][1] - Q[1][1] * Q[2][0]))

    def tangency_value(self, L: Line) -> Fraction:
        l = L.form
        return sum(l[a] * self.adj[a][b] * l[b] for a in range(3) for b in range(3))

    def is_tangent(self, L: Line) -> bool:
        return self.tangency_value(L) == 0

    def equation(self) -> str:
        j = self.j
        return f"{3 * j * j + 12 * j}*z^2-4*x^2-4*x*y-4*y^2+12*x*z+12*y*z"


def _adjugate(Q):
    def minor(r, c):
        rows = [i for i in range(3) if i != r]
        cols = [i for i in range(3) if i != c]
        return Q[rows[0]][cols[0]] * Q[rows[1]][cols[1]] - Q[rows[0]][cols[1]] * Q[rows[1]][cols[0]]
    return [[(-1) ** (r + c) * minor(c, r) for c in range(3)] for r in range(3)]


def conic_tangency(j: int, L: Line) -> bool:
    return DualConic(j).is_tangent(L)


# scans ------------------------------------------------------------------------

def random_line(rng: random.Random, height: int = 40) -> Line:
    while True:
        v = [rng.randint(-height, height) for _ in range(3)]
        if any(v):
            return Line(v)


def candidate_lines(A: Arrangement, bound: int, random_count: int, seed: int,
                    min_multiplicity: int = 2) -> List[Line]:
    """The documented scan family: lattice lines, z = 0, lines through pairs of
    multiple points, and seeded random lines."""
    if A.params is None:
        raise ValueError("scan family needs deformation parameters")
    _, _, j, k = A.params
    top = k + j + bound
    seen = {}

    def put(form):
        f = normalize_form(form)
        if f not in seen:
            seen[f] = Line(f)

    for s in range(-top, top + 1):
        put((-s, 1, 0))
        put((-s, 0, 1))
        put((-s, 1, 1))
    put((1, 0, 0))
    pts = [p for p, ls in multiple_points(A).items() if len(ls) >= min_multiplicity]
    pts.sort()
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            put(cross(pts[a], pts[b]))
    rng = random.Random(seed)
    for _ in range(random_count):
        L = random_line(rng)
        seen.setdefault(L.form, L)
    return list(seen.values())


def scan_unstable(A: Arrangement, bound: int = 3, random_count: int = 200, seed: int = 0) -> List[Line]:
    """Unstable lines among the scan family, sorted.  A scan, not a proof."""
    if A.params is None or A.params[3] < 2:
        raise ValueError("scan_unstable needs k >= 2")
    hits = [L for L in candidate_lines(A, bound, random_count, seed) if is_unstable(A, L)]
    return sorted(hits)
