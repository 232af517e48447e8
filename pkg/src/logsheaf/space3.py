"""Unstable planes of rank-3 sheaves on P^3 and the comparison of T_A with its
twisted dual.

For a presentation 0 -> F1 -> F0 -> E -> 0 and a plane H, the restriction stays
exact, so h2(E|_H(t)) is the cokernel dimension of H2(F1|_H(t)) -> H2(F0|_H(t)),
computed on the Cech basis of negative monomials. A plane is unstable for E
when h2(E|_H(-3)) != 0 with E normalized so its generators sit in degree 0.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import flint
import numpy as np

from .arrangement import Arrangement, _solve_nullspace, intersection_lattice
from .core.geometry import normalize_form
from .core.gmatrix import GradedMatrix
from .core.linalg import rank_multimodular
from .logmod import dual_resolution, minimal_resolution
from .rootsys import root_system
from .split import Line

FAST_PRIME = 2147483647


class PlaneError(RuntimeError):
    pass


class Plane(Line):
    """A plane of P^3 in dual coordinates, with an integral parameterization by three points."""

    def __init__(self, coeffs: Sequence, basis=None):
        if len(coeffs) != 4:
            raise ValueError("a plane of P^3 needs four coordinates")
        super().__init__(coeffs, basis)

    def __repr__(self):
        return f"Plane({self.to_string()})"


def plane(*coeffs) -> Plane:
    return Plane(coeffs)


# Cech cohomology on P^2 ------------------------------------------------------

def h2_line_bundle(a: int) -> int:
    n = -a - 1
    return n * (n - 1) // 2 if n >= 2 else 0


def _h2_basis(a: int) -> Dict[Tuple[int, int, int], int]:
    """Index of s^-p t^-q u^-r with p, q, r >= 1 and p + q + r = -a."""
    n = -a
    out = {}
    for p in range(1, n - 1):
        for q in range(1, n - p):
            out[(p, q, n - p - q)] = len(out)
    return out


def h2_map_matrix(M: GradedMatrix, t: int) -> List[List[int]]:
    """Matrix of H2(F1(t)) -> H2(F0(t)) for a presentation over three variables.

    Rows of M are the F0 summands O(-e_i), columns the F1 summands O(-f_l).
    """
    targets = [_h2_basis(t - e) for e in M.row_twists]
    offsets = list(itertools.accumulate([0] + [len(b) for b in targets]))
    nrows = offsets[-1]
    cols = []
    for c, f in enumerate(M.col_twists):
        for (p, q, r) in _h2_basis(t - f):
            col = [0] * nrows
            for i in range(len(M.row_twists)):
                g = M.entries[i][c]
                for (ga, gb, gc), coef in g.coeffs.items():
                    key = (p - ga, q - gb, r - gc)
                    if min(key) >= 1:
                        col[offsets[i] + targets[i][key]] += coef
            cols.append(col)
    return [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]


def h2_from_presentation(M: GradedMatrix, t: int) -> int:
    """h2 of coker(M)(t) on P^2."""
    h2_f0 = sum(h2_line_bundle(t - e) for e in M.row_twists)
    if h2_f0 == 0:
        return 0
    mat = h2_map_matrix(M, t)
    rank = rank_multimodular(mat) if mat and mat[0] else 0
    return h2_f0 - rank


def _check_linear(M: GradedMatrix):
    rows, cols = M.shape
    if cols == 0:
        return
    for i in range(rows):
        for l in range(cols):
            if M.entries[i][l].coeffs and M.entry_degree(i, l) != 1:
                raise PlaneError("resolution not linear")


def presentation_h2(M: GradedMatrix, H: Plane, twist: int) -> int:
    """h2(E|_H(twist - 3)) for E = coker(M)(twist), by the Cech map."""
    return h2_from_presentation(M.substitute(H.images()), twist - 3)


# fast path for linear presentations ------------------------------------------

@dataclass
class LinearPencil:
    """Coefficient matrices (F1 summands x F0 summands), one per ambient variable."""
    mats: List[np.ndarray]
    num_generators: int

    @classmethod
    def from_presentation(cls, M: GradedMatrix) -> "LinearPencil":
        _check_linear(M)
        rows, cols = M.shape
        mats = [np.zeros((cols, rows), dtype=np.int64) for _ in range(M.num_vars)]
        for i in range(rows):
            for l in range(cols):
                for e, c in M.entries[i][l].coeffs.items():
                    if c.denominator != 1:
                        raise PlaneError("non-integral presentation")
                    mats[e.index(1)][l, i] = int(c)
        return cls(mats, rows)

    def h2(self, H: Plane) -> int:
        """h2(E|_H(-3)) for E = coker generated in degree 0.

        The Cech map sends the F1 summand class s^-2 t^-1 u^-1 to the first
        restricted coefficient matrix, and so on, so its image is the row span
        of the three stacked restricted matrices.
        """
        blocks = [sum(self.mats[v] * int(p[v]) for v in range(len(self.mats))) for p in H.basis]
        stacked = np.concatenate(blocks, axis=0)
        r, c = stacked.shape
        vals = [int(v) for v in stacked.ravel().tolist()]
        if flint.nmod_mat(r, c, [v % FAST_PRIME for v in vals], FAST_PRIME).rank() == c:
            return 0
        return c - flint.fmpz_mat(r, c, vals).rank()


class PlaneTester:
    """Unstable-plane test for E = coker(M)(twist), with the twist putting generators in degree 0."""

    def __init__(self, M: GradedMatrix, twist: Optional[int] = None):
        _check_linear(M)
        if M.num_vars != 4:
            raise PlaneError("plane tests need a sheaf on P^3")
        degs = set(M.row_twists)
        if twist is None:
            if len(degs) != 1:
                raise PlaneError("generators in several degrees; give the twist")
            twist = degs.pop()
        self.presentation = M
        self.twist = twist
        self.pencil = None
        if set(M.row_twists) == {twist} and M.shape[1] > 0:
            self.pencil = LinearPencil.from_presentation(M)

    def h2(self, H: Plane) -> int:
        if self.pencil is not None:
            return self.pencil.h2(H)
        return presentation_h2(self.presentation, H, self.twist)

    def h2_cech(self, H: Plane) -> int:
        return presentation_h2(self.presentation, H, self.twist)

    def is_unstable(self, H: Plane) -> bool:
        return self.h2(H) > 0


def _primal_tester(A: Arrangement) -> PlaneTester:
    if A.ambient_dim != 4:
        raise PlaneError("plane tests need an arrangement in P^3")
    res = minimal_resolution(A)
    if res.pdim != 1:
        raise PlaneError("resolution not of length one")
    return PlaneTester(res.presentation())


def dual_shift(A: Arrangement) -> int:
    """-eta(k + 2j + 1) for deformations, where the dual is expected to match T_A."""
    if A.params is None:
        raise PlaneError("dual shift needs deformation parameters")
    _, m, j, k = A.params
    return -(m + 1) * (k + 2 * j + 1)


def _dual_tester(A: Arrangement, shift: Optional[int] = None) -> PlaneTester:
    shift = dual_shift(A) if shift is None else shift
    return PlaneTester(dual_resolution(A, shift).presentation())


def unstable_plane_test(A: Arrangement, H: Plane) -> bool:
    """h2(E|_H(-3)) != 0 for E = T_A twisted so that its generators sit in degree 0."""
    return _primal_tester(A).is_unstable(H)


# scan family -------------------------------------------------------------------

def lattice_planes(A: Arrangement, bound: int) -> List[Plane]:
    """alpha = s z for positive roots and coordinate forms alpha, |s| <= bound."""
    nv = A.ambient_dim
    forms: List[Tuple[int, ...]] = []
    if A.params is not None:
        rs = root_system(A.params[0], A.params[1])
        forms.extend(tuple(r) for r in rs.positive_roots)
    for i in range(nv - 1):
        e = [0] * (nv - 1)
        e[i] = 1
        forms.append(tuple(e))
    out = {Plane([1] + [0] * (nv - 1))}
    for root in forms:
        for s in range(-bound, bound + 1):
            out.add(Plane([-s] + list(root)))
    return sorted(out)


def arrangement_points(A: Arrangement) -> List[Tuple[int, ...]]:
    """Points of P^3 where at least three planes of A meet."""
    flats = intersection_lattice(A)
    pts = set()
    for S, r in flats.items():
        if r == A.ambient_dim - 1:
            v = _solve_nullspace([A.forms[i] for i in sorted(S)], A.ambient_dim)
            pts.add(normalize_form(v[0]))
    return sorted(pts)


def plane_through(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Generalized cross product: signed 3x3 minors; None for collinear points."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    c0, c1, c2, c3 = c
    m01 = b0 * c1 - b1 * c0
    m02 = b0 * c2 - b2 * c0
    m03 = b0 * c3 - b3 * c0
    m12 = b1 * c2 - b2 * c1
    m13 = b1 * c3 - b3 * c1
    m23 = b2 * c3 - b3 * c2
    v = (a1 * m23 - a2 * m13 + a3 * m12,
         -(a0 * m23 - a2 * m03 + a3 * m02),
         a0 * m13 - a1 * m03 + a3 * m01,
         -(a0 * m12 - a1 * m02 + a2 * m01))
    if not any(v):
        return None
    return normalize_form(v)


def planes_through_points(points: Sequence[Sequence[int]]) -> List[Plane]:
    out: Set[Tuple[int, ...]] = set()
    for a, b, c in itertools.combinations(points, 3):
        f = plane_through(a, b, c)
        if f is not None:
            out.add(f)
    return [Plane(f) for f in sorted(out)]


def random_planes(count: int, seed: int, size: int = 50) -> List[Plane]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        c = [rng.randint(-size, size) for _ in range(4)]
        if any(c):
            out.append(Plane(c))
    return out


def scan_family(A: Arrangement, bound: int = 3, random_count: int = 50, seed: int = 0) -> List[Plane]:
    fam = set(lattice_planes(A, bound))
    fam.update(planes_through_points(arrangement_points(A)))
    fam.update(random_planes(random_count, seed))
    return sorted(fam)


@dataclass
class PlaneScan:
    primal: List[Plane]
    dual: Optional[List[Plane]]
    scanned: int

    @property
    def common(self) -> Optional[int]:
        if self.dual is None:
            return None
        return len(set(self.primal) & set(self.dual))

    def to_json(self) -> dict:
        out = {"E": [p.to_string() for p in self.primal], "scanned": self.scanned}
        if self.dual is not None:
            out["Edual"] = [p.to_string() for p in self.dual]
            out["common"] = self.common
        return out


def scan_unstable_planes(A: Arrangement, dual_also: bool = True, bound: int = 3, seed: int = 0,
                         random_count: int = 50, shift: Optional[int] = None) -> PlaneScan:
    fam = scan_family(A, bound, random_count, seed)
    primal = _primal_tester(A)
    found = [H for H in fam if primal.is_unstable(H)]
    dual_found = None
    if dual_also:
        dual = _dual_tester(A, shift)
        dual_found = [H for H in fam if dual.is_unstable(H)]
    return PlaneScan(found, dual_found, len(fam))


def dual_betti_equal(A: Arrangement, shift: Optional[int] = None) -> bool:
    shift = dual_shift(A) if shift is None else shift
    return minimal_resolution(A).betti == dual_resolution(A, shift).betti


# plane-intrinsic description -------------------------------------------------------

def pair_matrix(pencil: LinearPencil, h: Sequence[int]) -> np.ndarray:
    """Stack of h_u B_v - h_v B_u over pairs u < v; H = {h = 0} is unstable iff it drops rank."""
    n = len(pencil.mats)
    blocks = [int(h[u]) * pencil.mats[v] - int(h[v]) * pencil.mats[u]
              for u in range(n) for v in range(u + 1, n)]
    return np.concatenate(blocks, axis=0)


def pair_matrix_h2(pencil: LinearPencil, h: Sequence[int]) -> int:
    N = pair_matrix(pencil, h)
    r, c = N.shape
    return c - flint.fmpz_mat(r, c, [int(v) for v in N.ravel().tolist()]).rank()


def exact_unstable_locus(pencil: LinearPencil) -> List[Plane]:
    """All unstable planes over C, by solving the rank-one condition exactly.

    A constant w gives unstable H = {h = 0} iff the matrix with columns B_v w
    has rank one, its nonzero rows being multiples of h. The 2x2 minors are
    solved chart by chart. Raises if a solution is irrational or the locus is
    not finite.
    """
    import sympy as sp
    nv = len(pencil.mats)
    g = pencil.num_generators
    w = sp.symbols(f"w0:{g}")
    rows = pencil.mats[0].shape[0]
    M = sp.Matrix([[sum(int(pencil.mats[v][i, a]) * w[a] for a in range(g)) for v in range(nv)]
                   for i in range(rows)])
    eqs = []
    for i, j in itertools.combinations(range(rows), 2):
        for u, v in itertools.combinations(range(nv), 2):
            e = sp.expand(M[i, u] * M[j, v] - M[i, v] * M[j, u])
            if e != 0:
                eqs.append(e)
    found: Set[Tuple[int, ...]] = set()
    for k in range(g):
        free = [w[i] for i in range(g) if i != k]
        system = [e.subs(w[k], 1) for e in eqs] + [w[i] for i in range(k)]
        G = sp.groebner(system, *free, order="lex")
        if list(G) == [1]:
            continue
        if not G.is_zero_dimensional:
            raise PlaneError("unstable locus is not finite")
        for sol in sp.solve(list(G), free, dict=True):
            vec = [sp.sympify(sol.get(w[i], 1 if i == k else 0)) for i in range(g)]
            if not all(x.is_rational for x in vec):
                raise PlaneError("irrational unstable plane")
            Mv = M.subs(dict(zip(w, vec)))
            row = next(r for r in Mv.tolist() if any(x != 0 for x in r))
            found.add(normalize_form([Fraction(int(x.p), int(x.q)) for x in map(sp.Rational, row)]))
    return [Plane(f) for f in sorted(found)]
