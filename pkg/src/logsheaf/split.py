"""Splitting types of the logarithmic bundle on lines.

The free presentation 0 -> sum O(-f_l) -> sum O(-e_i) -> T -> 0 stays exact
after restriction to any line because T is locally free.  On P^1 the long
exact sequence gives

    h0(T_L(t)) = h0(F0_L(t)) - h0(F1_L(t)) + dim ker(H1(F1_L(t)) -> H1(F0_L(t)))

and H1(O(a)) has the Cech basis s^-p t^-q, p, q >= 1, p + q = -a, on which
the matrix entries act by multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import flint
import numpy as np

from .arrangement import Arrangement, chern_classes
from .core.geometry import Form, kernel_lattice, normalize_form
from .core.gmatrix import GradedMatrix
from .core.linalg import rank_multimodular
from .core.poly import HPoly
from .logmod import Resolution, minimal_resolution
from .core.resolve import BettiTable


class SplittingError(RuntimeError):
    pass


class Line:
    """A line of P^2 (or plane of P^3) given by dual coordinates, with a lattice parameterization."""

    def __init__(self, coeffs: Sequence, basis: Optional[Sequence[Sequence[int]]] = None):
        self.form: Form = normalize_form(coeffs)
        if basis is None:
            basis = kernel_lattice(self.form)
        basis = [tuple(int(v) for v in b) for b in basis]
        if len(basis) != len(self.form) - 1:
            raise ValueError("parameterization needs one point per projective dimension")
        for b in basis:
            if sum(x * y for x, y in zip(b, self.form)) != 0:
                raise ValueError("parameterization point not on the line")
        self.basis = basis

    @classmethod
    def parse(cls, text: str) -> "Line":
        return cls([int(v) for v in text.replace(" ", "").split(",")])

    def images(self) -> List[HPoly]:
        """Variable i of the ambient space as a linear form in the parameters."""
        nparam = len(self.basis)
        return [HPoly.linear([self.basis[b][i] for b in range(nparam)]) for i in range(len(self.form))]

    def with_basis(self, basis) -> "Line":
        return Line(self.form, basis)

    def __eq__(self, other):
        return isinstance(other, Line) and self.form == other.form

    def __hash__(self):
        return hash(self.form)

    def __lt__(self, other):
        return self.form < other.form

    def to_string(self) -> str:
        return ",".join(str(v) for v in self.form)

    def __repr__(self):
        return f"Line({self.to_string()})"


def line(*coeffs) -> Line:
    return Line(coeffs)


@dataclass(frozen=True)
class SplittingType:
    a1: int
    a2: int

    def __post_init__(self):
        if self.a1 > self.a2:
            raise ValueError("a1 must not exceed a2")

    def as_tuple(self):
        return (self.a1, self.a2)

    def to_json(self):
        return {"a1": self.a1, "a2": self.a2}


def splitting(a: int, b: int) -> SplittingType:
    return SplittingType(min(a, b), max(a, b))


# cohomology on P^1 -----------------------------------------------------------------

def h0_line_bundle(a: int) -> int:
    return max(0, a + 1)


def h1_line_bundle(a: int) -> int:
    return max(0, -a - 1)


def _h1_basis(a: int) -> Dict[Tuple[int, int], int]:
    """Index of s^-p t^-q (p, q >= 1, p + q = -a)."""
    n = -a
    return {(p, n - p): i for i, p in enumerate(range(1, n))}


def h1_map_matrix(M: GradedMatrix, t: int) -> List[List[int]]:
    """Matrix of H1(F1_L(t)) -> H1(F0_L(t)) for a presentation of binary forms.

    Columns of M are the F1 summands O(-f_l), rows the F0 summands O(-e_i).
    """
    rows_idx = []
    row_off = []
    acc = 0
    for e in M.row_twists:
        b = _h1_basis(t - e)
        rows_idx.append(b)
        row_off.append(acc)
        acc += len(b)
    nrows = acc
    cols = []
    for c, f in enumerate(M.col_twists):
        src = _h1_basis(t - f)
        for (p, q) in src:
            col = [0] * nrows
            for r in range(len(M.row_twists)):
                g = M.entries[r][c]
                if not g.coeffs:
                    continue
                tgt = rows_idx[r]
                for (ga, gb), coef in g.coeffs.items():
                    key = (p - ga, q - gb)
                    if key[0] >= 1 and key[1] >= 1:
                        col[row_off[r] + tgt[key]] += coef
            cols.append(col)
    return [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]


def restricted_presentation(res: Resolution, L: Line) -> GradedMatrix:
    return res.presentation().substitute(L.images())


def h0_from_presentation(M: GradedMatrix, t: int) -> int:
    h0_f0 = sum(h0_line_bundle(t - e) for e in M.row_twists)
    h0_f1 = sum(h0_line_bundle(t - f) for f in M.col_twists)
    h1_f1 = sum(h1_line_bundle(t - f) for f in M.col_twists)
    if h1_f1 == 0:
        return h0_f0 - h0_f1
    mat = h1_map_matrix(M, t)
    rank = rank_multimodular(mat) if mat else 0
    return h0_f0 - h0_f1 + (h1_f1 - rank)


def _presentation_for(A: Arrangement) -> Resolution:
    if A.ambient_dim != 3:
        raise SplittingError("splitting on lines needs a line arrangement")
    try:
        res = minimal_resolution(A)
    except Exception as exc:  # pragma: no cover - propagated with context
        raise SplittingError("presentation not available") from exc
    if res.pdim > 1:
        raise SplittingError("presentation not available")
    return res


def restricted_h0(A: Arrangement, L: Line, t: int) -> int:
    """h0(T_A(t)|_L)."""
    res = _presentation_for(A)
    return h0_from_presentation(restricted_presentation(res, L), t)


def normal_twist(A: Arrangement) -> int:
    """2k + 3j + 1 for A2 deformations, 0 otherwise."""
    if A.params is not None and A.params[1] == 2:
        _, _, j, k = A.params
        return 2 * k + 3 * j + 1
    return 0


def presentation_splitting(M: GradedMatrix) -> Tuple[int, int]:
    """(b1, b2) with coker(M) = O(b1) + O(b2) on P^1, assuming rank 2 and locally free."""
    if len(M.row_twists) - len(M.col_twists) != 2:
        raise SplittingError("cokernel is not of rank 2")
    c1 = sum(M.col_twists) - sum(M.row_twists)
    maxe = max(M.row_twists)
    lo = -(c1 + maxe) - 1
    hi = maxe - c1 + 1
    if h0_from_presentation(M, lo) != 0 or h0_from_presentation(M, hi) == 0:
        raise SplittingError("inconsistent h0 profile")
    # smallest t with h0 > 0 is -b2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if h0_from_presentation(M, mid) > 0:
            hi = mid
        else:
            lo = mid
    b2 = -hi
    b1 = c1 - b2
    if b1 > b2:
        raise SplittingError("inconsistent h0 profile")
    for t in (hi, -b1, -b1 - 1):
        expect = h0_line_bundle(b1 + t) + h0_line_bundle(b2 + t)
        if h0_from_presentation(M, t) != expect:
            raise SplittingError("inconsistent h0 profile")
    return b1, b2


def splitting_type(A: Arrangement, L: Line, twist: Optional[int] = None) -> SplittingType:
    """Splitting of T_A(twist)|_L; the twist defaults to the normalizing one."""
    twist = normal_twist(A) if twist is None else twist
    res = _presentation_for(A)
    b1, b2 = presentation_splitting(restricted_presentation(res, L))
    st = SplittingType(b1 + twist, b2 + twist)
    c1 = chern_classes(A, twist)[0]
    if st.a1 + st.a2 != c1:
        raise SplittingError("first Chern class mismatch")
    return st


def _steiner_k(A: Arrangement) -> Optional[int]:
    if A.params is not None and A.params[1] == 2:
        return A.params[3]
    return None


def unstable_via_h1(A: Arrangement, L: Line, twist: Optional[int] = None) -> bool:
    """h1(E_L(-2)) != 0 with E the normalized bundle, from a single h0 value."""
    twist = normal_twist(A) if twist is None else twist
    c1 = chern_classes(A, twist)[0]
    h0 = restricted_h0(A, L, twist - 2)
    chi = c1 - 2 + 2 * 0  # chi(E_L(-2)) = (a1 - 1) + (a2 - 1)
    return h0 - chi != 0


_PENCILS: Dict[str, Optional[list]] = {}


def linear_coefficients(A: Arrangement) -> Optional[list]:
    """Per-variable integer matrices (syzygies x generators) of a linear presentation."""
    key = A.canonical_key()
    if key not in _PENCILS:
        res = _presentation_for(A)
        P = res.presentation()
        rows, cols = P.shape
        linear = cols > 0 and all(P.entry_degree(i, l) == 1 for i in range(rows) for l in range(cols))
        if not linear:
            _PENCILS[key] = None
        else:
            mats = [np.zeros((cols, rows), dtype=object) for _ in range(3)]
            for i in range(rows):
                for l in range(cols):
                    f = P.entries[i][l]
                    for e, c in f.coeffs.items():
                        if c.denominator != 1:
                            raise SplittingError("non-integral presentation")
                        mats[e.index(1)][l, i] = int(c)
            _PENCILS[key] = mats
    return _PENCILS[key]


def constant_kernel_dim(mats: list, L: Line) -> int:
    """dim{w constant : B w = 0 on L} for B the restricted pencil."""
    p1, p2 = L.basis
    Bs = sum(mats[v] * p1[v] for v in range(3))
    Bt = sum(mats[v] * p2[v] for v in range(3))
    stacked = np.concatenate([Bs, Bt], axis=0)
    r, c = stacked.shape
    M = flint.fmpz_mat(r, c, [int(v) for v in stacked.ravel().tolist()])
    if flint.nmod_mat(M, 2147483647).rank() == c:
        return 0
    return c - M.rank()


def is_unstable(A: Arrangement, L: Line) -> bool:
    """Splitting (0, c1(E)) on L; free arrangements never count."""
    k = _steiner_k(A)
    if k is not None and k < 2:
        return False
    c1 = chern_classes(A, normal_twist(A))[0]
    if c1 < 1:
        return False
    mats = linear_coefficients(A) if normal_twist(A) == _generator_twist(A) else None
    if mats is not None:
        return constant_kernel_dim(mats, L) > 0
    return unstable_via_h1(A, L)


def _generator_twist(A: Arrangement) -> Optional[int]:
    degs = set(minimal_resolution(A).generator_degrees)
    return degs.pop() if len(degs) == 1 else None


def generic_splitting(A: Arrangement) -> SplittingType:
    c1 = chern_classes(A, normal_twist(A))[0]
    return SplittingType(c1 // 2, c1 - c1 // 2)


def jumping_order(A: Arrangement, L: Line) -> int:
    st = splitting_type(A, L)
    return generic_splitting(A).a1 - st.a1


def is_stable(A: Arrangement) -> str:
    """'stable', 'strictly_semistable' or 'unstable_bundle' for the rank-2 bundle T_A."""
    if A.ambient_dim != 3:
        raise ValueError("stability is implemented for line arrangements")
    res = minimal_resolution(A)
    a = (A.n - 1) // 2
    c1n = chern_classes(A, a)[0]
    hf = res.hilbert
    if hf.get(a, 0) == 0:
        return "stable"
    if c1n == 0 and hf.get(a - 1, 0) == 0:
        return "strictly_semistable"
    return "unstable_bundle"
