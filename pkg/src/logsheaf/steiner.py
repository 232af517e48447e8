"""Steiner presentations: r x c matrices A of linear forms with bundle
F = coker(A^T : O(-1)^r -> O^c).  Rows are syzygies, columns generators.

Splitting on a line is read from the column minimal indices of the restricted
pencil B(s, t) = s B_s + t B_t: constant-coefficient vectors v of degree e with
B v = 0 are the sections of F_L^dual(e) = O(e - a1) + O(e - a2), so the kernel
dimensions in low degrees give a1 and a2.  The gcd of the maximal minors
certifies that the pencil keeps full rank on the line.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import flint

from .arrangement import Arrangement
from .core.gmatrix import GradedMatrix
from .core.linalg import kernel_basis, kernel_basis_int, rank_multimodular
from .core.poly import HPoly, binary_gcd
from .logmod import minimal_resolution
from .split import Line, SplittingType


class SteinerError(ValueError):
    pass


def _q(v) -> flint.fmpq:
    v = Fraction(v)
    return flint.fmpq(v.numerator, v.denominator)


class SteinerMatrix:
    def __init__(self, entries: Sequence[Sequence[HPoly]], num_vars: int = 3):
        self.num_vars = num_vars
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for r in self.entries:
            if len(r) != self.cols:
                raise SteinerError("ragged matrix")
            for i, f in enumerate(r):
                if f is None or (f.coeffs and f.degree != 1):
                    raise SteinerError("entries must be linear forms")
        # constant coefficient matrices, one per variable
        self.coeff = [[[0] * self.cols for _ in range(self.rows)] for _ in range(num_vars)]
        for a, row in enumerate(self.entries):
            for b, f in enumerate(row):
                for v, c in enumerate(f.linear_coefficients() if f.coeffs else [0] * num_vars):
                    self.coeff[v][a][b] = Fraction(c)

    @classmethod
    def from_coefficients(cls, mats: Sequence[Sequence[Sequence]], num_vars: int = 3) -> "SteinerMatrix":
        rows = len(mats[0])
        cols = len(mats[0][0]) if rows else 0
        ent = [[HPoly.linear([mats[v][a][b] for v in range(num_vars)]) for b in range(cols)] for a in range(rows)]
        return cls(ent, num_vars)

    @property
    def shape(self):
        return self.rows, self.cols

    def restrict(self, L: Line) -> List[List[HPoly]]:
        imgs = L.images()
        return [[f.substitute(imgs) if f.coeffs else HPoly.zero(2, 1) for f in row] for row in self.entries]

    def to_strings(self) -> List[List[str]]:
        return [[f.to_string() for f in row] for row in self.entries]

    def betti_sizes(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __repr__(self):
        return f"SteinerMatrix({self.rows}x{self.cols})"


def tangent_bundle_presentation() -> SteinerMatrix:
    """T_P2(-1) as coker(O(-1) -> O^3) given by (z, x, y)."""
    return SteinerMatrix([[HPoly.variable(3, 0), HPoly.variable(3, 1), HPoly.variable(3, 2)]])


def steiner_extract(A: Arrangement) -> SteinerMatrix:
    res = minimal_resolution(A)
    b = res.betti
    g = b.step(0)
    s = b.step(1)
    if len(g) != 1 or len(s) != 1 or b.pdim != 1 or list(s)[0] != list(g)[0] + 1:
        raise SteinerError("resolution not linear")
    P = res.presentation()
    rows, cols = P.shape
    return SteinerMatrix([[P.entries[i][l] for i in range(rows)] for l in range(cols)])


# pencils ---------------------------------------------------------------------

def _binary_matrices(B: Sequence[Sequence[HPoly]]):
    """Constant matrices Bs, Bt with B = s Bs + t Bt."""
    r = len(B)
    c = len(B[0]) if r else 0
    Bs = [[Fraction(0)] * c for _ in range(r)]
    Bt = [[Fraction(0)] * c for _ in range(r)]
    for a in range(r):
        for b in range(c):
            for (es, et), v in B[a][b].coeffs.items():
                if es == 1:
                    Bs[a][b] = v
                else:
                    Bt[a][b] = v
    return Bs, Bt


def pencil_kernel_dim(B: Sequence[Sequence[HPoly]], e: int) -> int:
    """dim of {v in k[s,t]_e^c : B v = 0}."""
    Bs, Bt = _binary_matrices(B)
    r = len(B)
    c = len(B[0])
    # unknowns v_0..v_e (coefficient of s^g t^(e-g)); equations for s^g t^(e+1-g)
    M = [[Fraction(0)] * (c * (e + 1)) for _ in range(r * (e + 2))]
    for g in range(e + 1):
        for a in range(r):
            for b in range(c):
                if Bs[a][b]:
                    M[(g + 1) * r + a][g * c + b] += Bs[a][b]
                if Bt[a][b]:
                    M[g * r + a][g * c + b] += Bt[a][b]
    return c * (e + 1) - rank_multimodular(M)


def _det_binary(B: Sequence[Sequence[HPoly]], cols: Sequence[int]) -> HPoly:
    """Determinant of a square submatrix of binary linear forms, by interpolation."""
    Bs, Bt = _binary_matrices(B)
    r = len(B)
    pts = list(range(r + 1))
    vals = []
    for x in pts:
        m = flint.fmpq_mat([[_q(Bs[a][b] * x + Bt[a][b]) for b in cols] for a in range(r)])
        det = m.det()
        vals.append(Fraction(int(det.p), int(det.q)))
    # Lagrange interpolation of g(x) = det(x Bs + Bt), degree <= r
    coeffs = [Fraction(0)] * (r + 1)
    for i, xi in enumerate(pts):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(pts):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xj * basis[t + 1]
            denom *= xi - xj
        for t in range(len(basis)):
            coeffs[t] += vals[i] * basis[t] / denom
    # homogenize: coefficient of x^t is that of s^t t^(r-t)
    return HPoly(2, r, {(t, r - t): v for t, v in enumerate(coeffs) if v})


def maximal_minors_gcd(B: Sequence[Sequence[HPoly]]) -> HPoly:
    from itertools import combinations
    r = len(B)
    c = len(B[0])
    minors = [_det_binary(B, cols) for cols in combinations(range(c), r)]
    return binary_gcd(minors)


def pencil_splitting(M: SteinerMatrix, L: Line) -> SplittingType:
    """Splitting of coker(M^T)|_L via minimal indices of the restricted pencil."""
    B = M.restrict(L)
    r, c = M.rows, M.cols
    if c - r != 2:
        raise SteinerError("pencil splitting is implemented for rank-2 cokernels")
    if r == 0:
        return SplittingType(0, 0)
    g = maximal_minors_gcd(B)
    if g.degree != 0:
        raise SteinerError("pencil drops rank on the line")
    a1 = None
    for e in range(0, r + 1):
        if pencil_kernel_dim(B, e) > 0:
            a1 = e
            break
    if a1 is None:
        raise SteinerError("no minimal index found")
    a2 = r - a1
    if a1 > a2:
        raise SteinerError("inconsistent minimal indices")
    for e in (a1, a2, a2 + 1):
        expect = max(0, e - a1 + 1) + max(0, e - a2 + 1)
        if pencil_kernel_dim(B, e) != expect:
            raise SteinerError("inconsistent minimal indices")
    return SplittingType(a1, a2)


def is_unstable_line(M: SteinerMatrix, L: Line) -> bool:
    return pencil_splitting(M, L).a1 == 0


def is_locally_free(M: SteinerMatrix, on_line: Optional[Line] = None) -> bool:
    """Full row rank at every point of the line (or, with no line, of a line-free test:
    the maximal minors restricted to a few lines)."""
    if on_line is None:
        raise ValueError("a line is required")
    return maximal_minors_gcd(M.restrict(on_line)).degree == 0


# moves ---------------------------------------------------------------------------

def _linear_vec_space(M: SteinerMatrix, ell: Sequence[int]):
    """Spanning vectors (in lin^c, coordinates (gen, var)) of the trivial classes."""
    nv = M.num_vars
    c = M.cols
    vecs = []
    for a in range(M.rows):
        v = [Fraction(0)] * (c * nv)
        for b in range(c):
            for var in range(nv):
                v[b * nv + var] = M.coeff[var][a][b]
        vecs.append(v)
    for b in range(c):
        v = [Fraction(0)] * (c * nv)
        for var in range(nv):
            v[b * nv + var] = Fraction(ell[var])
        vecs.append(v)
    return vecs


def extension_classes(M: SteinerMatrix, H: Line) -> List[List[Fraction]]:
    """Basis of lin^c modulo (constant row span of M + ell * k^c), as representatives."""
    nv = M.num_vars
    c = M.cols
    span = _linear_vec_space(M, H.form)
    chosen = []
    base_rank = rank_multimodular(span) if span else 0
    current = list(span)
    for idx in range(c * nv):
        e = [Fraction(0)] * (c * nv)
        e[idx] = Fraction(1)
        trial = current + [e]
        rk = rank_multimodular(trial)
        if rk > base_rank:
            chosen.append(e)
            current = trial
            base_rank = rk
    return chosen


def _extended(M: SteinerMatrix, H: Line, cvec: Sequence[Fraction]) -> SteinerMatrix:
    nv = M.num_vars
    c = M.cols
    rows = [list(r) + [HPoly.zero(nv, 1)] for r in M.entries]
    last = [HPoly.linear([cvec[b * nv + v] for v in range(nv)]) for b in range(c)] + [HPoly.linear(H.form)]
    rows.append(last)
    return SteinerMatrix(rows, nv)


def _locally_free_along(M: SteinerMatrix, cvec, H: Line) -> bool:
    nv = M.num_vars
    c = M.cols
    stacked = [list(r) for r in M.entries]
    stacked.append([HPoly.linear([cvec[b * nv + v] for v in range(nv)]) for b in range(c)])
    S = SteinerMatrix(stacked, nv)
    B = S.restrict(H)
    try:
        return maximal_minors_gcd(B).degree == 0
    except ValueError:
        return False


def extension_move(M: SteinerMatrix, H: Line, seed: int = 0, attempts: int = 200) -> SteinerMatrix:
    """A locally free nontrivial extension of O_H by coker(M^T).

    Basis classes are tried in order, then sums of pairs, then seeded random
    combinations; the first one giving a bundle (full rank along H) is used.
    """
    classes = extension_classes(M, H)
    if not classes:
        raise SteinerError("only trivial extensions exist")
    for cv in classes:
        if _locally_free_along(M, cv, H):
            return _extended(M, H, cv)
    n = len(classes)
    for i in range(n):
        for j in range(i + 1, n):
            cv = [a + b for a, b in zip(classes[i], classes[j])]
            if _locally_free_along(M, cv, H):
                return _extended(M, H, cv)
    rng = random.Random(seed)
    for _ in range(attempts):
        coefs = [rng.randint(-5, 5) for _ in range(n)]
        cv = [sum(co * cl[t] for co, cl in zip(coefs, classes)) for t in range(len(classes[0]))]
        if any(cv) and _locally_free_along(M, cv, H):
            return _extended(M, H, cv)
    raise SteinerError("no locally free extension found")


def reduction_move(M: SteinerMatrix, L: Line) -> SteinerMatrix:
    """Presentation of ker(coker(M^T) -> O_L) for an unstable line L."""
    if M.rows < 2:
        raise SteinerError("reduction needs at least two syzygies")
    nv = M.num_vars
    B = M.restrict(L)
    Bs, Bt = _binary_matrices(B)
    # constant w with B w = 0 on L
    stacked = [list(r) for r in Bs] + [list(r) for r in Bt]
    ker = kernel_basis_int(stacked)
    if not ker:
        raise SteinerError("no surjection to O_L")
    w = [Fraction(v) for v in ker[0]]
    c = M.cols
    r = M.rows
    ell = HPoly.linear(L.form)
    # A w = ell * rho
    rho = []
    for a in range(r):
        val = HPoly.zero(nv, 1)
        for b in range(c):
            if w[b] and M.entries[a][b].coeffs:
                val = val + M.entries[a][b] * w[b]
        if val.coeffs:
            q = val.exact_divide(ell)
            rho.append(q.evaluate([0] * nv) if q.degree == 0 else None)
        else:
            rho.append(Fraction(0))
    if any(v is None for v in rho) or not any(rho):
        raise SteinerError("no surjection to O_L")
    # new generator basis: K (kernel of w^T) and u with w^T u = 1
    K = kernel_basis_int([[v for v in w]])
    piv = next(i for i, v in enumerate(w) if v)
    u = [Fraction(0)] * c
    u[piv] = 1 / w[piv]
    P = [[Fraction(K[m][i]) for m in range(c - 1)] + [u[i]] for i in range(c)]
    Pinv = flint.fmpq_mat([[_q(x) for x in row] for row in P]).inv()
    # rows a' = a P^{-T}: coefficient on new generator m is sum_j a_j (P^{-1})_{m j}
    Q = [[Fraction(int(Pinv[i, j].p), int(Pinv[i, j].q)) for j in range(c)] for i in range(c)]
    new_rows = []
    for a in range(r):
        row = []
        for m in range(c):
            val = HPoly.zero(nv, 1)
            for b in range(c):
                if Q[m][b] and M.entries[a][b].coeffs:
                    val = val + M.entries[a][b] * Q[m][b]
            row.append(val)
        new_rows.append(row)
    # row operations making rho = e_1: pivot on a row with rho != 0
    p = next(a for a in range(r) if rho[a])
    order = [p] + [a for a in range(r) if a != p]
    new_rows = [new_rows[a] for a in order]
    rho = [rho[a] for a in order]
    out = []
    for a in range(1, r):
        f = rho[a] / rho[0]
        row = [new_rows[a][m] - new_rows[0][m] * f for m in range(c)]
        if row[c - 1].coeffs:
            raise SteinerError("reduction failed to clear the dropped column")
        out.append(row[:c - 1])
    return SteinerMatrix(out, nv)
