"""Exact rank and kernel computations over the rationals.

Elimination is done modulo word-size primes with flint; exact answers are
recovered by Chinese remaindering plus rational reconstruction and are then
verified with an exact integer product.  A plain Fraction elimination is kept
as an independent reference.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm
from typing import List, Optional, Sequence, Tuple

import flint
import numpy as np

from .scalar import to_scalar


class QMatrix:
    """Dense matrix of exact rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: Optional[int] = None):
        data = [[to_scalar(v) for v in row] for row in entries]
        self.rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged matrix")
        self.cols = cols
        self.entries = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    def column(self, j: int) -> List[Fraction]:
        return [r[j] for r in self.entries]

    def mul_vector(self, v: Sequence) -> List[Fraction]:
        v = [to_scalar(x) for x in v]
        return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.entries]

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"


# conversions -----------------------------------------------------------------

def _as_rows(M) -> Tuple[List[List], int, int]:
    if isinstance(M, QMatrix):
        return M.entries, M.rows, M.cols
    if isinstance(M, flint.fmpz_mat):
        r, c = M.nrows(), M.ncols()
        ent = [int(x) for x in M.entries()]
        return [ent[i * c:(i + 1) * c] for i in range(r)], r, c
    if isinstance(M, np.ndarray):
        if M.ndim != 2:
            raise ValueError("expected a 2-d array")
        return M.tolist(), M.shape[0], M.shape[1]
    rows = [list(r) for r in M]
    return rows, len(rows), (len(rows[0]) if rows else 0)


def to_integer_matrix(M) -> flint.fmpz_mat:
    """Clear denominators row by row.  Row scaling keeps rank and kernel."""
    if isinstance(M, flint.fmpz_mat):
        return M
    if isinstance(M, np.ndarray) and M.dtype != object and M.dtype.kind in "iu":
        r, c = M.shape
        return flint.fmpz_mat(r, c, [int(v) for v in M.ravel().tolist()])
    rows, r, c = _as_rows(M)
    flat = []
    for row in rows:
        if all(isinstance(v, int) for v in row):
            flat.extend(row)
            continue
        row = [to_scalar(v) for v in row]
        den = lcm(*(v.denominator for v in row)) if row else 1
        flat.extend(int(v * den) for v in row)
    return flint.fmpz_mat(r, c, flat)


# primes -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def prime_list(count: int = 64) -> Tuple[int, ...]:
    """Primes just below 2**31, all larger than 2**30."""
    out = []
    p = 2 ** 31 - 1
    while len(out) < count:
        if flint.fmpz(p).is_prime():
            out.append(p)
        p -= 2
    return tuple(out)


def primes(count: int) -> Tuple[int, ...]:
    n = 64
    while n < count:
        n *= 2
    return prime_list(n)[:count]


# modular elimination --------------------------------------------------------

def _rref_mod(A: flint.fmpz_mat, p: int):
    R, rank = flint.nmod_mat(A, p).rref()
    c = A.ncols()
    ent = R.entries()
    pivots = []
    col = 0
    for i in range(rank):
        while int(ent[i * c + col]) == 0:
            col += 1
        pivots.append(col)
        col += 1
    return R, rank, pivots


def rank_mod(M, p: int) -> int:
    A = to_integer_matrix(M)
    if A.nrows() == 0 or A.ncols() == 0:
        return 0
    return flint.nmod_mat(A, p).rank()


def modular_rank(M, trials: int = 2) -> int:
    """Maximum rank over a few large primes.  Never exceeds the rational rank."""
    A = to_integer_matrix(M)
    if A.nrows() == 0 or A.ncols() == 0:
        return 0
    return max(flint.nmod_mat(A, p).rank() for p in primes(trials))


def rational_reconstruct(a: int, m: int) -> Optional[Fraction]:
    """Return n/d with n = a d mod m and |n|, d below sqrt(m/2), if it exists."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _primitive(vec: List[int]) -> List[int]:
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g > 1:
        vec = [v // g for v in vec]
    for v in vec:
        if v:
            if v < 0:
                vec = [-x for x in vec]
            break
    return vec


def kernel_basis_int(M, max_primes: int = 4096) -> List[List[int]]:
    """Basis of the rational kernel as primitive integer vectors.

    The basis is the reduced echelon one (identity on the free columns up to
    scaling), so it is canonical.  Each vector is checked exactly.
    """
    A = to_integer_matrix(M)
    r, c = A.nrows(), A.ncols()
    if c == 0:
        return []
    if r == 0:
        return [[1 if i == j else 0 for i in range(c)] for j in range(c)]
    plist = primes(max_primes)
    best = None  # (rank, pivots)
    residues = []  # list of (p, list of residues for pivot x free entries)
    modulus = 1
    acc = None
    target = 2
    used = 0
    for p in plist:
        R, rank, piv = _rref_mod(A, p)
        key = (rank, [-x for x in piv])
        if best is None or key > (best[0], [-x for x in best[1]]):
            best = (rank, piv)
            modulus, acc, used = 1, None, 0
        if (rank, piv) != best:
            continue
        rank, piv = best
        free = [j for j in range(c) if j not in set(piv)]
        if not free:
            return []
        ent = R.entries()
        vals = [int(ent[i * c + f]) for i in range(rank) for f in free]
        if acc is None:
            acc = vals
            modulus = p
        else:
            inv = pow(modulus, -1, p)
            acc = [x + modulus * (((v - x) * inv) % p) for x, v in zip(acc, vals)]
            modulus *= p
        used += 1
        if used < target:
            continue
        target = used * 2
        vecs = _reconstruct_kernel(acc, modulus, rank, piv, free, c)
        if vecs is None:
            continue
        V = flint.fmpz_mat(c, len(vecs), [vecs[j][i] for i in range(c) for j in range(len(vecs))])
        if (A * V).is_zero():
            return vecs
    raise RuntimeError("kernel reconstruction did not converge")


def _reconstruct_kernel(acc, modulus, rank, piv, free, c):
    nf = len(free)
    vecs = []
    for fi, f in enumerate(free):
        col = []
        for i in range(rank):
            q = rational_reconstruct(acc[i * nf + fi], modulus)
            if q is None:
                return None
            col.append(q)
        den = lcm(*(q.denominator for q in col)) if col else 1
        v = [0] * c
        v[f] = den
        for i, q in enumerate(col):
            v[piv[i]] = -int(q * den)
        vecs.append(_primitive(v))
    return vecs


def kernel_basis(M) -> List[List[Fraction]]:
    """Kernel basis as lists of Fractions (primitive integer representatives)."""
    return [[Fraction(v) for v in vec] for vec in kernel_basis_int(M)]


def rank_rational(M) -> int:
    """Plain Gaussian elimination over Fraction.  Slow reference implementation."""
    rows, r, c = _as_rows(M)
    A = [[to_scalar(v) for v in row] for row in rows]
    rank = 0
    for col in range(c):
        pivot = next((i for i in range(rank, r) if A[i][col] != 0), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        pv = A[rank][col]
        for i in range(rank + 1, r):
            if A[i][col]:
                f = A[i][col] / pv
                Ai, Ar = A[i], A[rank]
                for jj in range(col, c):
                    Ai[jj] -= f * Ar[jj]
        rank += 1
        if rank == r:
            break
    return rank


def _pivot_rows(A: flint.fmpz_mat, cols: List[int], p: int) -> List[int]:
    sub = flint.fmpz_mat([[A[i, j] for i in range(A.nrows())] for j in cols])
    _, _, piv = _rref_mod(sub, p)
    return piv


def rank_multimodular(M) -> int:
    """Rank of a rational matrix.

    Two primes must agree, and a maximal minor picked from the modular pivots
    must have nonzero determinant, checked with exact integer arithmetic.  On
    disagreement the exact rank from flint's fraction-free elimination is used.
    """
    A = to_integer_matrix(M)
    if A.nrows() == 0 or A.ncols() == 0:
        return 0
    p1, p2 = primes(2)
    _, r1, piv1 = _rref_mod(A, p1)
    r2 = flint.nmod_mat(A, p2).rank()
    if r1 == r2:
        if r1 == 0:
            # both primes see only multiples of p1 * p2; check directly
            if A.is_zero():
                return 0
        else:
            rows = _pivot_rows(A, piv1, p1)
            if len(rows) == r1:
                minor = flint.fmpz_mat([[A[i, j] for j in piv1] for i in rows])
                if minor.det() != 0:
                    return r1
    return A.rank()


def nullity(M) -> int:
    A = to_integer_matrix(M)
    return A.ncols() - modular_rank(A)


def independent_columns(M, candidates: Sequence[int], base: Sequence[int] = ()) -> List[int]:
    """Greedy choice of candidate columns independent modulo the base columns.

    Uses reduced echelon pivots modulo a large prime.  The pivot pattern of the
    rational matrix is reproduced by any prime not dividing the relevant minors;
    callers confirm the resulting count against a second rank computation.
    """
    A = to_integer_matrix(M)
    order = list(base) + list(candidates)
    sub = flint.fmpz_mat(A.nrows(), len(order), [A[i, j] for i in range(A.nrows()) for j in order])
    best = None
    for p in primes(3):
        _, rank, piv = _rref_mod(sub, p)
        if best is None or rank > best[0]:
            best = (rank, piv)
    nb = len(base)
    return [order[j] for j in best[1] if j >= nb]
