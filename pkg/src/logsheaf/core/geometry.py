"""Integer linear forms, projective points and lattice parameterizations."""
from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import List, Sequence, Tuple

import flint

Form = Tuple[int, ...]


def normalize_form(coeffs: Sequence) -> Form:
    """Primitive integer vector with first nonzero entry positive."""
    from fractions import Fraction
    from math import lcm
    vals = [Fraction(c) for c in coeffs]
    if not any(vals):
        raise ValueError("zero form")
    den = lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    first = next(v for v in ints if v)
    if first < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def cross(a: Sequence[int], b: Sequence[int]) -> Tuple[int, int, int]:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


@lru_cache(maxsize=None)
def kernel_lattice(form: Form) -> Tuple[Tuple[int, ...], ...]:
    """LLL-reduced basis of {v in Z^n : form . v = 0}, shortest vectors first."""
    n = len(form)
    big = 1 + sum(abs(c) for c in form) * 10 ** 6
    rows = [[1 if i == j else 0 for j in range(n)] + [big * form[i]] for i in range(n)]
    red = flint.fmpz_mat(rows).lll()
    basis = []
    for i in range(n):
        row = [int(red[i, j]) for j in range(n + 1)]
        if row[n] == 0:
            basis.append(tuple(row[:n]))
    if len(basis) != n - 1:
        raise RuntimeError("kernel lattice computation failed")
    basis.sort(key=lambda v: (sum(x * x for x in v), [-abs(x) for x in v]))
    return tuple(basis)


def parameterization(form: Form) -> List[Tuple[int, ...]]:
    """Columns of an integer map from (n-1)-space onto the hyperplane form = 0.

    Returned as a list of n rows: variable i of the ambient space becomes
    sum_b rows[i][b] * u_b.
    """
    basis = kernel_lattice(tuple(form))
    n = len(form)
    return [tuple(basis[b][i] for b in range(n - 1)) for i in range(n)]


def intersection_point(a: Sequence[int], b: Sequence[int]) -> Form:
    return normalize_form(cross(a, b))
