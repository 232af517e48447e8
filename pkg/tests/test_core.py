import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logsheaf.core.geometry import kernel_lattice, normalize_form, parameterization
from logsheaf.core.gmatrix import GradedMatrix
from logsheaf.core.linalg import (QMatrix, kernel_basis, kernel_basis_int, nullity, rank_multimodular,
                                  rank_rational, rational_reconstruct)
from logsheaf.core.poly import HPoly, binary_gcd, monomials, num_monomials
from logsheaf.core.scalar import parse_scalar, scalar_to_str, to_scalar


# scalars ----------------------------------------------------------------------

def test_scalar_round_trip():
    for v in [Fraction(3, 4), Fraction(-6, 8), 5, Fraction(0)]:
        assert parse_scalar(scalar_to_str(v)) == to_scalar(v)
    assert scalar_to_str(Fraction(-6, 8)) == "-3/4"
    assert scalar_to_str(Fraction(10, 2)) == "5"


def test_scalar_reduced():
    v = to_scalar(Fraction(12, -18))
    assert (v.numerator, v.denominator) == (-2, 3)


# polynomials ------------------------------------------------------------------

def s():
    return HPoly.variable(2, 0)


def t():
    return HPoly.variable(2, 1)


def test_monomial_counts():
    for nv in (2, 3, 4):
        for d in range(6):
            assert len(monomials(nv, d)) == num_monomials(nv, d)
    assert monomials(3, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_binary_gcd_examples():
    S, T = s(), t()
    assert binary_gcd([S * S * T, S * T * T]) == S * T
    assert binary_gcd([S + T, S - T]) == HPoly.constant(2, 1)
    f = (S - T) * (S - T) * (S + T * 2)
    g = (S - T) * (S + T * 2) * (S + T * 2)
    assert binary_gcd([f, g]) == ((S - T) * (S + T * 2)).monic()


def test_binary_gcd_zero():
    with pytest.raises(ValueError, match="zero gcd undefined"):
        binary_gcd([HPoly.zero(2, 2), HPoly.zero(2, 1)])


def _rand_binary(rng, d):
    return HPoly.from_dense(2, d, [rng.randint(-5, 5) for _ in range(d + 1)])


def test_binary_gcd_divides():
    rng = random.Random(3)
    for _ in range(40):
        common = _rand_binary(rng, rng.randint(0, 2))
        if not common.coeffs:
            continue
        f = common * _rand_binary(rng, rng.randint(0, 3))
        g = common * _rand_binary(rng, rng.randint(0, 3))
        if not f.coeffs and not g.coeffs:
            continue
        d = binary_gcd([f, g])
        for h in (f, g):
            if h.coeffs:
                _, r = h.divmod(d)
                assert not r.coeffs
        assert d.degree >= common.degree


def test_poly_arithmetic():
    z, x, y = (HPoly.variable(3, i) for i in range(3))
    f = (x + y) * (x - y)
    assert f == x * x - y * y
    q, r = f.divmod(x + y)
    assert q == x - y and not r.coeffs
    assert f.evaluate([0, 2, 1]) == 3
    assert (x * z).derivative(0) == x


def test_poly_substitute():
    z, x, y = (HPoly.variable(3, i) for i in range(3))
    f = x * y - z * z
    g = f.substitute([HPoly.linear([1, 0]), HPoly.linear([0, 1]), HPoly.linear([1, 1])])
    # z = s, x = t, y = s + t
    S, T = s(), t()
    assert g == T * (S + T) - S * S


# linear algebra ---------------------------------------------------------------

def test_kernel_examples():
    assert kernel_basis([[1, 0], [0, 1]]) == []
    assert len(kernel_basis([[0, 0, 0]])) == 3
    (v,) = kernel_basis([[1, 1, 0], [0, 1, 1]])
    ratio = v[0]
    assert [c / ratio for c in v] == [1, -1, 1]


def test_rank_examples():
    assert rank_multimodular([[int(i == j) for j in range(5)] for i in range(5)]) == 5
    u = [1, 2, 3]
    assert rank_multimodular([[a * b for b in u] for a in u]) == 1


def test_rank_shi_jacobian():
    from logsheaf.logmod import jacobian_matrix
    from logsheaf.rootsys import deformation
    M = jacobian_matrix(deformation(2, 0, 1), 3)
    cols = M.shape[1]
    assert rank_multimodular(M.tolist()) == cols - 2 == rank_rational(M.tolist())


def _random_matrix(rng, height):
    r, c = rng.randint(1, 7), rng.randint(1, 7)
    rank = rng.randint(0, min(r, c))
    A = [[rng.randint(-height, height) for _ in range(rank)] for _ in range(r)]
    B = [[rng.randint(-height, height) for _ in range(c)] for _ in range(rank)]
    return [[sum(A[i][k] * B[k][j] for k in range(rank)) for j in range(c)] for i in range(r)]


def test_rank_agrees_with_rational_elimination():
    rng = random.Random(11)
    for _ in range(100):
        M = _random_matrix(rng, 10 ** 6)
        assert rank_multimodular(M) == rank_rational(M)


def test_rank_nullity_random():
    rng = random.Random(12)
    for _ in range(60):
        M = _random_matrix(rng, 50)
        K = kernel_basis(M)
        cols = len(M[0])
        assert rank_multimodular(M) + len(K) == cols
        for v in K:
            assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in M)


def test_kernel_large_entries_exact():
    rng = random.Random(5)
    M = [[rng.randint(-10 ** 12, 10 ** 12) for _ in range(9)] for _ in range(5)]
    K = kernel_basis_int(M)
    assert len(K) == 4
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)


def test_rational_matrix_input():
    M = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 4), Fraction(1, 6)]]
    assert rank_multimodular(M) == 1
    assert nullity(M) == 1


def test_rational_reconstruct():
    m = 2147483647 * 2147483629
    for f in [Fraction(3, 7), Fraction(-22, 9), Fraction(1)]:
        a = f.numerator * pow(f.denominator, -1, m) % m
        assert rational_reconstruct(a, m) == f


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_property(rows):
    assert rank_multimodular(rows) == rank_rational(rows)
    assert rank_multimodular(rows) + len(kernel_basis(rows)) == 4


# geometry and graded matrices ---------------------------------------------------

def test_normalize_form():
    assert normalize_form([-2, 4, 0]) == (1, -2, 0)
    assert normalize_form([0, Fraction(-1, 2), Fraction(1, 3)]) == (0, 3, -2)
    with pytest.raises(ValueError):
        normalize_form([0, 0, 0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=3, max_size=4).filter(any))
def test_kernel_lattice_spans(form):
    f = normalize_form(form)
    basis = kernel_lattice(f)
    assert len(basis) == len(f) - 1
    assert all(sum(a * b for a, b in zip(v, f)) == 0 for v in basis)
    assert rank_rational([list(v) for v in basis]) == len(f) - 1
    assert len(parameterization(f)) == len(f)


def test_graded_matrix_homogeneity():
    z, x, y = (HPoly.variable(3, i) for i in range(3))
    M = GradedMatrix([[z], [x], [y]], [0, 0, 0], [1], 3)
    assert M.entry_degree(0, 0) == 1
    with pytest.raises(ValueError):
        GradedMatrix([[z * z], [x], [y]], [0, 0, 0], [1], 3)


def test_qmatrix_dimensions():
    Q = QMatrix([[1, 2], [3, 4]])
    assert (Q.rows, Q.cols) == (2, 2)
