import pytest

from logsheaf.arrangement import Arrangement, euler_characteristic, chern_polynomial
from logsheaf.core.resolve import BettiTable, CutoffTooSmall, ResourceExceeded, matrix_budget
from logsheaf.logmod import (apply_derivation, clear_cache, default_cutoff, dual_module_betti, dual_resolution, graded_dim,
                             is_free, jacobian_dim, minimal_resolution, saito_determinant)
from logsheaf.rootsys import deformation


@pytest.mark.parametrize("j,k", [(0, 1), (0, 2), (1, 2), (0, 3), (1, 1)])
def test_deconed_matches_jacobian(j, k):
    A = deformation(2, j, k)
    for d in range(0, 2 * k + 3 * j + 4):
        assert graded_dim(A, d, "deconed").dim == jacobian_dim(A, d) == graded_dim(A, d, "jacobian").dim


def test_deconed_matches_jacobian_p3():
    A = deformation(3, 0, 1)
    for d in range(0, 6):
        assert graded_dim(A, d, "deconed").dim == jacobian_dim(A, d)


@pytest.mark.parametrize("j,k,want", [
    (0, 0, {"0": {"1": 1, "2": 1}}),
    (0, 1, {"0": {"3": 2}}),
    (0, 2, {"0": {"5": 3}, "1": {"6": 1}}),
    (0, 3, {"0": {"7": 4}, "1": {"8": 2}}),
    (1, 2, {"0": {"8": 3}, "1": {"9": 1}}),
    (2, 3, {"0": {"13": 4}, "1": {"14": 2}}),
])
def test_betti_tables(j, k, want):
    assert minimal_resolution(deformation(2, j, k)).betti.to_json() == want


def test_betti_a3():
    res = minimal_resolution(deformation(3, 0, 2))
    assert res.betti.to_json() == {"0": {"7": 6}, "1": {"8": 3}}
    assert res.pdim == 1
    assert res.hilbert[12] == 231


def test_generators_are_logarithmic():
    A = deformation(2, 0, 3)
    f = A.defining_polynomial()
    for theta in minimal_resolution(A).generators():
        assert not apply_derivation(theta, f).coeffs


def test_presentation_composes_to_zero():
    A = deformation(2, 1, 2)
    res = minimal_resolution(A)
    P = res.presentation()
    gens = res.generators()
    for c in range(P.shape[1]):
        for comp in range(3):
            total = None
            for r in range(P.shape[0]):
                term = P.entries[r][c] * gens[r][comp] if P.entries[r][c].coeffs else None
                if term is not None:
                    total = term if total is None else total + term
            assert total is None or not total.coeffs


def test_hilbert_alternating_sum():
    res = minimal_resolution(deformation(2, 2, 2))
    nv = res.data.nv
    for d, v in res.data.hilbert.items():
        assert res.data.betti.hilbert_from_betti(nv, d) == v


def test_hilbert_matches_riemann_roch():
    A = deformation(2, 0, 4)
    res = minimal_resolution(A)
    chern = chern_polynomial(A, 0)
    for d in range(min(res.betti.step(0)), default_cutoff(A) + 1):
        assert res.hilbert[d] == euler_characteristic(chern, 2, d)


@pytest.mark.parametrize("j,k", [(j, k) for k in (0, 1) for j in range(4)])
def test_free_with_saito(j, k):
    A = deformation(2, j, k)
    free, exps = is_free(A)
    assert free and sum(exps) == A.n - 1
    det = saito_determinant(A, minimal_resolution(A).generators())
    q, r = det.divmod(A.defining_polynomial())
    assert not r.coeffs and q.degree == 0 and q.coeffs


def test_not_free():
    free, exps = is_free(deformation(2, 0, 3))
    assert not free and exps is None


def test_free_a3_shi():
    free, exps = is_free(deformation(3, 0, 1))
    assert free and exps == [4, 4, 4]


def test_cutoff_too_small_is_loud():
    A = deformation(2, 0, 3)
    with pytest.raises(CutoffTooSmall):
        minimal_resolution(A, cutoff=6)


def test_budget_guard():
    clear_cache()
    A = deformation(2, 2, 5)
    with pytest.raises(ResourceExceeded):
        with matrix_budget(1000):
            minimal_resolution(A, cutoff=default_cutoff(A) + 1)


@pytest.mark.parametrize("j,k", [(0, 3), (1, 2), (0, 1), (0, 4)])
def test_dual_rank_two_self_duality(j, k):
    A = deformation(2, j, k)
    b = minimal_resolution(A).betti
    assert dual_module_betti(A, -(A.n - 1)) == b


def test_dual_shift_moves_table():
    A = deformation(2, 0, 3)
    base = dual_module_betti(A, -(A.n - 1))
    assert dual_module_betti(A, 0) == base.shifted(-(A.n - 1))


def test_dual_free_case():
    # A2 Coxeter arrangement: T = S(-1) + S(-2), so T^dual(-3) = S(-2) + S(-1)
    A = deformation(2, 0, 0)
    assert dual_module_betti(A, -3).to_json() == {"0": {"1": 1, "2": 1}}


def test_dual_a3():
    A = deformation(3, 0, 2)
    r = dual_resolution(A, -12)
    assert r.betti == minimal_resolution(A).betti
    P = r.presentation()
    assert P.shape == (6, 3)
