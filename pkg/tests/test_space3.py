import random

import pytest

from logsheaf.core.gmatrix import GradedMatrix
from logsheaf.core.poly import HPoly
from logsheaf.core.geometry import normalize_form
from logsheaf.rootsys import deformation
from logsheaf.space3 import (Plane, PlaneError, PlaneTester, _dual_tester, _primal_tester, arrangement_points,
                             dual_betti_equal, dual_shift, exact_unstable_locus, h2_line_bundle,
                             lattice_planes, pair_matrix_h2, plane, plane_through, planes_through_points,
                             random_planes, scan_unstable_planes)


def variables():
    return [HPoly.variable(4, i) for i in range(4)]


@pytest.fixture(scope="module")
def a3():
    A = deformation(3, 0, 2)
    return A, _primal_tester(A), _dual_tester(A)


def test_h2_line_bundle():
    assert [h2_line_bundle(a) for a in (-1, -2, -3, -4, -5)] == [0, 0, 1, 3, 6]


def test_euler_sequence_every_plane():
    # coker(O(-1) -> O^4) = T(-1); on H it is T_H(-1) + O_H, so h2(E|_H(-3)) = 1
    M = GradedMatrix([[v] for v in variables()], [0] * 4, [1], 4)
    T = PlaneTester(M)
    for H in random_planes(10, seed=1) + [plane(1, 0, 0, 0)]:
        assert T.h2(H) == 1 == T.h2_cech(H)


def test_twist_moves_generators():
    # twist 1 gives E = T, and T_H(-3) + O_H(-2) has no h2
    z, x, y, w = variables()
    M = GradedMatrix([[z], [x], [y], [w]], [0] * 4, [1], 4)
    assert PlaneTester(M, twist=1).h2(plane(1, 2, 3, 5)) == 0


def test_generic_linear_presentation_has_no_random_unstable_planes():
    rng = random.Random(3)
    vs = variables()
    entries = [[sum((v * rng.randint(-5, 5) for v in vs), HPoly.zero(4, 1)) for _ in range(3)] for _ in range(6)]
    T = PlaneTester(GradedMatrix(entries, [0] * 6, [1] * 3, 4))
    assert not any(T.is_unstable(H) for H in random_planes(10, seed=2))


def test_nonlinear_presentation_rejected():
    z, x, y, w = variables()
    M = GradedMatrix([[z * z], [x * x], [y * y], [w * w]], [0] * 4, [2], 4)
    with pytest.raises(PlaneError, match="resolution not linear"):
        PlaneTester(M)


def test_plane_needs_four_coordinates():
    with pytest.raises(ValueError):
        Plane((1, 0, 0))


def test_plane_parameterizations_agree(a3):
    _, P, _ = a3
    for H in random_planes(5, seed=4) + [plane(1, 0, 0, 0), plane(3, -1, -1, -1)]:
        a, b, c = H.basis
        other = H.with_basis([tuple(p + q for p, q in zip(a, b)), b, tuple(2 * p - q for p, q in zip(c, a))])
        assert P.h2(H) == P.h2(other)


def test_fast_path_matches_cech_and_pair_matrix(a3):
    _, P, D = a3
    planes = random_planes(6, seed=5) + [plane(1, 0, 0, 0), plane(1, 1, 0, 0), plane(0, 1, 1, 1), plane(2, 0, 0, -1)]
    for T in (P, D):
        for H in planes:
            assert T.h2(H) == T.h2_cech(H) == pair_matrix_h2(T.pencil, H.form)


def test_exact_locus_agrees_with_scan(a3):
    A, P, D = a3
    scan = scan_unstable_planes(A, random_count=10)
    assert scan.primal == exact_unstable_locus(P.pencil)
    assert scan.dual == exact_unstable_locus(D.pencil)
    assert scan.common == 3
    assert all(P.h2(H) == 1 for H in scan.primal)


def test_dual_locus_is_mirror_image(a3):
    # observed: the point map v -> (1,1,1) - v carries one locus onto the other
    A, P, D = a3

    def mirror(H):
        c0, *c = H.form
        return Plane(normalize_form([c0 + sum(c)] + [-x for x in c]))

    primal = exact_unstable_locus(P.pencil)
    assert sorted(mirror(H) for H in primal) == exact_unstable_locus(D.pencil)


def test_dual_matches_primal_betti():
    A = deformation(3, 0, 2)
    assert dual_shift(A) == -12
    assert dual_betti_equal(A)


def test_scan_family_pieces():
    A = deformation(3, 0, 2)
    assert plane_through((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)) == (0, 0, 0, 1)
    assert plane_through((1, 0, 0, 0), (2, 0, 0, 0), (0, 1, 0, 0)) is None
    pts = arrangement_points(A)
    assert len(pts) == 107
    for p in pts[:10]:
        assert sum(1 for f in A.forms if sum(a * b for a, b in zip(f, p)) == 0) >= 3
    assert len(planes_through_points(pts[:6])) <= 20
    lat = lattice_planes(A, 1)
    assert plane(1, 0, 0, 0) in lat and len(lat) == len(set(lat))
    assert random_planes(3, seed=9) == random_planes(3, seed=9)


def test_p2_arrangement_rejected():
    with pytest.raises(PlaneError):
        _primal_tester(deformation(2, 0, 3))
