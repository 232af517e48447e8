"""Acceptance criteria, one test each.

Every test prints a single "ACCEPTANCE <n> PASS|FAIL" line and the session
summary repeats them. Run this file directly to get only those lines.
"""
import random
import sys
from fractions import Fraction

import pytest

from logsheaf.a2geo import (INAPPLICABLE, conic_tangency, jump_catalog, counting_splitting_for_line, random_line,
                            scan_unstable, unstable_catalog)
from logsheaf.arrangement import chern_classes, reduced_char_poly, riemann_hypothesis_holds
from logsheaf.core.linalg import kernel_basis, rank_multimodular
from logsheaf.core.poly import HPoly
from logsheaf.logmod import dual_module_betti, is_free, minimal_resolution, saito_determinant
from logsheaf.rootsys import deformation
from logsheaf.space3 import scan_unstable_planes
from logsheaf.split import (SplittingType, h1_map_matrix, restricted_presentation, splitting_type)
from logsheaf.steiner import (extension_move, is_unstable_line, pencil_splitting, reduction_move,
                              steiner_extract)

RESULTS = {}

TITLES = {
    1: "resolution of D0 on the A2 grid",
    2: "Chern classes and root real parts",
    3: "freeness for k = 0, 1",
    4: "k = 2 identification",
    5: "unstable lines for k >= 4",
    6: "tangency to the conic for k = 3",
    7: "jumping-line table for k = 6",
    8: "shift failure with matching shifted Betti tables",
    9: "A3 unstable planes and dual Betti table",
    10: "Steiner move laws",
    11: "oracle triangle on 500 pairs",
}

GRID = [(k, j) for k in range(2, 7) for j in range(3)]


def record(n, ok, detail=""):
    line = f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {TITLES[n]}"
    if detail:
        line += f" ({detail})"
    RESULTS[n] = line
    print(line)
    return ok


def _normal_splitting(A, L):
    return splitting_type(A, L)


# 1 ------------------------------------------------------------------------------

def criterion_1():
    bad = []
    for k, j in GRID:
        b = minimal_resolution(deformation(2, j, k)).betti.to_json()
        want = {"0": {str(2 * k + 1 + 3 * j): k + 1}, "1": {str(2 * k + 2 + 3 * j): k - 1}}
        if b != want:
            bad.append((k, j, b))
    return not bad, f"{len(GRID)} cells" if not bad else f"mismatch {bad}"


def test_criterion_1():
    ok, detail = criterion_1()
    assert record(1, ok, detail), detail


# 2 ------------------------------------------------------------------------------

def criterion_2():
    bad = []
    for k, j in GRID:
        A = deformation(2, j, k)
        if chern_classes(A, 2 * k + 3 * j + 1) != (k - 1, k * (k - 1) // 2):
            bad.append(("chern", k, j))
        _, b1n, b2 = reduced_char_poly(A)
        b1 = -b1n
        holds, real = riemann_hypothesis_holds(A)
        if b1 * b1 - 4 * b2 > 0 or not holds or real != Fraction(3 * (k + 2 * j + 1), 2):
            bad.append(("roots", k, j))
    return not bad, f"{len(GRID)} cells" if not bad else f"mismatch {bad}"


def test_criterion_2():
    ok, detail = criterion_2()
    assert record(2, ok, detail), detail


# 3 ------------------------------------------------------------------------------

def criterion_3():
    bad = []
    for k in (0, 1):
        for j in range(4):
            A = deformation(2, j, k)
            free, exps = is_free(A)
            if not free or sum(exps) != A.n - 1:
                bad.append((k, j, "free"))
                continue
            det = saito_determinant(A, minimal_resolution(A).generators())
            q, r = det.divmod(A.defining_polynomial())
            if r.coeffs or q.degree != 0 or not q.coeffs:
                bad.append((k, j, "saito"))
    return not bad, "8 arrangements" if not bad else f"failures {bad}"


def test_criterion_3():
    ok, detail = criterion_3()
    assert record(3, ok, detail), detail


# 4 ------------------------------------------------------------------------------

def criterion_4():
    bad = []
    for j in range(3):
        A = deformation(2, j, 2)
        b = minimal_resolution(A).betti.to_json()
        if b != {"0": {str(5 + 3 * j): 3}, "1": {str(6 + 3 * j): 1}}:
            bad.append((j, "betti"))
        rng = random.Random(100 + j)
        lines = [random_line(rng) for _ in range(30)] + [e.line for e in jump_catalog(2, j)]
        for L in lines:
            if splitting_type(A, L) != SplittingType(0, 1):
                bad.append((j, L.to_string()))
    return not bad, "j = 0..2, 36 lines each" if not bad else f"failures {bad}"


def test_criterion_4():
    ok, detail = criterion_4()
    assert record(4, ok, detail), detail


# 5 ------------------------------------------------------------------------------

def criterion_5():
    bad = []
    for k in (4, 5, 6):
        for j in (0, 1):
            A = deformation(2, j, k)
            found = sorted(scan_unstable(A, bound=3, random_count=200, seed=0))
            expect = sorted(e.line for e in unstable_catalog(k, j))
            if found != expect:
                bad.append((k, j, [L.to_string() for L in found]))
    return not bad, "6 cells" if not bad else f"mismatch {bad}"


def test_criterion_5():
    ok, detail = criterion_5()
    assert record(5, ok, detail), detail


# 6 ------------------------------------------------------------------------------

def criterion_6():
    bad = []
    counts = []
    for j in range(3):
        A = deformation(2, j, 3)
        found = scan_unstable(A, bound=3, random_count=200, seed=0)
        counts.append(len(found))
        bad += [(j, L.to_string()) for L in found if not conic_tangency(j, L)]
        bad += [(j, "catalog", e.line.to_string()) for e in unstable_catalog(3, j) if not conic_tangency(j, e.line)]
        if not found:
            bad.append((j, "no unstable line"))
    return not bad, f"scanned lines per j: {counts}" if not bad else f"not tangent {bad}"


def test_criterion_6():
    ok, detail = criterion_6()
    assert record(6, ok, detail), detail


# 7 ------------------------------------------------------------------------------

def criterion_7():
    A = deformation(2, 0, 6)
    M = steiner_extract(A)
    bad = []
    counted = 0
    for e in jump_catalog(6, 0):
        s = e.predicted_splitting.a1
        want = SplittingType(s, 5 - s)
        got = splitting_type(A, e.line)
        pen = pencil_splitting(M, e.line)
        thm = counting_splitting_for_line(A, e.line)
        if thm != INAPPLICABLE:
            counted += 1
            if thm != got:
                bad.append((e.label, "counting", thm))
        if got != want or pen != got:
            bad.append((e.label, got, pen))
    return not bad, f"18 lines, counting criterion applied on {counted}" if not bad else f"failures {bad}"


def test_criterion_7():
    ok, detail = criterion_7()
    assert record(7, ok, detail), detail


# 8 ------------------------------------------------------------------------------

def criterion_8():
    bad = []
    for j in (0, 1):
        A = deformation(2, j, 3)
        B = deformation(2, j + 1, 3)
        wa = set(scan_unstable(A))
        wb = set(scan_unstable(B))
        if wa == wb:
            bad.append((j, "unstable sets agree"))
        if minimal_resolution(B).betti.shifted(-3) != minimal_resolution(A).betti:
            bad.append((j, "betti"))
    return not bad, "j = 0, 1" if not bad else f"failures {bad}"


def test_criterion_8():
    ok, detail = criterion_8()
    assert record(8, ok, detail), detail


# 9 ------------------------------------------------------------------------------

def criterion_9():
    A = deformation(3, 0, 2)
    b = minimal_resolution(A).betti
    checks = {}
    checks["betti"] = b.to_json() == {"0": {"7": 6}, "1": {"8": 3}}
    checks["dual"] = dual_module_betti(A, -12) == b
    scan = scan_unstable_planes(A, dual_also=True, bound=3, seed=0)
    checks["W(E)=7"] = len(scan.primal) == 7
    checks["W(E')=7"] = len(scan.dual) == 7
    checks["common=4"] = scan.common == 4
    detail = ", ".join(f"{k}:{'ok' if v else 'no'}" for k, v in checks.items())
    detail += f"; found |W(E)|={len(scan.primal)}, |W(E')|={len(scan.dual)}, common={scan.common}"
    return all(checks.values()), detail


def test_criterion_9():
    ok, detail = criterion_9()
    assert record(9, ok, detail), detail


# 10 -----------------------------------------------------------------------------

CHAIN_CELLS = [(3, 0), (3, 1), (3, 2), (4, 0), (4, 1), (4, 2), (5, 0), (5, 1), (5, 2)]


def _reduce_chain(M, W, rng):
    """Reduce along lines of W until the 1x3 endpoint, checking the W-inclusion at each step."""
    bad = []
    W = sorted(W)
    while M.rows > 1:
        L = W[0]
        R = reduction_move(M, L)
        if R.shape != (M.rows - 1, M.cols - 1):
            bad.append(("size", R.shape))
        rest = [Lp for Lp in W[1:] if is_unstable_line(R, Lp)]
        if len(rest) != len(W) - 1:
            bad.append(("inclusion", M.shape, L.to_string()))
        M, W = R, rest
        if not W and M.rows > 1:
            bad.append(("no unstable line left", M.shape))
            return M, bad
    return M, bad


def criterion_10():
    bad = []
    for k, j in CHAIN_CELLS:
        A = deformation(2, j, k)
        M = steiner_extract(A)
        rng = random.Random(1000 * k + j)
        sample = [random_line(rng) for _ in range(20)]
        # round trip along a line outside the unstable set
        H = sample[0]
        E = extension_move(M, H)
        if not is_unstable_line(E, H):
            bad.append((k, j, "extension line not unstable"))
        back = reduction_move(E, H)
        if back.shape != M.shape:
            bad.append((k, j, "round-trip size"))
        for L in sample:
            if pencil_splitting(back, L) != pencil_splitting(M, L):
                bad.append((k, j, "round-trip splitting", L.to_string()))
        # reduction chain with the W-inclusion
        W = scan_unstable(A)
        end, chain_bad = _reduce_chain(M, W, rng)
        bad += [(k, j) + b for b in chain_bad]
        if end.shape != (1, 3):
            bad.append((k, j, "endpoint", end.shape))
        else:
            for L in sample + sorted(W):
                if pencil_splitting(end, L) != SplittingType(0, 1):
                    bad.append((k, j, "endpoint splitting", L.to_string()))
    return not bad, f"{len(CHAIN_CELLS)} chains" if not bad else f"failures {bad[:5]}"


def test_criterion_10():
    ok, detail = criterion_10()
    assert record(10, ok, detail), detail


# 11 -----------------------------------------------------------------------------

def _alternating_sum_ok(res):
    lo, hi = min(res.data.hilbert), max(res.data.hilbert)
    nv = res.data.nv
    betti = res.data.betti
    return all(betti.hilbert_from_betti(nv, d) == res.data.hilbert[d] for d in range(lo, hi + 1))


def criterion_11(pairs=500, seed=2024):
    rng = random.Random(seed)
    cells = [(k, j) for k in range(1, 7) for j in range(3)]
    bad = []
    counts = {"counting": 0, "pencil": 0}
    for k, j in cells:
        if not _alternating_sum_ok(minimal_resolution(deformation(2, j, k))):
            bad.append((k, j, "hilbert"))
    for _ in range(pairs):
        k, j = rng.choice(cells)
        A = deformation(2, j, k)
        roll = rng.random()
        if roll < 0.2:
            L = rng.choice(jump_catalog(k, j)).line
        elif roll < 0.4:
            from logsheaf.split import Line
            L = Line(rng.choice(A.forms))
        else:
            L = random_line(rng)
        st = splitting_type(A, L)
        if st.a1 + st.a2 != k - 1:
            bad.append((k, j, L.to_string(), "sum"))
        thm = counting_splitting_for_line(A, L)
        if thm != INAPPLICABLE:
            counts["counting"] += 1
            if thm != st:
                bad.append((k, j, L.to_string(), "counting", thm, st))
        if k >= 2:
            counts["pencil"] += 1
            if pencil_splitting(steiner_extract(A), L) != st:
                bad.append((k, j, L.to_string(), "pencil"))
        # rank-nullity on the restricted cohomology map behind the splitting
        P = restricted_presentation(minimal_resolution(A), L)
        mat = h1_map_matrix(P, -st.a2 + 2 * k + 3 * j + 1 - 1) if P.shape[1] else []
        if mat and mat[0]:
            if rank_multimodular(mat) + len(kernel_basis(mat)) != len(mat[0]):
                bad.append((k, j, L.to_string(), "rank-nullity"))
    detail = f"{pairs} pairs, counting criterion on {counts['counting']}, pencil on {counts['pencil']}"
    return not bad, detail if not bad else f"failures {bad[:5]}"


def test_criterion_11():
    ok, detail = criterion_11()
    assert record(11, ok, detail), detail


def main():
    failed = 0
    for n in range(1, 12):
        ok, detail = globals()[f"criterion_{n}"]()
        failed += not record(n, ok, detail)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
