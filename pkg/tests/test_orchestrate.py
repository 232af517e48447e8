import json
import os

import jsonschema
import pytest

from logsheaf.core.resolve import BettiTable
from logsheaf.logmod import clear_cache, dual_module_betti, minimal_resolution
from logsheaf.orchestrate import (FAIL, PASS, SKIPPED, ResultCache, cached_betti, conjecture_sweep, dumps,
                                  evaluate_cell, isomorphic_to_twisted_tangent, report)
from logsheaf.rootsys import ParameterError, deformation

DOCS = os.path.join(os.path.dirname(__file__), os.pardir, "docs")


def schema(name):
    with open(os.path.join(DOCS, name)) as fh:
        return json.load(fh)


def test_report_minimal_is_schema_valid():
    doc = report(deformation(2, 0, 2))
    jsonschema.validate(doc, schema("report.schema.json"))
    assert "beta" not in doc


def test_report_a2_03_betti():
    doc = report(deformation(2, 0, 3), {"betti": True})
    assert doc["beta"] == {"0": {"7": 4}, "1": {"8": 2}}
    assert doc["free"] is False
    jsonschema.validate(doc, schema("report.schema.json"))


def test_report_twisted_tangent():
    doc = report(deformation(2, 1, 2), {"betti": True})
    assert doc["isomorphic_to_twisted_tangent"] is True
    assert doc["tangent_twist"] == -9
    assert isomorphic_to_twisted_tangent(deformation(2, 0, 2)) == -6
    assert isomorphic_to_twisted_tangent(deformation(2, 0, 3)) is None


def test_report_is_byte_identical():
    opts = {"betti": True, "random_lines": 5, "seed": 3, "lines": ["3,-1,0"], "scan": True, "scan_random": 10}
    A = deformation(2, 0, 3)
    a = dumps(report(A, opts))
    b = dumps(report(deformation(2, 0, 3), dict(opts)))
    assert a == b
    doc = json.loads(a)
    jsonschema.validate(doc, schema("report.schema.json"))
    assert doc["matches_catalog"] is True and doc["all_tangent_to_conic"] is True


def test_sweep_small_grid():
    rep = conjecture_sweep("A", 2, [0, 1], [0, 1, 2, 3])
    jsonschema.validate(rep.to_json(), schema("sweep.schema.json"))
    assert rep.all_pass()
    by = {(c.j, c.k): c for c in rep.cells}
    assert all(v.status == SKIPPED for v in by[(0, 0)].verdicts.values())
    assert all(v.status == PASS for v in by[(1, 3)].verdicts.values())
    # c(T) = (1 - 7h)^4 / (1 - 8h)^2 from the resolution
    assert by[(0, 3)].chern == [-12, 294 - 448 + 192]


def test_sweep_verdicts_reproducible():
    cell = evaluate_cell("A", 2, 0, 3)
    v = cell.verdicts["shift_betti"]
    again = minimal_resolution(deformation(2, 1, 3)).betti.shifted(-3)
    assert BettiTable.from_json(v.detail["other"]) == again
    d = cell.verdicts["dual_betti"]
    assert BettiTable.from_json(d.detail["dual"]) == dual_module_betti(deformation(2, 0, 3), d.detail["shift"])
    assert cell.verdicts["pdim"].to_json() == {"status": PASS, "tolerance": 0, "expected": 1, "found": 1}


def test_sweep_parallel_matches_serial():
    a = conjecture_sweep("A", 2, [0], [1, 2], jobs=2).to_json()
    b = conjecture_sweep("A", 2, [0], [1, 2]).to_json()
    assert dumps(a) == dumps(b)


def test_sweep_budget_marks_skipped():
    clear_cache()
    cell = evaluate_cell("A", 2, 1, 4, budget=500)
    assert cell.error
    assert {v.status for v in cell.verdicts.values()} == {SKIPPED}


def test_sweep_rejects_other_types():
    with pytest.raises(ParameterError):
        conjecture_sweep("B", 2, [0], [1])


def test_shift_is_not_line_level_isomorphism():
    a = evaluate_cell("A", 2, 0, 3, with_unstable=True).unstable
    b = evaluate_cell("A", 2, 1, 3, with_unstable=True).unstable
    assert a and b and a != b


def test_csv_export():
    rep = conjecture_sweep("A", 2, [0], [1, 3])
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("family,m,j,k,betti,free,shift_betti")
    assert len(lines) == 3 and ",pass," in lines[2]


def test_cache_round_trip(tmp_path):
    cache = ResultCache(str(tmp_path))
    A = deformation(2, 0, 3)
    b = cached_betti(A, cache)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    assert cached_betti(A, cache) == b
    # the cache is advisory: corrupt entries fall through to recomputation
    files[0].write_text("not json")
    assert cached_betti(A, cache) == b
    assert cache.get("x", "betti", {}) is None
    assert FAIL not in {c.verdicts[v].status for c in conjecture_sweep("A", 2, [0], [2], cache_dir=str(tmp_path)).cells
                        for v in c.verdicts}
