"""Conjecture sweeps over deformation grids, JSON reports and a file cache."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .arrangement import (Arrangement, char_poly, chern_classes, chern_polynomial, reduced_char_poly,
                          riemann_hypothesis_holds)
from .core.resolve import BettiTable, CutoffTooSmall, ResourceExceeded, matrix_budget
from .core.scalar import scalar_to_str
from .logmod import dual_resolution, is_free, minimal_resolution
from .rootsys import ParameterError, coxeter_number, deformation

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
DEFAULT_BUDGET = 40_000_000
VERDICTS = ("shift_betti", "dual_betti", "pdim", "linear", "riemann_hypothesis")


class ResultCache:
    """JSON files keyed by sha256 of (arrangement key, operation, parameters); advisory only."""

    def __init__(self, directory: Optional[str]):
        self.directory = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _path(self, key: str, op: str, params: Dict[str, Any]) -> Optional[str]:
        if not self.directory:
            return None
        blob = json.dumps([key, op, params], sort_keys=True)
        return os.path.join(self.directory, hashlib.sha256(blob.encode()).hexdigest() + ".json")

    def get(self, key: str, op: str, params: Dict[str, Any]):
        path = self._path(key, op, params)
        if path is None or not os.path.exists(path):
            return None
        try:
            with open(path) as fh:
                return json.load(fh)["value"]
        except (OSError, ValueError, KeyError):
            return None

    def put(self, key: str, op: str, params: Dict[str, Any], value):
        path = self._path(key, op, params)
        if path is None:
            return
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"op": op, "params": params, "value": value}, fh, sort_keys=True)
        os.replace(tmp, path)


def cached_betti(A: Arrangement, cache: Optional[ResultCache] = None, cutoff: Optional[int] = None) -> BettiTable:
    params = {"cutoff": cutoff}
    if cache is not None:
        hit = cache.get(A.canonical_key(), "betti", params)
        if hit is not None:
            return BettiTable.from_json(hit)
    b = minimal_resolution(A, cutoff).betti
    if cache is not None:
        cache.put(A.canonical_key(), "betti", params, b.to_json())
    return b


def cached_dual_betti(A: Arrangement, shift: int, cache: Optional[ResultCache] = None) -> BettiTable:
    params = {"shift": shift}
    if cache is not None:
        hit = cache.get(A.canonical_key(), "dual_betti", params)
        if hit is not None:
            return BettiTable.from_json(hit)
    b = dual_resolution(A, shift).betti
    if cache is not None:
        cache.put(A.canonical_key(), "dual_betti", params, b.to_json())
    return b


# sweeps -------------------------------------------------------------------------

@dataclass
class Verdict:
    status: str
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_json(self):
        return {"status": self.status, "tolerance": 0, **self.detail}


@dataclass
class SweepCell:
    family: str
    m: int
    j: int
    k: int
    betti: Optional[dict] = None
    char_poly: Optional[List[int]] = None
    chern: Optional[List[int]] = None
    free: Optional[bool] = None
    exponents: Optional[List[int]] = None
    unstable: Optional[List[str]] = None
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    error: Optional[str] = None

    def to_json(self):
        return {
            "family": self.family, "m": self.m, "j": self.j, "k": self.k,
            "betti": self.betti, "char_poly": self.char_poly, "chern": self.chern,
            "free": self.free, "exponents": self.exponents, "unstable": self.unstable,
            "verdicts": {name: self.verdicts[name].to_json() for name in VERDICTS if name in self.verdicts},
            "error": self.error,
        }


@dataclass
class SweepReport:
    cells: List[SweepCell]
    budget: int

    def all_pass(self) -> bool:
        return all(v.status != FAIL for c in self.cells for v in c.verdicts.values())

    def to_json(self):
        return {"budget": self.budget, "cells": [c.to_json() for c in self.cells]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "m", "j", "k", "betti", "free"] + list(VERDICTS) + ["error"])
        for c in self.cells:
            w.writerow([c.family, c.m, c.j, c.k, json.dumps(c.betti, sort_keys=True), c.free]
                       + [c.verdicts[v].status if v in c.verdicts else "" for v in VERDICTS] + [c.error or ""])
        return buf.getvalue()


def _unstable_strings(A: Arrangement) -> List[str]:
    from .a2geo import scan_unstable
    return [L.to_string() for L in scan_unstable(A)]


def evaluate_cell(family: str, m: int, j: int, k: int, budget: int = DEFAULT_BUDGET,
                  cache_dir: Optional[str] = None, with_unstable: bool = False) -> SweepCell:
    """Every part of the conjecture on one grid point; a budget overrun marks the cell skipped."""
    cell = SweepCell(family, m, j, k)
    cache = ResultCache(cache_dir) if cache_dir else None
    try:
        with matrix_budget(budget):
            A = deformation(m, j, k)
            eta = coxeter_number(family, m)
            cell.char_poly = char_poly(A)
            cell.chern = chern_polynomial(A, 0)[1:]
            b = cached_betti(A, cache)
            cell.betti = b.to_json()
            cell.free, cell.exponents = is_free(A)
            if k < 1:
                for name in VERDICTS:
                    cell.verdicts[name] = Verdict(SKIPPED, {"reason": "conjecture stated for k >= 1"})
                return cell
            B = deformation(m, j + 1, k)
            bb = cached_betti(B, cache).shifted(-eta)
            cell.verdicts["shift_betti"] = Verdict(PASS if bb == b else FAIL,
                                                   {"shift": eta, "other": bb.to_json()})
            shift = -eta * (k + 2 * j + 1)
            db = cached_dual_betti(A, shift, cache)
            cell.verdicts["dual_betti"] = Verdict(PASS if db == b else FAIL,
                                                  {"shift": shift, "dual": db.to_json()})
            expect = min(m - 1, k - 1)
            cell.verdicts["pdim"] = Verdict(PASS if b.pdim == expect else FAIL,
                                            {"expected": expect, "found": b.pdim})
            cell.verdicts["linear"] = Verdict(PASS if b.is_linear() else FAIL, {})
            ok, real = riemann_hypothesis_holds(A)
            cell.verdicts["riemann_hypothesis"] = Verdict(PASS if ok else FAIL,
                                                          {"real_part": scalar_to_str(real)})
            if with_unstable and m == 2:
                cell.unstable = _unstable_strings(A)
    except (ResourceExceeded, CutoffTooSmall) as exc:
        cell.error = str(exc)
        for name in VERDICTS:
            cell.verdicts.setdefault(name, Verdict(SKIPPED, {"reason": str(exc)}))
    return cell


def conjecture_sweep(family: str, m: int, j_range: Iterable[int], k_range: Iterable[int],
                     budget: int = DEFAULT_BUDGET, jobs: int = 1, cache_dir: Optional[str] = None,
                     with_unstable: bool = False) -> SweepReport:
    if family != "A":
        raise ParameterError("only type A is supported")
    grid = [(j, k) for j in j_range for k in k_range]
    args = [(family, m, j, k, budget, cache_dir, with_unstable) for j, k in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(evaluate_cell, *zip(*args)))
    else:
        cells = [evaluate_cell(*a) for a in args]
    return SweepReport(cells, budget)


# reports ------------------------------------------------------------------------

def isomorphic_to_twisted_tangent(A: Arrangement) -> Optional[int]:
    """d with T_A = T_P2(d) when the presentation is one syzygy of three independent linear forms."""
    if A.ambient_dim != 3:
        return None
    res = minimal_resolution(A)
    b = res.betti
    if b.pdim != 1 or len(b.step(0)) != 1 or b.step(0) != {list(b.step(0))[0]: 3} \
            or b.step(1) != {list(b.step(0))[0] + 1: 1}:
        return None
    P = res.presentation()
    from .core.linalg import rank_rational
    rows = [P.entries[i][0].linear_coefficients() for i in range(3)]
    if rank_rational(rows) != 3:
        return None
    return -(list(b.step(0))[0] + 1)


def _sample_splittings(A: Arrangement, lines: Sequence, random_count: int, seed: int) -> List[dict]:
    from .a2geo import random_line
    from .split import Line, jumping_order, splitting_type
    rng = random.Random(seed)
    todo = [L if isinstance(L, Line) else Line.parse(L) for L in lines]
    todo += [random_line(rng) for _ in range(random_count)]
    out = []
    for L in todo:
        st = splitting_type(A, L)
        out.append({"line": L.to_string(), "a1": st.a1, "a2": st.a2,
                    "order": jumping_order(A, L), "unstable": st.a1 == 0 and st.a2 > 0})
    return out


def report(A: Arrangement, options: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Options: betti, lines, random_lines, seed, scan, scan_bound, scan_random, cutoff."""
    opts = dict(options or {})
    doc: Dict[str, Any] = {
        "arrangement": A.to_json(),
        "params": list(A.params) if A.params else None,
        "n": A.n,
        "chi": char_poly(A),
        "reduced": reduced_char_poly(A),
    }
    if A.ambient_dim == 3:
        c1, c2 = chern_classes(A, 0)
        doc["c1"], doc["c2"] = c1, c2
    if opts.get("betti"):
        res = minimal_resolution(A, opts.get("cutoff"))
        doc["beta"] = res.betti.to_json()
        doc["pdim"] = res.pdim
        doc["linear"] = res.betti.is_linear()
        free, exps = is_free(A, opts.get("cutoff"))
        doc["free"] = free
        doc["exponents"] = exps
        if A.ambient_dim == 3 and A.params is not None and A.params[3] == 2:
            d = isomorphic_to_twisted_tangent(A)
            doc["isomorphic_to_twisted_tangent"] = d is not None
            doc["tangent_twist"] = d
    if A.ambient_dim == 3 and (opts.get("lines") or opts.get("random_lines")):
        doc["splittings"] = _sample_splittings(A, opts.get("lines", []), int(opts.get("random_lines", 0)),
                                               int(opts.get("seed", 0)))
    if opts.get("scan") and A.ambient_dim == 3 and A.params is not None:
        doc.update(unstable_summary(A, int(opts.get("scan_bound", 3)), int(opts.get("scan_random", 200)),
                                    int(opts.get("seed", 0))))
    return doc


def unstable_summary(A: Arrangement, bound: int = 3, random_count: int = 200, seed: int = 0) -> Dict[str, Any]:
    from .a2geo import conic_tangency, scan_unstable, unstable_catalog
    _, _, j, k = A.params
    lines = scan_unstable(A, bound, random_count, seed)
    out: Dict[str, Any] = {"lines": [L.to_string() for L in lines]}
    if k >= 3:
        cat = sorted(e.line for e in unstable_catalog(k, j))
        out["matches_catalog"] = sorted(lines) == cat
        if k == 3:
            out["all_tangent_to_conic"] = all(conic_tangency(j, L) for L in lines)
    else:
        out["matches_catalog"] = None
    return out


def dumps(doc) -> str:
    """Deterministic JSON text."""
    return json.dumps(doc, sort_keys=True, indent=2)
