"""Minimal graded free resolutions of submodules of free modules.

A submodule M of U = sum_c S(-twist_c) is described degree by degree: an
upper bound on dim M_d (from a rank modulo a prime) and an exact basis of M_d.
Generators are collected greedily by degree.  The syzygies of the chosen
generators form a new submodule of the same kind, so the same routine gives
every step of the resolution.

Certification: a rank modulo p never exceeds the rational rank.  In degrees
where the multiples of earlier generators already reach the modular upper
bound of dim M_d, the chain rank_p <= rank_Q <= dim_Q <= bound forces equality.
Elsewhere an exact kernel basis (verified by exact multiplication) fixes
dim M_d, and new generators are picked among its vectors.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import flint
import numpy as np

from .linalg import kernel_basis_int, primes, to_integer_matrix
from .poly import HPoly, mult_table, num_monomials

Vector = List[int]
Generator = Tuple[int, Vector]  # (degree, coefficients in ambient coordinates)

DEFAULT_PRIMES = primes(3)


class CutoffTooSmall(RuntimeError):
    pass


class ResourceExceeded(RuntimeError):
    pass


_BUDGET: List[Optional[int]] = [None]


@contextmanager
def matrix_budget(max_entries: Optional[int]):
    """Abort any dense matrix allocation above max_entries inside the block."""
    old = _BUDGET[0]
    _BUDGET[0] = max_entries
    try:
        yield
    finally:
        _BUDGET[0] = old


def check_budget(rows: int, cols: int):
    if _BUDGET[0] is not None and rows * cols > _BUDGET[0]:
        raise ResourceExceeded(f"matrix {rows}x{cols} exceeds budget of {_BUDGET[0]} entries")


class FreeModule:
    """Graded free module sum_c S(-twist_c) over a polynomial ring in nv variables."""

    def __init__(self, nv: int, twists: Sequence[int]):
        self.nv = nv
        self.twists = list(twists)

    def comp_dims(self, d: int) -> List[int]:
        return [num_monomials(self.nv, d - t) for t in self.twists]

    def offsets(self, d: int) -> List[int]:
        out, acc = [], 0
        for n in self.comp_dims(d):
            out.append(acc)
            acc += n
        return out

    def dim(self, d: int) -> int:
        return sum(self.comp_dims(d))

    def split(self, d: int, vec: Sequence) -> List[HPoly]:
        """Cut a degree-d vector into its components as forms."""
        out = []
        off = 0
        for t, n in zip(self.twists, self.comp_dims(d)):
            if d - t < 0:
                out.append(HPoly.zero(self.nv, 0))
            else:
                out.append(HPoly.from_dense(self.nv, d - t, vec[off:off + n]))
            off += n
        return out


def multiples_matrix(ambient: FreeModule, gens: Sequence[Generator], d: int, p: Optional[int] = None):
    """Columns: x^nu * g for each generator g and each monomial nu of degree d - deg g.

    Exact mode (p None) returns an object array of Python ints; modular mode an
    int64 array reduced mod p.
    """
    rows = ambient.dim(d)
    cols_per = [num_monomials(ambient.nv, d - e) for e, _ in gens]
    ncols = sum(cols_per)
    check_budget(rows, ncols)
    dtype = object if p is None else np.int64
    out = np.zeros((rows, ncols), dtype=dtype)
    if rows == 0 or ncols == 0:
        return out
    offs_d = ambient.offsets(d)
    col = 0
    for (e, vec), nb in zip(gens, cols_per):
        if nb == 0:
            continue
        pos = 0
        for c, t in enumerate(ambient.twists):
            a = e - t
            na = num_monomials(ambient.nv, a)
            if na == 0:
                continue
            part = vec[pos:pos + na]
            pos += na
            if not any(part):
                continue
            T = mult_table(ambient.nv, a, d - e)
            vals = np.array(part, dtype=object)
            if p is not None:
                vals = np.array([int(v) % p for v in part], dtype=np.int64)
            out[offs_d[c] + T, col + np.arange(nb)[None, :]] = vals[:, None]
        col += nb
    return out


def _nmod(arr: np.ndarray, p: int) -> flint.nmod_mat:
    r, c = arr.shape
    if arr.dtype == object:
        return flint.nmod_mat(r, c, [int(v) % p for v in arr.ravel().tolist()], p)
    return flint.nmod_mat(r, c, arr.ravel().tolist(), p)


def rank_modp(arr: np.ndarray, p: int) -> int:
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return 0
    return _nmod(arr, p).rank()


class GradedSubmodule:
    """Interface: a graded submodule of a free module."""

    ambient: FreeModule

    def dim_bound(self, d: int, p: int) -> int:
        """An upper bound on dim M_d, exact for all but finitely many primes."""
        raise NotImplementedError

    def exact_basis(self, d: int) -> List[Vector]:
        raise NotImplementedError

    def min_degree(self) -> int:
        return min(self.ambient.twists) if self.ambient.twists else 0


class KernelModule(GradedSubmodule):
    """Syzygies of a list of elements of a free module."""

    def __init__(self, target: FreeModule, gens: Sequence[Generator],
                 image_hilbert: Optional[Dict[int, int]] = None):
        self.target = target
        self.gens = list(gens)
        self.ambient = FreeModule(target.nv, [e for e, _ in gens])
        # when gens generate a module with known Hilbert function, the image
        # dimension in degree d is that value and no rank is needed
        self.image_hilbert = image_hilbert
        self._rank_cache: Dict[Tuple[int, int], int] = {}

    def map_rank(self, d: int, p: int) -> int:
        if self.image_hilbert is not None and d in self.image_hilbert:
            return self.image_hilbert[d]
        key = (d, p)
        if key not in self._rank_cache:
            self._rank_cache[key] = rank_modp(multiples_matrix(self.target, self.gens, d, p), p)
        return self._rank_cache[key]

    def dim_bound(self, d: int, p: int) -> int:
        return self.ambient.dim(d) - self.map_rank(d, p)

    def exact_basis(self, d: int) -> List[Vector]:
        if self.ambient.dim(d) == 0:
            return []
        return kernel_basis_int(multiples_matrix(self.target, self.gens, d))


@dataclass
class StepResult:
    gens: List[Generator]
    hilbert: Dict[int, int]


def _choose_new(ambient: FreeModule, gens: List[Generator], basis: List[Vector], d: int,
                target_rank: int) -> List[Vector]:
    """Pick basis vectors completing the span of the multiples of gens in degree d."""
    for p in DEFAULT_PRIMES:
        old = multiples_matrix(ambient, gens, d, p)
        B = np.array([[int(v) % p for v in vec] for vec in basis], dtype=np.int64).T
        combined = np.concatenate([old, B.reshape(old.shape[0], len(basis))], axis=1)
        R, rank = _nmod(combined, p).rref()
        if rank != target_rank:
            continue
        ncols = combined.shape[1]
        ent = R.entries()
        chosen = []
        col = 0
        for i in range(rank):
            while int(ent[i * ncols + col]) == 0:
                col += 1
            if col >= old.shape[1]:
                chosen.append(basis[col - old.shape[1]])
            col += 1
        return chosen
    raise RuntimeError("could not select generators with consistent modular ranks")


def minimal_generators(M: GradedSubmodule, cutoff: int, start: Optional[int] = None) -> StepResult:
    gens: List[Generator] = []
    hilbert: Dict[int, int] = {}
    amb = M.ambient
    lo = M.min_degree() if start is None else start
    for d in range(min(lo, 0), cutoff + 1):
        if d < lo or amb.dim(d) == 0:
            hilbert[d] = 0
            continue
        bound = min(M.dim_bound(d, p) for p in DEFAULT_PRIMES[:2])
        if bound == 0:
            hilbert[d] = 0
            continue
        if gens:
            r = max(rank_modp(multiples_matrix(amb, gens, d, p), p) for p in DEFAULT_PRIMES[:2])
        else:
            r = 0
        if r == bound:
            hilbert[d] = bound
            continue
        basis = M.exact_basis(d)
        hilbert[d] = len(basis)
        if len(basis) > bound:
            raise AssertionError("exact dimension exceeds modular bound")
        if len(basis) == r:
            continue
        new = _choose_new(amb, gens, basis, d, len(basis))
        gens.extend((d, v) for v in new)
    return StepResult(gens, hilbert)


@dataclass
class BettiTable:
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def pdim(self) -> int:
        steps = [p for (p, _d), v in self.entries.items() if v > 0]
        return max(steps) if steps else -1

    def step(self, p: int) -> Dict[int, int]:
        return {d: v for (q, d), v in sorted(self.entries.items()) if q == p and v > 0}

    def shifted(self, delta: int) -> "BettiTable":
        """Internal degrees moved by +delta."""
        return BettiTable({(p, d + delta): v for (p, d), v in self.entries.items()})

    def to_json(self) -> Dict[str, Dict[str, int]]:
        out: Dict[str, Dict[str, int]] = {}
        for (p, d), v in sorted(self.entries.items()):
            if v:
                out.setdefault(str(p), {})[str(d)] = v
        return out

    @classmethod
    def from_json(cls, data) -> "BettiTable":
        return cls({(int(p), int(d)): int(v) for p, row in data.items() for d, v in row.items()})

    @classmethod
    def from_steps(cls, steps: Sequence[Sequence[Generator]]) -> "BettiTable":
        ent: Dict[Tuple[int, int], int] = {}
        for p, gens in enumerate(steps):
            for e, _ in gens:
                ent[(p, e)] = ent.get((p, e), 0) + 1
        return cls(ent)

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.to_json() == other.to_json()

    def hilbert_from_betti(self, nv: int, d: int) -> int:
        return sum((-1) ** p * v * comb(d - e + nv - 1, nv - 1)
                   for (p, e), v in self.entries.items() if d >= e)

    def is_linear(self) -> bool:
        """Each step sits in a single degree, one more than the previous step's."""
        if not self.entries:
            return True
        base = None
        for p in range(self.pdim + 1):
            degs = list(self.step(p))
            if len(degs) != 1:
                return False
            if base is None:
                base = degs[0]
            elif degs[0] != base + p:
                return False
        return True

    def __repr__(self):
        return f"BettiTable({self.to_json()})"


@dataclass
class ResolutionData:
    nv: int
    cutoff: int
    ambient: FreeModule
    steps: List[List[Generator]]
    hilbert: Dict[int, int]
    step_ambients: List[FreeModule]
    betti: BettiTable
    residual_nonzero: bool = False

    def matrix(self, step: int) -> List[List[HPoly]]:
        """Entries of the map F_step -> F_{step-1}; rows index F_{step-1}."""
        if step < 1 or step >= len(self.steps):
            raise IndexError("no such map")
        src = self.step_ambients[step - 1]
        cols = self.steps[step]
        out = [[None] * len(cols) for _ in range(len(src.twists))]
        for c, (e, vec) in enumerate(cols):
            parts = src.split(e, vec)
            for r, poly in enumerate(parts):
                out[r][c] = poly
        return out


def resolve(M: GradedSubmodule, cutoff: int, max_steps: Optional[int] = None) -> ResolutionData:
    """Resolve up to internal degree ``cutoff``, until the syzygies vanish."""
    nv = M.ambient.nv
    max_steps = nv if max_steps is None else max_steps
    first = minimal_generators(M, cutoff)
    if not first.gens:
        betti = BettiTable({})
        return ResolutionData(nv, cutoff, M.ambient, [[]], first.hilbert, [FreeModule(nv, [])], betti)
    steps = [first.gens]
    ambients = [FreeModule(nv, [e for e, _ in first.gens])]
    target = M.ambient
    current = first.gens
    image_hf = first.hilbert
    residual = False
    while current:
        K = KernelModule(target, current, image_hf)
        if len(steps) > max_steps:
            residual = any(K.dim_bound(d, DEFAULT_PRIMES[0]) for d in range(cutoff + 1))
            break
        nxt = minimal_generators(K, cutoff)
        if not nxt.gens:
            break
        steps.append(nxt.gens)
        ambients.append(FreeModule(nv, [e for e, _ in nxt.gens]))
        target = K.ambient
        current = nxt.gens
        image_hf = nxt.hilbert
    betti = BettiTable.from_steps(steps)
    for d in first.hilbert:
        if betti.hilbert_from_betti(nv, d) != first.hilbert[d]:
            raise AssertionError(f"alternating-sum identity fails in degree {d}")
    return ResolutionData(nv, cutoff, M.ambient, steps, first.hilbert, ambients, betti, residual)
