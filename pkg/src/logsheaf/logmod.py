"""The logarithmic derivation module D0(A), its graded pieces, minimal free
resolution, freeness test and the dual module.

D0(A) is isomorphic, degree by degree, to the derivations theta of D(A) with
theta(z) = 0 when z = 0 belongs to A: both are complements of the Euler
derivation in D(A).  In that model a derivation sum a_i d/dx_i must have a_i
divisible by the product P_i of the hyperplanes involving only z and x_i, so
writing a_i = P_i u_i leaves one vanishing condition per remaining hyperplane.
That gives far smaller linear systems than the Jacobian syzygies, which stay
available as an independent route.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arrangement import Arrangement, chern_polynomial, dual_chern, euler_characteristic, twist_chern
from .core.geometry import parameterization
from .core.gmatrix import GradedMatrix
from .core.linalg import kernel_basis_int, rank_multimodular
from .core.poly import HPoly, monomial_index, monomials, mult_table, num_monomials, product
from .core.resolve import (BettiTable, CutoffTooSmall, check_budget, FreeModule, GradedSubmodule, KernelModule,
                           ResolutionData, multiples_matrix, rank_modp, resolve)


def _first_var_tables(nv: int, e: int):
    """For monomials of degree e: index of first variable present and of the parent monomial."""
    idx = monomial_index(nv, e - 1)
    fv, par = [], []
    for mono in monomials(nv, e):
        v = next(i for i, a in enumerate(mono) if a)
        m = list(mono)
        m[v] -= 1
        fv.append(v)
        par.append(idx[tuple(m)])
    return np.array(fv), np.array(par)


class _Images:
    """Images of all monomials under a linear substitution, built degree by degree."""

    def __init__(self, rows: Sequence[Sequence[int]], p: Optional[int]):
        self.lin = [list(r) for r in rows]
        self.nv = len(rows)
        self.np_ = len(rows[0])
        self.p = p
        dtype = object if p is None else np.int64
        self.dtype = dtype
        self.levels = [np.ones((1, 1), dtype=dtype)]
        self._tables = {}

    def get(self, e: int) -> np.ndarray:
        while len(self.levels) <= e:
            self._extend()
        return self.levels[e]

    def _extend(self):
        e = len(self.levels)
        prev = self.levels[-1]
        fv, par = _first_var_tables(self.nv, e)
        tab = mult_table(self.np_, 1, e - 1)
        res = np.zeros((num_monomials(self.nv, e), num_monomials(self.np_, e)), dtype=self.dtype)
        for v in range(self.nv):
            rows = np.nonzero(fv == v)[0]
            if rows.size == 0:
                continue
            batch = prev[par[rows]]
            for b in range(self.np_):
                coef = self.lin[v][b]
                if not coef:
                    continue
                if self.p is None:
                    res[np.ix_(rows, tab[b])] += coef * batch
                else:
                    res[np.ix_(rows, tab[b])] = (res[np.ix_(rows, tab[b])] + (coef % self.p) * batch) % self.p
        self.levels.append(res)


def _supported_on(form: Sequence[int], c: int) -> bool:
    return form[c] != 0 and all(v == 0 for i, v in enumerate(form) if i not in (0, c))


class DeconedModule(GradedSubmodule):
    """{theta in D(A) : theta(z) = 0} in coordinates u_i with a_i = P_i u_i."""

    def __init__(self, A: Arrangement):
        nv = A.ambient_dim
        z = (1,) + (0,) * (nv - 1)
        if z not in A.forms:
            raise ValueError("the hyperplane z = 0 must belong to the arrangement")
        self.A = A
        self.nv = nv
        self.factors: List[HPoly] = []
        for c in range(1, nv):
            self.factors.append(product((HPoly.linear(f) for f in A.forms if _supported_on(f, c)), nv))
        self.rest = [f for f in A.forms if f != z and not any(_supported_on(f, c) for c in range(1, nv))]
        self.ambient = FreeModule(nv, [P.degree for P in self.factors])
        self.factor_dense = [[int(v) for v in P.to_dense()] for P in self.factors]
        self.params = [parameterization(f) for f in self.rest]
        self._images: Dict[Tuple[int, Optional[int]], _Images] = {}

    def _img(self, h: int, p: Optional[int]) -> _Images:
        key = (h, p)
        if key not in self._images:
            self._images[key] = _Images(self.params[h], p)
        return self._images[key]

    def condition_matrix(self, d: int, p: Optional[int] = None) -> np.ndarray:
        nparam = self.nv - 1
        mrows = num_monomials(nparam, d)
        cols = self.ambient.dim(d)
        offs = self.ambient.offsets(d)
        check_budget(len(self.rest) * mrows, cols)
        dtype = object if p is None else np.int64
        C = np.zeros((len(self.rest) * mrows, cols), dtype=dtype)
        for h, form in enumerate(self.rest):
            img = self._img(h, p).get(d)
            r0 = h * mrows
            for ci, P in enumerate(self.factors):
                c = ci + 1
                hc = form[c]
                a = d - P.degree
                if hc == 0 or a < 0:
                    continue
                T = mult_table(self.nv, P.degree, a)
                block = np.zeros((T.shape[1], mrows), dtype=dtype)
                for nu, coef in enumerate(self.factor_dense[ci]):
                    if coef:
                        if p is None:
                            block += (coef * hc) * img[T[nu]]
                        else:
                            block = (block + ((coef * hc) % p) * img[T[nu]]) % p
                C[r0:r0 + mrows, offs[ci]:offs[ci] + T.shape[1]] = block.T
        return C

    def dim_bound(self, d: int, p: int) -> int:
        total = self.ambient.dim(d)
        if total == 0 or not self.rest:
            return total
        return total - rank_modp(self.condition_matrix(d, p), p)

    def exact_basis(self, d: int) -> List[List[int]]:
        total = self.ambient.dim(d)
        if total == 0:
            return []
        if not self.rest:
            return [[1 if i == j else 0 for i in range(total)] for j in range(total)]
        return kernel_basis_int(self.condition_matrix(d))

    def to_derivation(self, d: int, vec: Sequence[int]) -> List[HPoly]:
        """(a_0, ..., a_m) with a_0 = 0 and a_i = P_i u_i."""
        parts = self.ambient.split(d, vec)
        out = [HPoly.zero(self.nv, d)]
        for P, u in zip(self.factors, parts):
            out.append(P * u if u.coeffs else HPoly.zero(self.nv, d))
        return out


def apply_derivation(theta: Sequence[HPoly], f: HPoly) -> HPoly:
    total = None
    for i, a in enumerate(theta):
        if not a.coeffs:
            continue
        term = a * f.derivative(i)
        total = term if total is None else total + term
    return total if total is not None else HPoly.zero(f.num_vars, 0)


def euler_corrected(A: Arrangement, theta: Sequence[HPoly]) -> List[HPoly]:
    """n theta - g theta_E where theta(f) = g f; the result kills f."""
    nv = A.ambient_dim
    g = None
    for form in A.forms:
        val = apply_derivation(theta, HPoly.linear(form))
        if not val.coeffs:
            continue
        q = val.exact_divide(HPoly.linear(form))
        g = q if g is None else g + q
    n = A.n
    if g is None:
        return [n * a for a in theta]
    out = []
    for i, a in enumerate(theta):
        corr = g * HPoly.variable(nv, i)
        out.append(n * a - corr if a.coeffs else -corr)
    return out


# Jacobian route ----------------------------------------------------------------

def jacobian_module(A: Arrangement) -> KernelModule:
    """Syzygies of the partials; element degree = coefficient degree + n - 1."""
    f = A.defining_polynomial()
    nv = A.ambient_dim
    target = FreeModule(nv, [0])
    gens = []
    for i in range(nv):
        df = f.derivative(i)
        gens.append((f.degree - 1, [int(v * 1) for v in df.to_dense()]))
    return KernelModule(target, gens)


def jacobian_matrix(A: Arrangement, d: int) -> np.ndarray:
    K = jacobian_module(A)
    return multiples_matrix(K.target, K.gens, d + A.n - 1)


def jacobian_dim(A: Arrangement, d: int) -> int:
    M = jacobian_matrix(A, d)
    return M.shape[1] - rank_multimodular(M)


@dataclass
class GradedPiece:
    degree: int
    basis: List[List[HPoly]]

    @property
    def dim(self) -> int:
        return len(self.basis)


def graded_dim(A: Arrangement, d: int, method: str = "auto") -> GradedPiece:
    """Basis of the derivations of coefficient degree d killing the defining form."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    nv = A.ambient_dim
    z = (1,) + (0,) * (nv - 1)
    if method == "auto":
        method = "deconed" if z in A.forms else "jacobian"
    if method == "jacobian":
        vecs = kernel_basis_int(jacobian_matrix(A, d))
        amb = FreeModule(nv, [0] * nv)
        return GradedPiece(d, [amb.split(d, v) for v in vecs])
    if method != "deconed":
        raise ValueError(f"unknown method {method!r}")
    M = DeconedModule(A)
    vecs = M.exact_basis(d)
    return GradedPiece(d, [euler_corrected(A, M.to_derivation(d, v)) for v in vecs])


# resolutions -----------------------------------------------------------------

@dataclass
class Resolution:
    arrangement: Arrangement
    data: ResolutionData
    degree_shift: int  # element degree = coefficient degree + degree_shift
    module: GradedSubmodule
    chern: Optional[List[int]] = None  # Chern classes matching the Hilbert polynomial

    @property
    def betti(self) -> BettiTable:
        return self.data.betti.shifted(-self.degree_shift)

    @property
    def pdim(self) -> int:
        return self.betti.pdim

    @property
    def hilbert(self) -> Dict[int, int]:
        s = self.degree_shift
        return {d - s: v for d, v in self.data.hilbert.items() if d - s >= 0}

    @property
    def generator_degrees(self) -> List[int]:
        return [e - self.degree_shift for e, _ in self.data.steps[0]]

    def presentation(self) -> GradedMatrix:
        """Map F1 -> F0 of the resolution, rows indexed by generators."""
        if len(self.data.steps) < 2:
            ent = [[] for _ in self.data.steps[0]]
            return GradedMatrix(ent, self.generator_degrees, [], self.data.nv)
        ent = self.data.matrix(1)
        s = self.degree_shift
        return GradedMatrix(ent, [e - s for e, _ in self.data.steps[0]],
                            [e - s for e, _ in self.data.steps[1]], self.data.nv)

    def generators(self) -> List[List[HPoly]]:
        """Minimal generators as derivation tuples in D0(A)."""
        out = []
        for e, vec in self.data.steps[0]:
            if isinstance(self.module, DeconedModule):
                out.append(euler_corrected(self.arrangement, self.module.to_derivation(e, vec)))
            else:
                amb = self.module.ambient
                out.append(amb.split(e, vec))
        return out


_CACHE: Dict[Tuple[str, int], Resolution] = {}


def default_cutoff(A: Arrangement) -> int:
    if A.ambient_dim == 4:
        return 12
    return A.n


def _fit_chern(hilbert: Dict[int, int], chern: List[int], cutoff: int) -> List[int]:
    """Check the Hilbert function near the cutoff against Riemann-Roch.

    On P^2 all classes are given. On P^3 c3 is not forced for reflexive
    sheaves, so it is fitted at one degree and checked on three more.
    Returns the classes used.
    """
    rank = len(chern) - 1
    degs = [cutoff - 2, cutoff - 1, cutoff]
    if rank == 3:
        base = euler_characteristic(chern[:3] + [0], 3, degs[0])
        unit = euler_characteristic(chern[:3] + [1], 3, degs[0]) - base
        c3 = Fraction(hilbert.get(degs[0], 0) - base, unit)
        if c3.denominator != 1:
            raise CutoffTooSmall("cutoff too small")
        chern = chern[:3] + [int(c3)]
        degs = degs[1:] + [cutoff - 3]
    for d in degs:
        if hilbert.get(d, 0) != euler_characteristic(chern, rank, d):
            raise CutoffTooSmall("cutoff too small")
    return list(chern)


def _check_stabilization(A: Arrangement, hilbert: Dict[int, int], cutoff: int) -> List[int]:
    return _fit_chern(hilbert, chern_polynomial(A, 0), cutoff)


def minimal_resolution(A: Arrangement, cutoff: Optional[int] = None) -> Resolution:
    cutoff = default_cutoff(A) if cutoff is None else cutoff
    key = (A.canonical_key(), cutoff)
    if key in _CACHE:
        return _CACHE[key]
    nv = A.ambient_dim
    z = (1,) + (0,) * (nv - 1)
    if z in A.forms:
        M = DeconedModule(A)
        shift = 0
    else:
        M = jacobian_module(A)
        shift = A.n - 1
    data = resolve(M, cutoff + shift)
    res = Resolution(A, data, shift, M)
    res.chern = _check_stabilization(A, res.hilbert, cutoff)
    _CACHE[key] = res
    return res


def clear_cache():
    """Drop in-process resolutions, primal and dual."""
    _CACHE.clear()
    _DUAL_CACHE.clear()


def saito_determinant(A: Arrangement, gens: Sequence[Sequence[HPoly]]) -> HPoly:
    """det of the matrix with rows theta_E and the given generators."""
    import sympy
    nv = A.ambient_dim
    names = sympy.symbols(" ".join(["z", "x", "y", "w"][:nv]))

    def to_sym(p: HPoly):
        return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([v ** a for v, a in zip(names, e)])
                   for e, c in p.coeffs.items()) if p.coeffs else sympy.Integer(0)

    rows = [[names[i] for i in range(nv)]] + [[to_sym(a) for a in g] for g in gens]
    det = sympy.expand(sympy.Matrix(rows).det(method="berkowitz"))
    poly = sympy.Poly(det, *names)
    coeffs = {}
    for mono, c in poly.terms():
        coeffs[tuple(mono)] = Fraction(int(c.p), int(c.q))
    if not coeffs:
        return HPoly.zero(nv, 0)
    return HPoly(nv, sum(next(iter(coeffs))), coeffs)


def is_free(A: Arrangement, cutoff: Optional[int] = None):
    """(True, exponents) when D0(A) is free, else (False, None).

    Freeness needs m = dim - 1 generators and no syzygies; it is confirmed by
    Saito's criterion: with the Euler derivation added the determinant is a
    nonzero multiple of the defining form.
    """
    res = minimal_resolution(A, cutoff)
    m = A.ambient_dim - 1
    degs = sorted(res.generator_degrees)
    if res.pdim != 0 or len(degs) != m:
        return False, None
    det = saito_determinant(A, res.generators())
    f = A.defining_polynomial()
    if det.is_zero() or det.degree != f.degree:
        return False, None
    q, r = det.divmod(f)
    if r.coeffs or q.degree != 0:
        return False, None
    return True, degs


def betti_table(A: Arrangement, cutoff: Optional[int] = None) -> BettiTable:
    return minimal_resolution(A, cutoff).betti


# dual module ---------------------------------------------------------------------

class DualResolution:
    """Resolution of the sections of T_A^dual(shift) = ker(M^T) for a presentation M."""

    def __init__(self, A: Arrangement, shift: int, cutoff: Optional[int] = None):
        base = minimal_resolution(A)
        P = base.presentation()
        nv = A.ambient_dim
        rows, cols = P.shape
        e = P.row_twists
        f = P.col_twists
        target = FreeModule(nv, [-fl - shift for fl in f])
        gens = []
        for i in range(rows):
            deg = -e[i] - shift
            vec: List[int] = []
            for l in range(cols):
                poly = P.entries[i][l]
                a = deg - target.twists[l]
                if a < 0:
                    continue
                dense = poly.to_dense() if poly.coeffs else [0] * num_monomials(nv, a)
                if poly.coeffs and poly.degree != a:
                    raise AssertionError("presentation degree mismatch")
                vec.extend(int(v) for v in dense)
            gens.append((deg, vec))
        # kernel of M^T: the map F0^dual -> F1^dual
        self.module = KernelModule(target, gens)
        self.cutoff = default_dual_cutoff(A, shift) if cutoff is None else cutoff
        self.data = resolve(self.module, self.cutoff)
        self.shift = shift
        self.arrangement = A
        self.chern = _fit_chern(self.data.hilbert,
                                twist_chern(dual_chern(base.chern), nv - 1, shift), self.cutoff)

    @property
    def betti(self) -> BettiTable:
        return self.data.betti

    def presentation(self) -> GradedMatrix:
        if len(self.data.steps) < 2:
            raise ValueError("dual module is free")
        ent = self.data.matrix(1)
        return GradedMatrix(ent, [e for e, _ in self.data.steps[0]], [e for e, _ in self.data.steps[1]],
                            self.data.nv)


def default_dual_cutoff(A: Arrangement, shift: int) -> int:
    """Moves the primal window along with the twist; shift = -eta(k+2j+1) keeps it."""
    if A.params is not None:
        _, m, j, k = A.params
        ref = (m + 1) * (k + 2 * j + 1)
    else:
        ref = A.n - 1
    return default_cutoff(A) - shift - ref


_DUAL_CACHE: Dict[Tuple[str, int, int], DualResolution] = {}


def dual_resolution(A: Arrangement, shift: int, cutoff: Optional[int] = None) -> DualResolution:
    key = (A.canonical_key(), shift, default_dual_cutoff(A, shift) if cutoff is None else cutoff)
    if key not in _DUAL_CACHE:
        _DUAL_CACHE[key] = DualResolution(A, shift, cutoff)
    return _DUAL_CACHE[key]


def dual_module_betti(A: Arrangement, shift: int, cutoff: Optional[int] = None) -> BettiTable:
    """Betti table of T_A^dual twisted by ``shift``."""
    return dual_resolution(A, shift, cutoff).betti
