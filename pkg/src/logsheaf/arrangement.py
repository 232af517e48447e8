"""Projective arrangements: multiple points, restriction profiles, the
intersection lattice, characteristic polynomials, Chern data and the nested
chains of line arrangements used to build the A2 deformations step by step."""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .core.geometry import Form, cross, dot, kernel_lattice, normalize_form
from .core.poly import HPoly, product
from .rootsys import DeformationParams


class Arrangement:
    """Ordered list of pairwise distinct hyperplanes with descriptive labels.

    ``params`` is ``(family, m, j, k)`` for deformation arrangements and None
    otherwise.  Ambient dimension 2 is allowed for restrictions of line
    arrangements.
    """

    def __init__(self, ambient_dim: int, forms: Sequence[Sequence], labels: Optional[Sequence[str]] = None,
                 params: Optional[tuple] = None):
        if ambient_dim not in (2, 3, 4):
            raise ValueError("ambient dimension must be 2, 3 or 4")
        normed = [normalize_form(f) for f in forms]
        if any(len(f) != ambient_dim for f in normed):
            raise ValueError("form length does not match ambient dimension")
        if len(set(normed)) != len(normed):
            raise ValueError("hyperplanes must be pairwise distinct")
        self.ambient_dim = ambient_dim
        self.forms: Tuple[Form, ...] = tuple(normed)
        self.labels = tuple(labels) if labels is not None else tuple(f"H{i}" for i in range(len(normed)))
        if len(self.labels) != len(self.forms):
            raise ValueError("one label per hyperplane")
        self.params = params

    def __len__(self):
        return len(self.forms)

    @property
    def n(self) -> int:
        return len(self.forms)

    @property
    def deformation(self) -> Optional[DeformationParams]:
        if self.params is None:
            return None
        return DeformationParams(self.params[2], self.params[3])

    def index(self, form: Sequence) -> int:
        return self.forms.index(normalize_form(form))

    def __contains__(self, form) -> bool:
        return normalize_form(form) in self.forms

    def add(self, forms: Sequence[Sequence], labels: Sequence[str], params=None) -> "Arrangement":
        return Arrangement(self.ambient_dim, list(self.forms) + list(forms),
                           list(self.labels) + list(labels), params=params)

    def delete(self, i: int) -> "Arrangement":
        keep = [t for t in range(self.n) if t != i]
        return Arrangement(self.ambient_dim, [self.forms[t] for t in keep], [self.labels[t] for t in keep])

    def restrict(self, i: int) -> "Arrangement":
        """The arrangement induced on hyperplane i, in lattice coordinates."""
        basis = kernel_lattice(self.forms[i])
        seen = {}
        for t, f in enumerate(self.forms):
            if t == i:
                continue
            g = normalize_form([dot(f, b) for b in basis])
            seen.setdefault(g, self.labels[t])
        return Arrangement(self.ambient_dim - 1, list(seen), list(seen.values()))

    def defining_polynomial(self) -> HPoly:
        return product((HPoly.linear(f) for f in self.forms), self.ambient_dim)

    def canonical_key(self) -> str:
        if getattr(self, "_key", None) is None:
            self._key = self._compute_key()
        return self._key

    def _compute_key(self) -> str:
        payload = json.dumps({"d": self.ambient_dim, "forms": sorted(self.forms)}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim,
                "forms": [[str(c) for c in f] for f in self.forms],
                "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> "Arrangement":
        return cls(int(data["ambient_dim"]), [[Fraction(c) for c in f] for f in data["forms"]],
                   data.get("labels"))

    def __repr__(self):
        return f"Arrangement(dim={self.ambient_dim}, n={self.n})"


# multiple points ------------------------------------------------------------

def multiple_points(A: Arrangement) -> Dict[Form, FrozenSet[int]]:
    """Intersection points of a line arrangement with the indices of lines through them."""
    if A.ambient_dim != 3:
        raise ValueError("multiple points are defined here for line arrangements")
    pts: Dict[Form, set] = {}
    for a in range(A.n):
        for b in range(a + 1, A.n):
            p = normalize_form(cross(A.forms[a], A.forms[b]))
            s = pts.setdefault(p, set())
            s.add(a)
            s.add(b)
    return {p: frozenset(s) for p, s in pts.items()}


@dataclass(frozen=True)
class RestrictionProfile:
    h: int
    counts: Dict[int, int]
    t: int

    def to_json(self):
        return {"h": self.h, "counts": {str(i): c for i, c in sorted(self.counts.items())}, "t": self.t}


def _points_on(A: Arrangement, form: Form, skip: Optional[int] = None) -> Dict[Form, int]:
    """Points where the other lines meet the line, with how many lines of A pass."""
    pts: Dict[Form, int] = Counter()
    for t, f in enumerate(A.forms):
        if t == skip:
            continue
        pts[normalize_form(cross(form, f))] += 1
    return pts


def restriction_profile(A: Arrangement, i: int) -> RestrictionProfile:
    if A.ambient_dim != 3:
        raise ValueError("restriction profiles are defined for line arrangements")
    if not 0 <= i < A.n:
        raise IndexError("hyperplane index out of range")
    pts = _points_on(A, A.forms[i], skip=i)
    counts = Counter(c + 1 for c in pts.values())
    h = len(pts)
    t = sum((mult - 2) * c for mult, c in counts.items() if mult >= 3)
    if t != A.n - 1 - h:
        raise AssertionError("restriction count identity violated")
    return RestrictionProfile(h, dict(sorted(counts.items())), t)


def line_meet_count(A: Arrangement, form: Sequence) -> int:
    """|{L cap K : K in A}| for a line L, in A or not (L itself excluded)."""
    f = normalize_form(form)
    skip = A.forms.index(f) if f in A.forms else None
    return len(_points_on(A, f, skip=skip))


# intersection lattice --------------------------------------------------------

def _solve_nullspace(rows: List[Form], dim: int) -> List[Tuple[Fraction, ...]]:
    """Basis of the common zero set of the given forms (small dense elimination)."""
    M = [[Fraction(v) for v in r] for r in rows]
    piv_cols = []
    rank = 0
    for c in range(dim):
        p = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        pv = M[rank][c]
        M[rank] = [v / pv for v in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        piv_cols.append(c)
        rank += 1
    free = [c for c in range(dim) if c not in piv_cols]
    basis = []
    for f in free:
        v = [Fraction(0)] * dim
        v[f] = Fraction(1)
        for i, c in enumerate(piv_cols):
            v[c] = -M[i][f]
        basis.append(tuple(v))
    return basis


def intersection_lattice(A: Arrangement) -> Dict[FrozenSet[int], int]:
    """Every flat, keyed by the set of hyperplanes containing it, mapped to its rank."""
    dim = A.ambient_dim
    forms = A.forms
    flats: Dict[FrozenSet[int], int] = {frozenset(): 0}
    level: Dict[FrozenSet[int], List] = {frozenset(): None}
    for r in range(1, dim + 1):
        nxt: Dict[FrozenSet[int], List] = {}
        for S in level:
            gens = [forms[i] for i in sorted(S)]
            covered = set(S)
            for i in range(A.n):
                if i in covered:
                    continue
                if r == 1:
                    key = frozenset([i])
                else:
                    basis = [normalize_form(v) for v in _solve_nullspace(gens + [forms[i]], dim)]
                    key = frozenset(t for t, f in enumerate(forms)
                                    if all(dot(f, v) == 0 for v in basis))
                covered |= key
                nxt[key] = None
        if not nxt:
            break
        for key in nxt:
            flats[key] = r
        level = nxt
    return flats


def mobius_values(flats: Dict[FrozenSet[int], int]) -> Dict[FrozenSet[int], int]:
    order = sorted(flats, key=lambda s: flats[s])
    mu: Dict[FrozenSet[int], int] = {}
    for X in order:
        if not X:
            mu[X] = 1
            continue
        mu[X] = -sum(mu[Y] for Y in mu if flats[Y] < flats[X] and Y <= X)
    return mu


_CHAR_CACHE: Dict[str, Tuple[int, ...]] = {}


def char_poly(A: Arrangement) -> List[int]:
    """Coefficients of chi_A(t), highest degree first (degree = ambient dimension)."""
    key = A.canonical_key()
    if key not in _CHAR_CACHE:
        _CHAR_CACHE[key] = tuple(_char_poly(A))
    return list(_CHAR_CACHE[key])


def _char_poly(A: Arrangement) -> List[int]:
    dim = A.ambient_dim
    flats = intersection_lattice(A)
    mu = mobius_values(flats)
    coeffs = [0] * (dim + 1)
    for X, r in flats.items():
        coeffs[r] += mu[X]  # t^(dim - r) sits at position r
    return coeffs


def poly_divide_linear_root(coeffs: Sequence[int], root: int) -> List[int]:
    """Synthetic division by (t - root); raises if the remainder is nonzero."""
    out = []
    acc = 0
    for c in coeffs:
        acc = acc * root + c
        out.append(acc)
    if out[-1] != 0:
        raise ValueError("polynomial not divisible by (t - root)")
    return out[:-1]


def reduced_char_poly(A: Arrangement) -> List[int]:
    return poly_divide_linear_root(char_poly(A), 1)


def chern_polynomial(A: Arrangement, twist: int = 0) -> List[int]:
    """[1, c1, ..., c_m] of the logarithmic bundle twisted by ``twist``.

    Untwisted, c_i = (-1)^i b_i where chi/(t-1) = sum (-1)^i b_i t^(m-i).
    Twisting a rank-m bundle uses c(E(a)) = sum_i c_i (1 + a h)^(m-i).
    """
    red = reduced_char_poly(A)
    m = len(red) - 1
    return twist_chern(red, m, twist)


def twist_chern(chern: Sequence[int], rank: int, twist: int) -> List[int]:
    """c(E(a)) = sum_i c_i(E) (1 + a h)^(rank - i), truncated at the top degree."""
    m = len(chern) - 1
    out = [0] * (m + 1)
    for i, ci in enumerate(chern):
        for r in range(0, rank - i + 1):
            if i + r <= m:
                out[i + r] += ci * comb(rank - i, r) * twist ** r
    return out


def dual_chern(chern: Sequence[int]) -> List[int]:
    return [(-1) ** i * c for i, c in enumerate(chern)]


def chern_classes(A: Arrangement, twist: int = 0) -> Tuple[int, int]:
    if A.ambient_dim != 3:
        raise ValueError("chern_classes expects a line arrangement")
    red = reduced_char_poly(A)
    b1, b2 = -red[1], red[2]
    return -b1 + 2 * twist, b2 - b1 * twist + twist * twist


def euler_characteristic(chern: Sequence[int], rank: int, d: int) -> Fraction:
    """Riemann-Roch on P^m, m = len(chern)-1: chi(E(d)) from Chern classes of E.

    Power sums of the Chern roots come from Newton's identities, and
    chi(O(a)) = C(a + m, m) is expanded as a polynomial in a.
    """
    m = len(chern) - 1
    e = [Fraction(c) for c in chern]
    p = [Fraction(rank)]
    for r in range(1, m + 1):
        val = Fraction(0)
        for i in range(1, r):
            val += (-1) ** (i - 1) * e[i] * p[r - i]
        val += (-1) ** (r - 1) * r * e[r]
        p.append(val)
    # coefficients of prod_{s=1..m} (a + d + s) / m! as a polynomial in a
    poly = [Fraction(1)]
    for s in range(1, m + 1):
        shift = d + s
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i] += c * shift
            nxt[i + 1] += c
        poly = nxt
    from math import factorial
    return sum((c * p[i] for i, c in enumerate(poly)), Fraction(0)) / factorial(m)


def hilbert_polynomial_value(A: Arrangement, d: int) -> int:
    """chi(T_A(d)) by Riemann-Roch from the characteristic polynomial."""
    chern = chern_polynomial(A, 0)
    val = euler_characteristic(chern, A.ambient_dim - 1, d)
    if val.denominator != 1:
        raise AssertionError("non-integral Euler characteristic")
    return int(val)


def riemann_hypothesis_holds(A: Arrangement) -> Tuple[bool, Fraction]:
    """All roots of chi/(t-1) share the real part b1/m.  Exact check via sympy."""
    import sympy
    red = reduced_char_poly(A)
    m = len(red) - 1
    c = Fraction(-red[1], m)
    t, u = sympy.symbols("t u")
    q = sympy.Poly(sum(sympy.Integer(a) * t ** (m - i) for i, a in enumerate(red)), t)
    shifted = sympy.Poly(sympy.expand(q.as_expr().subs(t, u + sympy.Rational(c.numerator, c.denominator))), u)
    coeffs = shifted.all_coeffs()[::-1]  # ascending powers of u
    # purely imaginary roots: terms of one parity only, and in v = -u^2 all roots real >= 0
    if any(coeffs[i] != 0 for i in range(len(coeffs)) if (i - m) % 2):
        return False, c
    v = sympy.symbols("v")
    even = sum(coeffs[i] * (-v) ** ((i - (m % 2)) // 2) for i in range(m % 2, len(coeffs), 2))
    R = sympy.Poly(even, v)
    if R.degree() <= 0:
        return True, c
    real_nonneg = R.count_roots(0, None)
    return real_nonneg == R.degree(), c


# chains ------------------------------------------------------------------------

def diagonal_form(k: int, i: int) -> Form:
    """H_i : x + y = (k - i + 1) z."""
    return normalize_form((-(k - i + 1), 1, 1))


def grid_arrangement(p: DeformationParams) -> Arrangement:
    forms = [(1, 0, 0)]
    labels = ["infinity"]
    for s in p.shifts:
        forms.append((-s, 1, 0))
        labels.append(f"x={s}z")
    for s in p.shifts:
        forms.append((-s, 0, 1))
        labels.append(f"y={s}z")
    return Arrangement(3, forms, labels)


def build_inner_chain(p: DeformationParams) -> List[Arrangement]:
    """A_0 (grid), then A_i = A_0 plus H_1..H_i for i up to k+j+1."""
    chain = [grid_arrangement(p)]
    for i in range(1, p.k + p.j + 2):
        s = p.k - i + 1
        params = ("A", 2, p.j, p.k) if i == p.k + p.j + 1 and p.j == 0 else None
        chain.append(chain[-1].add([diagonal_form(p.k, i)], [f"x+y={s}z"], params=params))
    return chain


def build_outer_chain(p: DeformationParams, extended: bool = False) -> List[Arrangement]:
    """B_i = A_{k+j+1} plus H_0, ..., H_{1-i}; i = 1..j, or up to k+j-2 when extended."""
    if extended and p.k + p.j < 3:
        raise ValueError("extended outer chain needs k + j >= 3")
    top = p.k + p.j - 2 if extended else p.j
    cur = build_inner_chain(p)[-1]
    chain = []
    for i in range(1, top + 1):
        s = p.k + i
        params = ("A", 2, p.j, p.k) if i == p.j else None
        cur = cur.add([diagonal_form(p.k, 1 - i)], [f"x+y={s}z"], params=params)
        chain.append(cur)
    return chain
