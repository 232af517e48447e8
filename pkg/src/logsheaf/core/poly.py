"""Homogeneous polynomials in 2 to 4 variables with exact rational coefficients.

Monomials are exponent tuples.  Within one degree they are ordered
lexicographically with the first variable largest; since every polynomial here
is homogeneous this is the graded lexicographic order.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm, gcd
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import flint
import numpy as np

from .scalar import to_scalar

Exp = Tuple[int, ...]

VAR_NAMES = {2: ("s", "t"), 3: ("z", "x", "y"), 4: ("z", "x", "y", "w")}


@lru_cache(maxsize=None)
def monomials(nv: int, d: int) -> Tuple[Exp, ...]:
    """All exponent vectors of total degree d in nv variables, largest first."""
    if d < 0:
        return ()
    if nv == 1:
        return ((d,),)
    out = []
    for a in range(d, -1, -1):
        for rest in monomials(nv - 1, d - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nv: int, d: int) -> Dict[Exp, int]:
    return {e: i for i, e in enumerate(monomials(nv, d))}


def num_monomials(nv: int, d: int) -> int:
    if d < 0:
        return 0
    from math import comb
    return comb(d + nv - 1, nv - 1)


@lru_cache(maxsize=None)
def mult_table(nv: int, d1: int, d2: int) -> np.ndarray:
    """table[i, j] = index of (mono_i of degree d1) * (mono_j of degree d2)."""
    idx = monomial_index(nv, d1 + d2)
    m1 = monomials(nv, d1)
    m2 = monomials(nv, d2)
    table = np.empty((len(m1), len(m2)), dtype=np.int64)
    for i, a in enumerate(m1):
        for j, b in enumerate(m2):
            table[i, j] = idx[tuple(x + y for x, y in zip(a, b))]
    table.flags.writeable = False
    return table


class HPoly:
    """A homogeneous polynomial.  Immutable once built."""

    __slots__ = ("num_vars", "degree", "coeffs", "_hash")

    def __init__(self, num_vars: int, degree: int, coeffs: Mapping[Exp, object] = None):
        if num_vars < 1:
            raise ValueError("need at least one variable")
        if degree < 0:
            raise ValueError("degree must be non-negative")
        clean: Dict[Exp, Fraction] = {}
        for e, c in (coeffs or {}).items():
            e = tuple(int(a) for a in e)
            if len(e) != num_vars or sum(e) != degree or min(e) < 0:
                raise ValueError(f"exponent {e} does not fit degree {degree} in {num_vars} vars")
            c = to_scalar(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.num_vars = num_vars
        self.degree = degree
        self.coeffs = clean
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, num_vars: int, degree: int = 0) -> "HPoly":
        return cls(num_vars, degree, {})

    @classmethod
    def constant(cls, num_vars: int, c=1) -> "HPoly":
        return cls(num_vars, 0, {(0,) * num_vars: c})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "HPoly":
        nv = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * nv
            e[i] = 1
            terms[tuple(e)] = c
        return cls(nv, 1, terms)

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "HPoly":
        e = [0] * num_vars
        e[i] = 1
        return cls(num_vars, 1, {tuple(e): 1})

    @classmethod
    def from_dense(cls, num_vars: int, degree: int, values: Iterable) -> "HPoly":
        mons = monomials(num_vars, degree)
        vals = list(values)
        if len(vals) != len(mons):
            raise ValueError("dense vector has wrong length")
        return cls(num_vars, degree, {m: v for m, v in zip(mons, vals) if v})

    def to_dense(self) -> List[Fraction]:
        out = [Fraction(0)] * num_monomials(self.num_vars, self.degree)
        idx = monomial_index(self.num_vars, self.degree)
        for e, c in self.coeffs.items():
            out[idx[e]] = c
        return out

    # basic queries
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def leading_term(self) -> Tuple[Exp, Fraction]:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.coeffs)
        return e, self.coeffs[e]

    def linear_coefficients(self) -> List[Fraction]:
        if self.degree != 1 and self.coeffs:
            raise ValueError("not a linear form")
        out = [Fraction(0)] * self.num_vars
        for e, c in self.coeffs.items():
            out[e.index(1)] = c
        return out

    def __eq__(self, other):
        if not isinstance(other, HPoly):
            return NotImplemented
        if self.num_vars != other.num_vars:
            return False
        if not self.coeffs and not other.coeffs:
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, self.degree if self.coeffs else 0,
                               frozenset(self.coeffs.items())))
        return self._hash

    # arithmetic
    def _check_compatible(self, other: "HPoly"):
        if self.num_vars != other.num_vars:
            raise ValueError("variable count mismatch")
        if self.coeffs and other.coeffs and self.degree != other.degree:
            raise ValueError("cannot add forms of different degrees")

    def __add__(self, other):
        if not isinstance(other, HPoly):
            return NotImplemented
        self._check_compatible(other)
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return HPoly(self.num_vars, self.degree, out)

    def __neg__(self):
        return HPoly(self.num_vars, self.degree, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HPoly):
            if self.num_vars != other.num_vars:
                raise ValueError("variable count mismatch")
            out: Dict[Exp, Fraction] = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
            return HPoly(self.num_vars, self.degree + other.degree, out)
        c = to_scalar(other)
        return HPoly(self.num_vars, self.degree, {e: c * v for e, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = HPoly.constant(self.num_vars)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self, i: int) -> "HPoly":
        if self.degree == 0:
            return HPoly.zero(self.num_vars, 0)
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return HPoly(self.num_vars, self.degree - 1, out)

    def evaluate(self, point: Sequence):
        total = Fraction(0)
        pt = [to_scalar(p) for p in point]
        for e, c in self.coeffs.items():
            term = c
            for p, a in zip(pt, e):
                if a:
                    term *= p ** a
            total += term
        return total

    def substitute(self, images: Sequence["HPoly"]) -> "HPoly":
        """Replace variable i by the linear form images[i]."""
        if len(images) != self.num_vars:
            raise ValueError("need one image per variable")
        nv = images[0].num_vars
        powers: List[List[HPoly]] = []
        for img in images:
            pw = [HPoly.constant(nv)]
            powers.append(pw)
        out = HPoly.zero(nv, self.degree)
        for e, c in self.coeffs.items():
            term = HPoly.constant(nv, c)
            for i, a in enumerate(e):
                pw = powers[i]
                while len(pw) <= a:
                    pw.append(pw[-1] * images[i])
                term = term * pw[a]
            out = out + term if term.coeffs else out
        if not out.coeffs:
            return HPoly.zero(nv, self.degree)
        return out

    def divmod(self, divisor: "HPoly") -> Tuple["HPoly", "HPoly"]:
        """Division by one form; the remainder is zero iff the division is exact."""
        if not divisor.coeffs:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.coeffs:
            return HPoly.zero(self.num_vars, max(self.degree - divisor.degree, 0)), self
        qd = self.degree - divisor.degree
        if qd < 0:
            return HPoly.zero(self.num_vars, 0), self
        lead, lc = divisor.leading_term()
        rest = dict(self.coeffs)
        quot: Dict[Exp, Fraction] = {}
        rem: Dict[Exp, Fraction] = {}
        while rest:
            e = max(rest)
            c = rest.pop(e)
            if all(a >= b for a, b in zip(e, lead)):
                qe = tuple(a - b for a, b in zip(e, lead))
                qc = c / lc
                quot[qe] = quot.get(qe, 0) + qc
                for de, dc in divisor.coeffs.items():
                    if de == lead:
                        continue
                    te = tuple(a + b for a, b in zip(qe, de))
                    v = rest.get(te, 0) - qc * dc
                    if v:
                        rest[te] = v
                    else:
                        rest.pop(te, None)
            else:
                rem[e] = c
        return HPoly(self.num_vars, qd, quot), HPoly(self.num_vars, self.degree, rem)

    def exact_divide(self, divisor: "HPoly") -> "HPoly":
        q, r = self.divmod(divisor)
        if r.coeffs:
            raise ValueError("division is not exact")
        return q

    def content_normalized(self) -> "HPoly":
        """Scaled to a primitive integer form with positive leading coefficient."""
        if not self.coeffs:
            return self
        den = lcm(*(c.denominator for c in self.coeffs.values()))
        nums = [int(c * den) for c in self.coeffs.values()]
        g = 0
        for v in nums:
            g = gcd(g, v)
        scale = Fraction(den, g)
        if self.leading_term()[1] < 0:
            scale = -scale
        return self * scale

    def monic(self) -> "HPoly":
        if not self.coeffs:
            raise ValueError("zero polynomial cannot be made monic")
        return self * (1 / self.leading_term()[1])

    # formatting
    def to_string(self, names: Sequence[str] = None) -> str:
        names = names or VAR_NAMES.get(self.num_vars) or tuple(f"x{i}" for i in range(self.num_vars))
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
            mag = abs(c)
            cs = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if mono:
                body = mono if mag == 1 else f"{cs}*{mono}"
            else:
                body = cs
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("-" if c < 0 else "+") + body)
        return "".join(parts)

    def __repr__(self):
        return f"HPoly({self.to_string()})"


def _split_t_power(f: HPoly) -> Tuple[int, flint.fmpq_poly]:
    """Write f(s,t) = t^a g(s,t) with t not dividing g; return a and g(s,1)."""
    a = min(e[1] for e in f.coeffs)
    g = [Fraction(0)] * (f.degree - a + 1)
    for (i, _j), c in f.coeffs.items():
        g[i] = c
    return a, flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in g])


def binary_gcd(fs: Sequence[HPoly]) -> HPoly:
    """Monic gcd of binary forms (leading coefficient of the top power of s is 1)."""
    nonzero = [f for f in fs if f.coeffs]
    if not nonzero:
        raise ValueError("zero gcd undefined")
    if any(f.num_vars != 2 for f in nonzero):
        raise ValueError("binary_gcd needs forms in two variables")
    tpow = None
    g = None
    for f in nonzero:
        a, u = _split_t_power(f)
        tpow = a if tpow is None else min(tpow, a)
        g = u if g is None else g.gcd(u)
    deg = g.degree()
    coeffs = [Fraction(int(c.p), int(c.q)) for c in g.coeffs()]
    lc = coeffs[deg]
    terms = {(i, deg - i + tpow): c / lc for i, c in enumerate(coeffs) if c}
    return HPoly(2, deg + tpow, terms)


def product(polys: Iterable[HPoly], num_vars: int) -> HPoly:
    out = HPoly.constant(num_vars)
    for p in polys:
        out = out * p
    return out
