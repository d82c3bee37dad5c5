"""Exact arithmetic in the character ring R(T) = Z[X(T)].

Elements are finitely supported maps from ambient exponent vectors to
nonzero coefficients. Coefficients are Python ints ("integers") or
``Fraction`` ("rationals", the scalar extension used when |W| must be
inverted).
"""
from __future__ import annotations

import json
import random
import operator
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .lattice import RootDatum, Weight, WeylElement

Coeff = int | Fraction


class LaurentError(ValueError):
    pass


class NotDivisibleError(LaurentError):
    pass


# unrolled exponent addition for small ranks; it dominates multiplication cost
_ADDERS = {
    1: lambda a, b: (a[0] + b[0],),
    2: lambda a, b: (a[0] + b[0], a[1] + b[1]),
    3: lambda a, b: (a[0] + b[0], a[1] + b[1], a[2] + b[2]),
    4: lambda a, b: (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]),
}


def _add_exponents(a, b):
    return tuple(map(operator.add, a, b))


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class Laurent:
    """An element of R(T) (or R(T) tensor Q)."""

    __slots__ = ("datum", "terms", "scalar_ring", "_hash")

    def __init__(self, datum: RootDatum, terms: Mapping[Weight, Coeff] | None = None, scalar_ring: str | None = None):
        self.datum = datum
        clean: dict[Weight, Coeff] = {}
        rational = False
        if terms:
            for e, c in terms.items():
                if c:
                    if isinstance(c, Fraction):
                        rational = True
                    clean[tuple(e)] = c
        if scalar_ring is None:
            scalar_ring = "rationals" if rational else "integers"
        elif scalar_ring == "integers":
            for c in clean.values():
                if isinstance(c, Fraction) and c.denominator != 1:
                    raise LaurentError("non-integral coefficient in an integer element")
        elif scalar_ring != "rationals":
            raise LaurentError(f"unknown scalar ring {scalar_ring!r}")
        if scalar_ring == "integers":
            clean = {e: int(c) for e, c in clean.items()}
        else:
            clean = {e: _norm(Fraction(c)) for e, c in clean.items()}
        self.terms = clean
        self.scalar_ring = scalar_ring
        self._hash = None

    @classmethod
    def _raw(cls, datum, terms, scalar_ring):
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.datum = datum
        obj.terms = terms
        obj.scalar_ring = scalar_ring
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, datum: RootDatum, scalar_ring: str = "integers") -> Laurent:
        return cls._raw(datum, {}, scalar_ring)

    @classmethod
    def one(cls, datum: RootDatum, scalar_ring: str = "integers") -> Laurent:
        return cls.monomial(datum, datum.zero_weight(), 1, scalar_ring)

    @classmethod
    def monomial(cls, datum: RootDatum, weight: Sequence[int], coeff: Coeff = 1, scalar_ring: str | None = None) -> Laurent:
        weight = tuple(int(x) for x in weight)
        if len(weight) != datum.dim:
            raise LaurentError(f"weight {weight} has wrong length for {datum}")
        return cls(datum, {weight: coeff}, scalar_ring)

    @classmethod
    def constant(cls, datum: RootDatum, c: Coeff, scalar_ring: str | None = None) -> Laurent:
        return cls.monomial(datum, datum.zero_weight(), c, scalar_ring)

    # coercion helpers -------------------------------------------------
    def _coerce(self, other) -> Laurent:
        if isinstance(other, Laurent):
            if other.datum is not self.datum and other.datum != self.datum:
                raise LaurentError("mismatched root data")
            return other
        if isinstance(other, (int, Fraction)):
            return Laurent.constant(self.datum, other)
        return NotImplemented

    @staticmethod
    def _ring(a: Laurent, b: Laurent) -> str:
        return "rationals" if "rationals" in (a.scalar_ring, b.scalar_ring) else "integers"

    def to_rational(self) -> Laurent:
        return Laurent._raw(self.datum, dict(self.terms), "rationals")

    def with_datum(self, datum: RootDatum) -> Laurent:
        """The same exponent data viewed in another datum sharing the ambient lattice."""
        if datum.dim != self.datum.dim:
            raise LaurentError("ambient dimensions differ")
        return Laurent._raw(datum, self.terms, self.scalar_ring)

    # ring operations --------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = _norm(v)
            else:
                terms.pop(e, None)
        return Laurent._raw(self.datum, terms, Laurent._ring(self, other))

    __radd__ = __add__

    def __neg__(self):
        return Laurent._raw(self.datum, {e: -c for e, c in self.terms.items()}, self.scalar_ring)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        ring = Laurent._ring(self, other)
        add = _ADDERS.get(self.datum.dim, _add_exponents)
        out: dict[Weight, Coeff] = {}
        get = out.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = add(e1, e2)
                out[e] = get(e, 0) + c1 * c2
        if ring == "integers":
            out = {e: c for e, c in out.items() if c}
        else:
            out = {e: _norm(c) for e, c in out.items() if c}
        return Laurent._raw(self.datum, out, ring)

    __rmul__ = __mul__

    def scale(self, c: Coeff) -> Laurent:
        if not c:
            return Laurent.zero(self.datum, self.scalar_ring)
        ring = "rationals" if isinstance(c, Fraction) or self.scalar_ring == "rationals" else "integers"
        return Laurent._raw(self.datum, {e: _norm(v * c) for e, v in self.terms.items()}, ring)

    def shift(self, weight: Sequence[int], coeff: Coeff = 1) -> Laurent:
        """Multiply by ``coeff * e^weight``."""
        return Laurent._raw(
            self.datum,
            {tuple(x + y for x, y in zip(e, weight)): _norm(c * coeff) for e, c in self.terms.items()},
            "rationals" if isinstance(coeff, Fraction) and coeff.denominator != 1 else self.scalar_ring,
        )

    def __pow__(self, n: int) -> Laurent:
        if n < 0:
            if not self.is_monomial() or abs(next(iter(self.terms.values()))) != 1:
                raise LaurentError("only signed monomials are invertible")
            return self.unit_inverse() ** (-n)
        result = Laurent.one(self.datum, self.scalar_ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparisons ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.constant(self.datum, other)
        if not isinstance(other, Laurent):
            return NotImplemented
        return self.terms == other.terms and (self.datum is other.datum or self.datum == other.datum)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_unit(self) -> bool:
        """Units of Z[X] are the signed monomials (any nonzero monomial over Q)."""
        if len(self.terms) != 1:
            return False
        c = next(iter(self.terms.values()))
        return self.scalar_ring == "rationals" or abs(c) == 1

    def unit_inverse(self) -> Laurent:
        if not self.is_unit():
            raise LaurentError(f"{self} is not a unit")
        (e, c), = self.terms.items()
        inv = Fraction(1, 1) / c if self.scalar_ring == "rationals" else c
        return Laurent._raw(self.datum, {tuple(-x for x in e): _norm(inv)}, self.scalar_ring)

    def coefficient(self, weight: Sequence[int]) -> Coeff:
        return self.terms.get(tuple(weight), 0)

    def leading(self) -> tuple[Weight, Coeff]:
        e = max(self.terms)
        return e, self.terms[e]

    def in_lattice(self) -> bool:
        return all(self.datum.in_lattice(e) for e in self.terms)

    def evaluate_at_identity(self) -> Coeff:
        return _norm(sum(self.terms.values()))

    def is_invariant(self) -> bool:
        d = self.datum
        return all(self.reflect(a) == self for a in d.simple_roots)

    # Weyl actions -----------------------------------------------------
    def map_exponents(self, f) -> Laurent:
        out: dict[Weight, Coeff] = {}
        for e, c in self.terms.items():
            e2 = f(e)
            v = out.get(e2, 0) + c
            if v:
                out[e2] = v
            else:
                out.pop(e2)
        return Laurent._raw(self.datum, out, self.scalar_ring)

    def reflect(self, root: Weight) -> Laurent:
        """Apply the reflection s_root."""
        d = self.datum
        return self.map_exponents(lambda e: d.reflect(root, e))

    def weyl_act(self, w: WeylElement) -> Laurent:
        if w.length == 0:
            return self
        return self.map_exponents(w.act)

    def shifted_act(self, w: WeylElement) -> Laurent:
        """rho-shifted action: w . e^lam = e^{w(lam + rho) - rho}."""
        if w.length == 0:
            return self
        rho = self.datum.rho
        shift = tuple(x - y for x, y in zip(w.act(rho), rho))
        return self.map_exponents(lambda e: tuple(x + s for x, s in zip(w.act(e), shift)))

    # rendering --------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Weight, Coeff]]:
        return sorted(self.terms.items(), reverse=True)

    def render(self, var: str = "x") -> str:
        if not self.terms:
            return "0"
        rank_one = self.datum.dim == 1
        pieces = []
        for e, c in self.sorted_terms():
            if rank_one:
                mono = "" if e[0] == 0 else f"{var}^{e[0]}"
            else:
                mono = "" if not any(e) else "e[" + ",".join(map(str, e)) + "]"
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append(("- " if neg else "+ ") + body)
        return " ".join(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Laurent({self.render()})"

    def to_text(self) -> str:
        """Canonical serialization ``c * e[a1,...,an] + ...``."""
        if not self.terms:
            return "0"
        return " + ".join(f"{c} * e[{','.join(map(str, e))}]" for e, c in self.sorted_terms())

    def to_json(self) -> list[dict]:
        return [{"coeff": str(c), "exp": list(e)} for e, c in self.sorted_terms()]


# parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(e\[[^\]]*\])|([xy](?:\^-?\d+)?)|(.))")


def parse_laurent(datum: RootDatum, text: str, scalar_ring: str | None = None) -> Laurent:
    """Parse ``to_text`` output, the rank-one ``x^k`` rendering, or sums thereof."""
    text = text.strip()
    if text == "0":
        return Laurent.zero(datum, scalar_ring or "integers")
    terms: dict[Weight, Coeff] = {}
    pos = 0
    sign = 1
    coeff: Coeff | None = None
    saw = False

    def flush(weight):
        nonlocal coeff, sign
        c = sign * (coeff if coeff is not None else 1)
        terms[weight] = terms.get(weight, 0) + c
        coeff, sign = None, 1

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        num, ebr, xv, other = m.groups()
        if num is not None:
            coeff = Fraction(num) if "/" in num else int(num)
            # a bare constant is completed at the next '+'/'-' or end
            saw = True
        elif ebr is not None:
            inner = ebr[2:-1].strip()
            e = tuple(int(t) for t in inner.split(",")) if inner else ()
            if len(e) != datum.dim:
                raise LaurentError(f"exponent {e} has wrong length")
            flush(e)
            saw = False
        elif xv is not None:
            if datum.dim != 1:
                raise LaurentError("x^k notation is only valid for rank-one ambient lattices")
            k = int(xv[2:]) if "^" in xv else 1
            flush((k,))
            saw = False
        elif other == "*":
            continue
        elif other in "+-":
            if saw:
                flush(datum.zero_weight())
                saw = False
            if other == "-":
                sign = -sign
        elif other.strip():
            raise LaurentError(f"unexpected character {other!r} in {text!r}")
    if saw:
        flush(datum.zero_weight())
    return Laurent(datum, {e: c for e, c in terms.items() if c}, scalar_ring)


def laurent_from_json(datum: RootDatum, data: Iterable[Mapping], scalar_ring: str | None = None) -> Laurent:
    terms: dict[Weight, Coeff] = {}
    for t in data:
        c = Fraction(t["coeff"])
        e = tuple(int(x) for x in t["exp"])
        terms[e] = terms.get(e, 0) + c
    if scalar_ring is None:
        scalar_ring = "integers" if all(c.denominator == 1 for c in terms.values()) else "rationals"
    return Laurent(datum, terms, scalar_ring)


def dumps(u: Laurent) -> str:
    return json.dumps(u.to_json())


# constructors -----------------------------------------------------------

def monomial(datum: RootDatum, weight: Sequence[int], coeff: Coeff = 1) -> Laurent:
    return Laurent.monomial(datum, weight, coeff)


def weyl_act(w: WeylElement, u: Laurent) -> Laurent:
    return u.weyl_act(w)


def shifted_act(w: WeylElement, u: Laurent) -> Laurent:
    return u.shifted_act(w)


def is_invariant(u: Laurent) -> bool:
    return u.is_invariant()


def evaluate_at_identity(u: Laurent) -> Coeff:
    return u.evaluate_at_identity()


# division ---------------------------------------------------------------

def divide_binomial(u: Laurent, beta: Sequence[int]) -> Laurent | None:
    """Exact quotient ``u / (1 - e^{-beta})`` or None when not divisible.

    Terms are grouped into beta-strings; the quotient along a string is the
    sequence of partial sums, which terminates iff the string sums to zero.
    """
    beta = tuple(beta)
    p = next(i for i, b in enumerate(beta) if b)
    bp = beta[p]
    strings: dict[Weight, dict[int, Coeff]] = {}
    for e, c in u.terms.items():
        m = e[p] // bp
        base = tuple(x - m * b for x, b in zip(e, beta))
        # e = base + m*beta = base * t^{-m} with t = e^{-beta}
        strings.setdefault(base, {})[-m] = c
    out: dict[Weight, Coeff] = {}
    for base, s in strings.items():
        if sum(s.values()) != 0:
            return None
        ks = sorted(s)
        acc = 0
        for k in range(ks[0], ks[-1]):
            acc += s.get(k, 0)
            if acc:
                out[tuple(x - k * b for x, b in zip(base, beta))] = _norm(acc)
    return Laurent._raw(u.datum, out, u.scalar_ring)


def _binomial_root(v: Laurent) -> Weight | None:
    # recognise v == 1 - e^{-beta}
    if len(v.terms) != 2:
        return None
    z = v.datum.zero_weight()
    if v.terms.get(z) != 1:
        return None
    (e, c), = ((e, c) for e, c in v.terms.items() if e != z)
    if c != -1:
        return None
    return tuple(-x for x in e)


def exact_divide(u: Laurent, v: Laurent) -> Laurent:
    """Return q with u == q * v, raising NotDivisibleError otherwise.

    General divisors use leading-term elimination in lex order; candidate
    quotient exponents are confined to the box forced by the Newton
    polytopes (N(u) = N(q) + N(v)), which bounds the loop.
    """
    if u.datum is not v.datum and u.datum != v.datum:
        raise LaurentError("mismatched root data")
    if not v.terms:
        raise ZeroDivisionError("division by zero in R(T)")
    ring = Laurent._ring(u, v)
    if not u.terms:
        return Laurent.zero(u.datum, ring)
    if v.is_monomial():
        (e, c), = v.terms.items()
        if ring == "integers" and any(x % c for x in u.terms.values()):
            raise NotDivisibleError(f"{u} is not divisible by {v}")
        neg = tuple(-x for x in e)
        if ring == "integers":
            return Laurent._raw(u.datum, {tuple(a + b for a, b in zip(k, neg)): x // c for k, x in u.terms.items()}, ring)
        return u.to_rational().shift(neg, Fraction(1) / c)
    beta = _binomial_root(v)
    if beta is not None:
        q = divide_binomial(u, beta)
        if q is None:
            raise NotDivisibleError(f"{u} is not divisible by {v}")
        return q
    n = u.datum.dim
    ue, ve = list(u.terms), list(v.terms)
    lo = [min(e[i] for e in ue) - min(e[i] for e in ve) for i in range(n)]
    hi = [max(e[i] for e in ue) - max(e[i] for e in ve) for i in range(n)]
    if any(a > b for a, b in zip(lo, hi)):
        raise NotDivisibleError(f"{u} is not divisible by {v}")
    lv, lcv = v.leading()
    vterms = list(v.terms.items())
    r = dict(u.terms)
    q: dict[Weight, Coeff] = {}
    while r:
        lr = max(r)
        c = r[lr]
        m = tuple(a - b for a, b in zip(lr, lv))
        if any(not (a <= x <= b) for a, x, b in zip(lo, m, hi)):
            raise NotDivisibleError(f"{u} is not divisible by {v}")
        if ring == "integers":
            if c % lcv:
                raise NotDivisibleError(f"{u} is not divisible by {v}")
            qc = c // lcv
        else:
            qc = Fraction(c) / lcv
        q[m] = _norm(qc)
        for e, cv in vterms:
            k = tuple(a + b for a, b in zip(e, m))
            x = r.get(k, 0) - qc * cv
            if x:
                r[k] = x
            else:
                r.pop(k, None)
    return Laurent._raw(u.datum, q, ring)


def random_laurent(
    datum: RootDatum,
    rng: random.Random,
    n_terms: int = 4,
    exp_range: tuple[int, int] = (-4, 4),
    coeff_range: tuple[int, int] = (-9, 9),
    lattice_only: bool = True,
) -> Laurent:
    """Random element with exponents drawn from a box in lattice coordinates."""
    terms: dict[Weight, Coeff] = {}
    lo, hi = exp_range
    for _ in range(n_terms):
        coords = [rng.randint(lo, hi) for _ in range(datum.dim)]
        if lattice_only:
            e = tuple(sum(coords[k] * datum.lattice[k][p] for k in range(datum.dim)) for p in range(datum.dim))
        else:
            e = tuple(coords)
        c = rng.randint(*coeff_range)
        terms[e] = terms.get(e, 0) + c
    return Laurent(datum, terms)
