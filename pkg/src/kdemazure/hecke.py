"""The ring D of Demazure operators inside the twisted group algebra K[W].

Coefficients are fractions whose denominators are products of binomials
``1 - e^{-beta}`` over positive roots beta. Distinct positive roots give
coprime binomials, so reduced fractions are canonical.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .lattice import LatticeEmbedding, RootDatum, WeylElement
from .laurent import Laurent, divide_binomial
from .operators import OperatorKind, apply_simple


class NotInDError(ValueError):
    """Raised when an operator does not preserve R(T) / has non-polynomial normal form."""

    def __init__(self, message: str, fraction: StructuredFraction | None = None):
        super().__init__(message)
        self.fraction = fraction


def _binomial(datum: RootDatum, k: int) -> Laurent:
    beta = datum.positive_roots[k]
    return Laurent.one(datum) - Laurent.monomial(datum, tuple(-x for x in beta))


class StructuredFraction:
    """numerator / prod_k (1 - e^{-beta_k}); ``den`` is a sorted tuple of root indices."""

    __slots__ = ("num", "den")

    def __init__(self, num: Laurent, den: Sequence[int] = (), reduce: bool = True):
        den = tuple(sorted(den))
        if reduce:
            num, den = self._reduce(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _reduce(num: Laurent, den: tuple[int, ...]):
        if not num:
            return num, ()
        if not den:
            return num, den
        roots = num.datum.positive_roots
        kept = []
        for k in den:
            q = divide_binomial(num, roots[k])
            if q is None:
                kept.append(k)
            else:
                num = q
        return num, tuple(kept)

    @property
    def datum(self) -> RootDatum:
        return self.num.datum

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return not self.den

    def __eq__(self, other):
        if not isinstance(other, StructuredFraction):
            return NotImplemented
        return self.den == other.den and self.num == other.num

    def __hash__(self):
        return hash((self.num, self.den))

    def _expand(self, target: Counter) -> Laurent:
        have = Counter(self.den)
        num = self.num
        for k, m in target.items():
            for _ in range(m - have.get(k, 0)):
                num = num * _binomial(self.datum, k)
        return num

    def __add__(self, other: StructuredFraction) -> StructuredFraction:
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return StructuredFraction(self.num + other.num, self.den)
        a, b = Counter(self.den), Counter(other.den)
        lcm = a | b
        num = self._expand(lcm) + other._expand(lcm)
        return StructuredFraction(num, tuple(lcm.elements()))

    def __neg__(self):
        return StructuredFraction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: StructuredFraction) -> StructuredFraction:
        if not self.num or not other.num:
            return StructuredFraction(Laurent.zero(self.datum), ())
        return StructuredFraction(self.num * other.num, self.den + other.den)

    def weyl_act(self, w: WeylElement) -> StructuredFraction:
        if w.length == 0:
            return self
        d = self.datum
        num = self.num.weyl_act(w)
        den = []
        for k in self.den:
            g = w.act(d.positive_roots[k])
            j = d.root_index.get(g)
            if j is None:
                # 1/(1 - e^{delta}) = -e^{-delta} / (1 - e^{-delta}) with delta = -g
                delta_ = tuple(-x for x in g)
                j = d.root_index[delta_]
                num = num.shift(g, -1)
            den.append(j)
        return StructuredFraction(num, den, reduce=False)

    def unit_inverse(self) -> StructuredFraction:
        if not self.num.is_unit():
            raise NotInDError(f"fraction {self} is not invertible in the expected way", self)
        num = self.num.unit_inverse()
        for k in self.den:
            num = num * _binomial(self.datum, k)
        return StructuredFraction(num, ())

    def to_laurent(self) -> Laurent:
        if self.den:
            raise NotInDError(f"coefficient {self} is not in R(T)", self)
        return self.num

    def __str__(self):
        if not self.den:
            return str(self.num)
        d = self.datum
        facs = "".join(f"(1 - e^-{list(d.positive_roots[k])})" for k in self.den)
        return f"({self.num}) / {facs}"

    __repr__ = __str__


def _frac(u: Laurent) -> StructuredFraction:
    return StructuredFraction(u, (), reduce=False)


class TwistedOperator:
    """Finite sum  sum_w a_w * w  with a_w in the fraction field of R(T)."""

    __slots__ = ("datum", "terms", "_hash")

    def __init__(self, datum: RootDatum, terms: Mapping[int, StructuredFraction] | None = None):
        self.datum = datum
        self.terms = {k: f for k, f in (terms or {}).items() if not f.is_zero()}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, datum: RootDatum) -> TwistedOperator:
        return cls(datum)

    @classmethod
    def identity(cls, datum: RootDatum) -> TwistedOperator:
        return cls(datum, {0: _frac(Laurent.one(datum))})

    # algebra ----------------------------------------------------------
    def _coerce(self, other) -> TwistedOperator:
        if isinstance(other, TwistedOperator):
            return other
        if isinstance(other, Laurent):
            return op_scalar(other)
        if isinstance(other, int):
            return op_scalar(Laurent.constant(self.datum, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, f in other.terms.items():
            terms[k] = terms[k] + f if k in terms else f
        return TwistedOperator(self.datum, terms)

    __radd__ = __add__

    def __neg__(self):
        return TwistedOperator(self.datum, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        W = self.datum.weyl
        out: dict[int, StructuredFraction] = {}
        for kw, a in self.terms.items():
            w = W[kw]
            for kv, b in other.terms.items():
                k = W.mul(w, W[kv]).id
                t = a * b.weyl_act(w)
                out[k] = out[k] + t if k in out else t
        return TwistedOperator(self.datum, out)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def __eq__(self, other):
        if not isinstance(other, TwistedOperator):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, w: WeylElement) -> StructuredFraction:
        return self.terms.get(w.id, StructuredFraction(Laurent.zero(self.datum), ()))

    def __call__(self, u: Laurent) -> Laurent:
        return apply(self, u)

    def __str__(self):
        if not self.terms:
            return "0"
        W = self.datum.weyl
        return " + ".join(f"[{self.terms[k]}]*s{W[k].word_str()}" for k in sorted(self.terms))

    __repr__ = __str__


# generators -------------------------------------------------------------

def op_scalar(u: Laurent) -> TwistedOperator:
    return TwistedOperator(u.datum, {0: _frac(u)})


def op_weyl(w: WeylElement, datum: RootDatum) -> TwistedOperator:
    return TwistedOperator(datum, {w.id: _frac(Laurent.one(datum))})


def op_delta(kind: OperatorKind | str, alpha, datum: RootDatum) -> TwistedOperator:
    """delta'_a = (1 - e^{-a})^{-1}(1 - s_a),  delta_a = (1 - e^{-a})^{-1}(1 - e^{-a} s_a).

    ``alpha`` is a simple-root index or any root vector.
    """
    kind = OperatorKind(kind)
    if isinstance(alpha, int):
        alpha = datum.simple_roots[alpha]
    alpha = tuple(alpha)
    if not datum.is_root(alpha):
        raise ValueError(f"{alpha} is not a root")
    W = datum.weyl
    s = _reflection_element(datum, alpha)
    neg = tuple(-x for x in alpha)
    one = Laurent.one(datum)
    if datum.is_positive_root(alpha):
        k = datum.root_index[alpha]
        c1 = StructuredFraction(one, (k,))
        cs = StructuredFraction(-(one if kind == OperatorKind.delta_prime else Laurent.monomial(datum, neg)), (k,))
    else:
        # 1/(1 - e^{a}) = -e^{-a}/(1 - e^{-a}) with a = -alpha positive
        k = datum.root_index[neg]
        m = Laurent.monomial(datum, alpha, -1)  # -e^{-a}
        c1 = StructuredFraction(m, (k,))
        cs = StructuredFraction(-(m if kind == OperatorKind.delta_prime else m.shift(neg)), (k,))
    return TwistedOperator(datum, {W.identity.id: c1, s.id: cs})


def _reflection_element(datum: RootDatum, alpha) -> WeylElement:
    n = datum.dim
    M = [[int(p == q) for q in range(n)] for p in range(n)]
    for q in range(n):
        e = tuple(int(t == q) for t in range(n))
        img = datum.reflect(alpha, e)
        for p in range(n):
            M[p][q] = img[p]
    return datum.weyl.from_matrix(M)


def op_add(a: TwistedOperator, b: TwistedOperator) -> TwistedOperator:
    return a + b


def op_mul(a: TwistedOperator, b: TwistedOperator) -> TwistedOperator:
    return a * b


@lru_cache(maxsize=None)
def _word_operator(datum: RootDatum, kind: OperatorKind, k: int) -> TwistedOperator:
    W = datum.weyl
    w = W[k]
    if w.length == 0:
        return TwistedOperator.identity(datum)
    i = w.word[0]
    rest = W.left_mul_simple(i, w)  # s_i w, shorter
    return op_delta(kind, i, datum) * _word_operator(datum, kind, rest.id)


def partial_operator(w: WeylElement, datum: RootDatum) -> TwistedOperator:
    return _word_operator(datum, OperatorKind.delta, w.id)


def partial_prime_operator(w: WeylElement, datum: RootDatum) -> TwistedOperator:
    return _word_operator(datum, OperatorKind.delta_prime, w.id)


def word_operator(kind: OperatorKind | str, word: Sequence[int], datum: RootDatum) -> TwistedOperator:
    op = TwistedOperator.identity(datum)
    for i in word:
        op = op * op_delta(kind, i, datum)
    return op


# action -----------------------------------------------------------------

def apply(op: TwistedOperator, u: Laurent) -> Laurent:
    """sum_w a_w w(u), clearing denominators exactly."""
    d = op.datum
    if not op.terms:
        return Laurent.zero(d, u.scalar_ring)
    if u.datum is not d:
        u = u.with_datum(d)
    W = d.weyl
    lcm: Counter = Counter()
    for f in op.terms.values():
        lcm |= Counter(f.den)
    num = Laurent.zero(d, u.scalar_ring)
    for k, f in op.terms.items():
        g = StructuredFraction(f.num * u.weyl_act(W[k]), f.den, reduce=False)
        num = num + g._expand(lcm)
    roots = d.positive_roots
    for k in lcm.elements():
        q = divide_binomial(num, roots[k])
        if q is None:
            raise NotInDError(f"operator does not preserve R(T) on {u}")
        num = q
    return num


# normal form ------------------------------------------------------------

@dataclass
class NormalForm:
    """Coefficients c_w with  op = sum_w c_w * partial'_w."""

    datum: RootDatum
    coeffs: dict[int, Laurent] = field(default_factory=dict)

    def coefficient(self, w: WeylElement) -> Laurent:
        return self.coeffs.get(w.id, Laurent.zero(self.datum))

    def reconstruct(self) -> TwistedOperator:
        W = self.datum.weyl
        op = TwistedOperator.zero(self.datum)
        for k, c in self.coeffs.items():
            op = op + op_scalar(c) * partial_prime_operator(W[k], self.datum)
        return op

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> list[dict]:
        W = self.datum.weyl
        return [
            {"w": [i + 1 for i in W[k].word], "coeff": self.coeffs[k].to_json()}
            for k in sorted(self.coeffs, key=lambda k: (W[k].length, k))
        ]


@lru_cache(maxsize=None)
def _leading_inverse(datum: RootDatum, k: int) -> StructuredFraction:
    lead = partial_prime_operator(datum.weyl[k], datum).terms[k]
    return lead.unit_inverse()


def normal_form(op: TwistedOperator) -> NormalForm:
    """Triangular solve in the (partial'_w) basis by decreasing length."""
    d = op.datum
    W = d.weyl
    rem = op
    coeffs: dict[int, Laurent] = {}
    while rem.terms:
        k = max(rem.terms, key=lambda j: (W[j].length, j))
        c = rem.terms[k] * _leading_inverse(d, k)
        if not c.is_polynomial():
            raise NotInDError(f"normal form coefficient at {W[k]!r} is not in R(T): {c}", c)
        coeffs[k] = c.num
        rem = rem - op_scalar(c.num) * partial_prime_operator(W[k], d)
        if k in rem.terms:  # pragma: no cover - triangularity guarantees removal
            raise AssertionError("triangular elimination failed")
    return NormalForm(d, coeffs)


def in_augmentation_ideal(op: TwistedOperator) -> bool:
    """op(1) == 0; cross-checked against the identity coefficient of the normal form."""
    d = op.datum
    by_action = apply(op, Laurent.one(d)).is_zero()
    by_normal_form = normal_form(op).coefficient(d.weyl.identity).is_zero()
    if by_action != by_normal_form:
        raise AssertionError("augmentation criteria disagree")
    return by_action


def annihilates_top(op: TwistedOperator) -> bool:
    """op * partial_{w0} == 0 in D."""
    d = op.datum
    return normal_form(op * partial_operator(d.weyl.longest, d)).is_zero()


@dataclass
class RelationReport:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"checked": self.checked, "ok": self.ok, "failures": self.failures}


def hecke_relations_check(datum: RootDatum, samples: Iterable[Laurent]) -> RelationReport:
    """[d'_s, u] = d'_s(u) s  and  d'_s d'_w = d'_{sw} or d'_w, as operator identities."""
    W = datum.weyl
    rep = RelationReport()
    samples = list(samples)
    for i in range(datum.rank):
        s = W.simple(i)
        ds = op_delta(OperatorKind.delta_prime, i, datum)
        for u in samples:
            lhs = ds * op_scalar(u) - op_scalar(u) * ds
            rhs = op_scalar(apply_simple(OperatorKind.delta_prime, i, u)) * op_weyl(s, datum)
            rep.checked += 1
            if lhs != rhs:
                rep.failures.append(f"commutator s{i + 1} with {u}")
        for w in W:
            sw = W.left_mul_simple(i, w)
            lhs = ds * partial_prime_operator(w, datum)
            rhs = partial_prime_operator(sw if sw.length > w.length else w, datum)
            rep.checked += 1
            if lhs != rhs:
                rep.failures.append(f"product s{i + 1} * {w!r}")
    return rep


def extend_operator(op: TwistedOperator, embedding: LatticeEmbedding) -> TwistedOperator:
    """Push an operator on R(T) to R(T~) through the lattice inclusion."""
    if op.datum != embedding.source:
        raise ValueError("operator does not live on the embedding source")
    tgt = embedding.target
    terms = {
        k: StructuredFraction(f.num.with_datum(tgt), f.den, reduce=False) for k, f in op.terms.items()
    }
    return TwistedOperator(tgt, terms)


def random_operator(datum: RootDatum, rng, n_terms: int = 3, include_identity: bool = True, **kw) -> TwistedOperator:
    """Random element sum_w c_w partial'_w of D (c_1 = 0 unless include_identity)."""
    from .laurent import random_laurent

    W = datum.weyl
    op = TwistedOperator.zero(datum)
    pool = [w for w in W if include_identity or w.length > 0]
    for _ in range(n_terms):
        w = rng.choice(pool)
        c = random_laurent(datum, rng, **kw)
        op = op + op_scalar(c) * partial_prime_operator(w, datum)
    return op
