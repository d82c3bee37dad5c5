"""Isobaric divided differences, their primed companions and character formulas."""
from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import RootDatum, Weight, WeylElement
from .laurent import Laurent, exact_divide, NotDivisibleError


class OperatorKind(str, Enum):
    delta = "delta"
    delta_prime = "delta_prime"


class OperatorError(ValueError):
    pass


def _root(datum: RootDatum, alpha) -> Weight:
    if isinstance(alpha, int):
        if not 0 <= alpha < datum.rank:
            raise OperatorError(f"simple root index {alpha + 1} out of range")
        return datum.simple_roots[alpha]
    alpha = tuple(alpha)
    if not datum.is_root(alpha):
        raise OperatorError(f"{alpha} is not a root")
    return alpha


def _delta_positive(u: Laurent, alpha: Weight) -> Laurent:
    # closed form of (e^lam - e^{-alpha} s(e^lam)) / (1 - e^{-alpha}) with n = <lam, alpha^vee>:
    #   n >= 0: e^lam + e^{lam-alpha} + ... + e^{lam-n alpha}
    #   n = -1: 0
    #   n <= -2: -(e^{lam+alpha} + ... + e^{lam+(-n-1) alpha})
    d = u.datum
    out: dict = {}
    for e, c in u.terms.items():
        n = d.pairing(e, alpha)
        if n >= 0:
            ks = range(0, -n - 1, -1)
            sgn = c
        elif n == -1:
            continue
        else:
            ks = range(1, -n)
            sgn = -c
        for k in ks:
            key = tuple(x + k * a for x, a in zip(e, alpha))
            v = out.get(key, 0) + sgn
            if v:
                out[key] = v
            else:
                del out[key]
    return Laurent._raw(d, out, u.scalar_ring)


def _delta_prime_positive(u: Laurent, alpha: Weight) -> Laurent:
    #   n > 0: e^lam (1 + e^{-alpha} + ... + e^{-(n-1) alpha});  n = 0: 0
    #   n < 0: -(e^{lam+alpha} + ... + e^{lam+|n| alpha})
    d = u.datum
    out: dict = {}
    for e, c in u.terms.items():
        n = d.pairing(e, alpha)
        if n > 0:
            ks = range(0, -n, -1)
            sgn = c
        elif n == 0:
            continue
        else:
            ks = range(1, -n + 1)
            sgn = -c
        for k in ks:
            key = tuple(x + k * a for x, a in zip(e, alpha))
            v = out.get(key, 0) + sgn
            if v:
                out[key] = v
            else:
                del out[key]
    return Laurent._raw(d, out, u.scalar_ring)


def _by_division(kind: OperatorKind, alpha: Weight, u: Laurent) -> Laurent:
    d = u.datum
    neg = tuple(-a for a in alpha)
    s_u = u.reflect(alpha)
    num = u - (s_u.shift(neg) if kind == OperatorKind.delta else s_u)
    den = Laurent.one(d) - Laurent.monomial(d, neg)
    try:
        return exact_divide(num, den)
    except NotDivisibleError as exc:  # pragma: no cover - would contradict the theory
        raise AssertionError(f"divided difference not exact: {exc}") from exc


def apply_simple(kind: OperatorKind | str, alpha, u: Laurent, method: str = "closed") -> Laurent:
    """delta_alpha(u) or delta'_alpha(u) for any root alpha.

    ``method="divide"`` evaluates the defining quotient with exact division
    instead of the termwise closed form.
    """
    kind = OperatorKind(kind)
    d = u.datum
    alpha = _root(d, alpha)
    if method == "divide":
        return _by_division(kind, alpha, u)
    if d.is_positive_root(alpha):
        if kind == OperatorKind.delta:
            return _delta_positive(u, alpha)
        return _delta_prime_positive(u, alpha)
    # delta_{-a} = 1 + e^a - e^a delta_a  and  delta'_{-a} = e^{-a}(delta_{-a} - 1)
    a = tuple(-x for x in alpha)
    dm = u + u.shift(a) - _delta_positive(u, a).shift(a)
    if kind == OperatorKind.delta:
        return dm
    return (dm - u).shift(alpha)


def delta(alpha, u: Laurent) -> Laurent:
    return apply_simple(OperatorKind.delta, alpha, u)


def delta_prime(alpha, u: Laurent) -> Laurent:
    return apply_simple(OperatorKind.delta_prime, alpha, u)


def apply_word(kind: OperatorKind | str, word: Sequence[int], u: Laurent) -> Laurent:
    """Composition delta_{b1} ... delta_{bl} (rightmost applied first)."""
    kind = OperatorKind(kind)
    d = u.datum
    f = _delta_positive if kind == OperatorKind.delta else _delta_prime_positive
    for i in reversed(tuple(word)):
        if not 0 <= i < d.rank:
            raise OperatorError(f"simple reflection index {i + 1} out of range")
        u = f(u, d.simple_roots[i])
    return u


def partial(w: WeylElement, u: Laurent) -> Laurent:
    return apply_word(OperatorKind.delta, w.word, u)


def partial_prime(w: WeylElement, u: Laurent) -> Laurent:
    return apply_word(OperatorKind.delta_prime, w.word, u)


def partial_prime_conjugated(w: WeylElement, u: Laurent) -> Laurent:
    """e^rho . partial_w . e^{-rho}, computed in the weight lattice."""
    rho = u.datum.rho
    return partial(w, u.shift(tuple(-x for x in rho))).shift(rho)


def top(u: Laurent) -> Laurent:
    """partial_{w0}(u)."""
    return partial(u.datum.weyl.longest, u)


def braid_check(datum: RootDatum, w: WeylElement, samples: Iterable[Laurent]) -> bool:
    words = datum.weyl.all_reduced_words(w)
    samples = list(samples)
    if not samples:
        raise OperatorError("braid_check needs at least one sample")
    for kind in OperatorKind:
        for u in samples:
            ref = apply_word(kind, words[0], u)
            for word in words[1:]:
                if apply_word(kind, word, u) != ref:
                    return False
    return True


def antisymmetrize(u: Laurent) -> Laurent:
    """J(u) = sum_w det(w) w.u with the rho-shifted action."""
    out = Laurent.zero(u.datum, u.scalar_ring)
    for w in u.datum.weyl:
        t = u.shifted_act(w)
        out = out + (t if w.sign > 0 else -t)
    return out


def weyl_denominator(datum: RootDatum) -> Laurent:
    d = Laurent.one(datum)
    for a in datum.positive_roots:
        d = d * (Laurent.one(datum) - Laurent.monomial(datum, tuple(-x for x in a)))
    return d


def weyl_character(datum: RootDatum, weight: Sequence[int], verify: bool | None = None) -> Laurent:
    """Character of the irreducible module of dominant highest weight ``weight``.

    Computed as partial_{w0}(e^lam); with ``verify`` (default: ``__debug__``)
    it is cross-checked against J(e^lam)/d by exact division.
    """
    weight = tuple(weight)
    if len(weight) != datum.dim:
        raise OperatorError(f"weight {weight} needs {datum.dim} coordinates")
    if not datum.is_dominant(weight):
        raise OperatorError(f"{weight} is not dominant")
    if not datum.in_lattice(weight):
        raise OperatorError(f"{weight} is not in the character lattice")
    e = Laurent.monomial(datum, weight)
    chi = top(e)
    if verify is None:
        verify = __debug__
    if verify:
        other = exact_divide(antisymmetrize(e), weyl_denominator(datum))
        if other != chi:
            raise AssertionError(f"character formulas disagree for {weight}")
    return chi


def demazure_character(w: WeylElement, weight: Sequence[int], datum: RootDatum) -> Laurent:
    return partial(w, Laurent.monomial(datum, weight))


def projection_pi(u0: Laurent, u: Laurent) -> Laurent:
    """pi(u) = partial_{w0}(u0 * u), requiring partial_{w0}(u0) = 1."""
    if top(u0) != 1:
        raise OperatorError("u0 must satisfy partial_{w0}(u0) = 1")
    return top(u0 * u)


def averaging_u0(datum: RootDatum) -> Laurent:
    """u0 = d / |W| over the rationals."""
    return weyl_denominator(datum).scale(Fraction(1, len(datum.weyl)))
