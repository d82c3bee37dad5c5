import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kdemazure.lattice import build_root_datum
from kdemazure.laurent import (
    Laurent,
    LaurentError,
    NotDivisibleError,
    divide_binomial,
    dumps,
    evaluate_at_identity,
    exact_divide,
    is_invariant,
    laurent_from_json,
    monomial,
    parse_laurent,
    shifted_act,
    weyl_act,
)

A1 = build_root_datum("A1")
A2 = build_root_datum("A2")
B2 = build_root_datum("B2")
x = monomial(A1, (1,))


def laurents(datum, max_terms=5, lo=-3, hi=3):
    term = st.tuples(st.tuples(*[st.integers(lo, hi)] * datum.dim), st.integers(-6, 6))
    return st.lists(term, max_size=max_terms).map(
        lambda ts: Laurent(datum, _collect(ts))
    )


def _collect(ts):
    out = {}
    for e, c in ts:
        out[e] = out.get(e, 0) + c
    return out


def naive_mul(u, v):
    out = {}
    for e1, c1 in u.terms.items():
        for e2, c2 in v.terms.items():
            k = tuple(a + b for a, b in zip(e1, e2))
            out[k] = out.get(k, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def test_a1_examples():
    assert x * x ** -1 == 1
    assert x + (-x) == 0 and (x - x).terms == {}
    assert (1 - x ** -2) * (1 + x ** -2) == 1 - x ** -4
    s = A1.weyl.simple(0)
    assert weyl_act(s, x) == x ** -1
    assert weyl_act(s, x + x ** -1) == x + x ** -1
    assert weyl_act(s, 1 - x ** -2) == 1 - x ** 2
    assert shifted_act(s, Laurent.one(A1)) == x ** -2
    assert shifted_act(s, x) == x ** -3
    assert shifted_act(A1.weyl.identity, x + 3) == x + 3
    assert exact_divide(x - x ** -3, 1 - x ** -2) == x + x ** -1
    assert exact_divide(x + 5, Laurent.one(A1)) == x + 5
    with pytest.raises(NotDivisibleError):
        exact_divide(x, 1 - x ** -2)
    with pytest.raises(ZeroDivisionError):
        exact_divide(x, Laurent.zero(A1))
    assert is_invariant(x + x ** -1) and not is_invariant(x)
    assert evaluate_at_identity(x + 1 + x ** -1) == 3


def test_units_and_powers():
    assert (-x ** 3).is_unit() and not (2 * x).is_unit() and not (1 + x).is_unit()
    assert (-x ** 3).unit_inverse() == -x ** -3
    assert (1 + x) ** 3 == 1 + 3 * x + 3 * x ** 2 + x ** 3
    assert (x * 2).to_rational().scale(Fraction(1, 2)).is_unit()
    with pytest.raises(LaurentError):
        (1 + x) ** -1


def test_lattice_membership():
    # exponents live in the ambient weight lattice; membership in X(T) is a query
    ad = build_root_datum("A1", "adjoint")
    assert not Laurent.monomial(ad, (1,)).in_lattice()
    assert Laurent.monomial(ad, (2,)).in_lattice()


@given(laurents(A2), laurents(A2), laurents(A2))
@settings(max_examples=60, deadline=None)
def test_ring_axioms(u, v, w):
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert u * v == v * u
    assert u + v == v + u
    assert (u - v) + v == u
    assert (u * v).terms == naive_mul(u, v)
    assert u * 1 == u and u * 0 == 0


@given(laurents(B2), laurents(B2, max_terms=3))
@settings(max_examples=60, deadline=None)
def test_exact_divide_roundtrip(q, v):
    if not v:
        return
    assert exact_divide(q * v, v) == q


@given(laurents(A2, max_terms=4))
@settings(max_examples=60, deadline=None)
def test_binomial_division(q):
    for beta in A2.positive_roots:
        b = Laurent.one(A2) - Laurent.monomial(A2, tuple(-c for c in beta))
        assert divide_binomial(q * b, beta) == q
        if q and not divide_binomial(q * b + 1, beta) is None:
            pytest.fail("non-multiple reported divisible")


@pytest.mark.parametrize("datum", [A2, B2, build_root_datum("G2")])
def test_group_action_laws(datum):
    import random

    rng = random.Random(3)
    from kdemazure.laurent import random_laurent

    W = datum.weyl
    us = [random_laurent(datum, rng) for _ in range(4)]
    for w in list(W)[:6]:
        for v in list(W)[:6]:
            wv = W.mul(w, v)
            for u in us:
                assert u.weyl_act(wv) == u.weyl_act(v).weyl_act(w)
                assert u.shifted_act(wv) == u.shifted_act(v).shifted_act(w)
        for u1, u2 in zip(us, us[1:]):
            # w.(u1 u2) = (w.u1) w(u2)
            assert (u1 * u2).shifted_act(w) == u1.shifted_act(w) * u2.weyl_act(w)


def test_serialization_roundtrip():
    u = Laurent.monomial(A2, (1, -2), 3) - Laurent.monomial(A2, (0, 1)) + 7
    assert parse_laurent(A2, u.to_text()) == u
    assert laurent_from_json(A2, json.loads(dumps(u))) == u
    v = x ** 3 - 2 * x + 5 - x ** -4
    assert parse_laurent(A1, v.render()) == v
    assert parse_laurent(A1, "0") == 0
    assert v.to_json()[0] == {"coeff": "1", "exp": [3]}
    r = v.to_rational().scale(Fraction(1, 3))
    assert laurent_from_json(A1, r.to_json()) == r
    with pytest.raises(LaurentError):
        parse_laurent(A2, "x^2")


def test_rendering():
    assert str(Laurent.one(A1)) == "1"
    assert (x ** 3 + x + x ** -1 + x ** -3).render() == "x^3 + x^1 + x^-1 + x^-3"
    assert (Laurent.monomial(A2, (1, 0)) - 2).render() == "e[1,0] - 2"
    assert (x ** 2).render("y") == "y^2"
