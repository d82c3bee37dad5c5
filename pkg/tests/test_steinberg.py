import random

import pytest

from kdemazure.hecke import op_delta, op_weyl, partial_operator, apply, TwistedOperator
from kdemazure.lattice import build_root_datum
from kdemazure.laurent import Laurent, monomial, random_laurent
from kdemazure.operators import top
from kdemazure.steinberg import (
    SteinbergError,
    apply_expansion,
    determinant,
    dual_basis,
    expand_endomorphism,
    expand_in_basis,
    fraction_free_inverse,
    pairing,
    steinberg_basis,
    steinberg_weights,
    twisted_induction,
)

A1 = build_root_datum("A1")
x = monomial(A1, (1,))


def test_a1_pairing_values():
    one = Laurent.one(A1)
    assert pairing(one, one) == 1
    assert pairing(one, x) == x + x ** -1
    assert pairing(x, x) == x ** 2 + 1 + x ** -2
    assert twisted_induction((1,), one) == x + x ** -1
    assert twisted_induction((1,), x ** -1) == 1
    assert twisted_induction((0,), x ** 3) == top(x ** 3)


def test_a1_default_basis():
    B = steinberg_basis(A1)
    assert B.weights == [(0,), (-1,)]
    assert B.gram == [[1, 0], [0, -1]]
    assert B.gram_det == -1


def test_a1_override_basis():
    B = steinberg_basis(A1, [(0,), (1,)])
    assert B.gram_det == -1
    assert dual_basis(B) == [-x ** -2, x ** -1]
    assert pairing(Laurent.one(A1), -x ** -2) == 1 and pairing(x, x ** -1) == 1
    assert expand_in_basis(Laurent.one(A1), B) == [1, 0]
    assert expand_in_basis(x + x ** -1, B) == [x + x ** -1, 0]
    c = expand_in_basis(x ** -1, B)
    assert c[1] == -1 and B.combine(c) == x ** -1


def test_override_validation():
    with pytest.raises(SteinbergError):
        steinberg_basis(A1, [(1,), (0,)])
    with pytest.raises(SteinbergError):
        steinberg_basis(A1, [(0,)])
    with pytest.raises(SteinbergError):
        steinberg_basis(A1, [(0,), (2,)])  # gram determinant x^2 + ... is not a unit
    with pytest.raises(SteinbergError):
        steinberg_basis(build_root_datum("A1", "adjoint"))


@pytest.mark.parametrize("t", ["A2", "B2", "G2", "A1xA1", "A2*T1"])
def test_unit_determinant_and_duality(t):
    d = build_root_datum(t)
    B = steinberg_basis(d)
    assert B.weights[0] == (0,) * d.dim
    assert len(set(B.weights)) == len(d.weyl)
    assert B.gram_det.is_unit() and B.gram_det.is_invariant()
    for row in B.gram:
        for g in row:
            assert g.is_invariant()
    n = len(B)
    assert B.duality_matrix() == [[int(i == j) for j in range(n)] for i in range(n)]
    rng = random.Random(4)
    for _ in range(5):
        u = random_laurent(d, rng)
        c = B.expand(u)
        assert all(ci.is_invariant() for ci in c)
        assert B.combine(c) == u


@pytest.mark.parametrize("t", ["A2", "B2"])
def test_determinant_cross_check(t):
    B = steinberg_basis(build_root_datum(t))
    det, adj = fraction_free_inverse(B.gram)
    assert det == B.gram_det == determinant(B.gram)
    n = len(B)
    cinv = det.unit_inverse()
    assert [[a * cinv for a in row] for row in adj] == B.gram_inverse
    for i in range(n):
        for j in range(n):
            s = sum((B.gram[i][k] * adj[k][j] for k in range(n)), Laurent.zero(B.datum))
            assert s == (det if i == j else 0)


@pytest.mark.parametrize("t", ["A3", "B3", "C3", "A2xA1"])
def test_rank_three_unit_determinant(t):
    d = build_root_datum(t)
    B = steinberg_basis(d)
    assert B.gram_det.is_unit() and B.gram_det.is_invariant()
    rng = random.Random(6)
    u = random_laurent(d, rng, n_terms=3, exp_range=(-2, 2))
    assert B.combine(B.expand(u)) == u


def test_weights_formula_a2():
    d = build_root_datum("A2")
    W = d.weyl
    ws = steinberg_weights(d)
    # identity gets 0 and the longest element gets w0^{-1}(rho)
    assert ws[0] == (0, 0)
    assert ws[W.longest.id] == W.inverse(W.longest).act(d.rho)


@pytest.mark.parametrize("t", ["A1", "A2", "B2"])
def test_pairing_properties(t):
    d = build_root_datum(t)
    rng = random.Random(2)
    v = top(monomial(d, (1,) + (0,) * (d.dim - 1)))
    for _ in range(5):
        u1, u2 = random_laurent(d, rng, n_terms=3), random_laurent(d, rng, n_terms=3)
        assert pairing(u1, u2) == pairing(u2, u1)
        assert pairing(v * u1, u2) == v * pairing(u1, u2)
        assert pairing(u1, Laurent.one(d)) == top(u1)
        lam = tuple(rng.randint(-2, 2) for _ in range(d.dim))
        assert twisted_induction(lam, Laurent.monomial(d, tuple(-a for a in lam)) * u1) == top(u1)


def test_endomorphism_expansion_a1():
    B = steinberg_basis(A1, [(0,), (1,)])
    samples = [Laurent.one(A1), x, x ** -1, x ** 3 - 2 * x ** -2]
    for op in (partial_operator(A1.weyl.longest, A1), TwistedOperator.identity(A1),
               op_delta("delta_prime", 0, A1), op_weyl(A1.weyl.simple(0), A1)):
        b = expand_endomorphism(lambda u: apply(op, u), B)
        assert all(c.is_invariant() for row in b for c in row)
        for u in samples:
            assert apply_expansion(b, B, u) == apply(op, u)
    # identity expands via the dual basis: b[w][v] = delta_{w v} expressed through u^v
    zero = expand_endomorphism(lambda u: Laurent.zero(A1), B)
    assert all(c == 0 for row in zero for c in row)
    top_b = expand_endomorphism(top, B)
    assert top_b[0][0] == 1


def test_endomorphism_expansion_a2():
    d = build_root_datum("A2")
    B = steinberg_basis(d)
    op = op_delta("delta", 0, d) * op_delta("delta_prime", 1, d)
    b = expand_endomorphism(lambda u: apply(op, u), B)
    rng = random.Random(1)
    for _ in range(3):
        u = random_laurent(d, rng, n_terms=3)
        assert apply_expansion(b, B, u) == apply(op, u)
