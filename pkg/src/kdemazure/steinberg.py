"""Steinberg basis of R(T) over R(T)^W, the pushforward pairing and dual bases.

R(G) is identified with R(T)^W throughout; invariant Laurent elements are
the representatives of R(G).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .lattice import RootDatum, Weight
from .laurent import Laurent, exact_divide
from .operators import top


class SteinbergError(ValueError):
    pass


def pairing(u1: Laurent, u2: Laurent) -> Laurent:
    """P(u1, u2) = j_*(u1 u2), represented by partial_{w0}(u1 u2)."""
    return top(u1 * u2)


def twisted_induction(weight: Sequence[int], u: Laurent) -> Laurent:
    """j_lambda(u) = j_*(e^lambda u)."""
    return top(u.shift(tuple(weight)))


def steinberg_weights(datum: RootDatum) -> list[Weight]:
    """lambda_w = w^{-1}( sum of omega_i over the left descents i of w ).

    i is a left descent when l(s_i w) < l(w), i.e. w^{-1}(alpha_i) < 0.
    """
    W = datum.weyl
    out = []
    for w in W:
        lam = [0] * datum.dim
        for i in range(datum.rank):
            if W.left_mul_simple(i, w).length < w.length:
                lam[i] += 1
        out.append(W.inverse(w).act(lam))
    return out


def fraction_free_inverse(M: list[list[Laurent]]) -> tuple[Laurent, list[list[Laurent]]]:
    """Fraction-free Gauss-Jordan elimination on [M | I].

    Returns ``(det(M), X)`` with ``M X = det(M) I``, so X is the adjugate;
    every division is exact in R(T).
    """
    n = len(M)
    if n == 0:
        raise SteinbergError("empty matrix")
    d = M[0][0].datum
    one, zero = Laurent.one(d), Laurent.zero(d)
    A = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    prev = one
    sign = 1
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k]), None)
        if p is None:
            raise SteinbergError("Gram matrix is singular")
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        piv = A[k][k]
        for i in range(n):
            if i == k:
                continue
            a_ik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(2 * n):
                if j == k:
                    continue
                val = piv * row_i[j]
                if a_ik and row_k[j]:
                    val = val - a_ik * row_k[j]
                row_i[j] = exact_divide(val, prev) if val else val
            row_i[k] = zero
        prev = piv
    # the final pivot is det(P M) for the row permutation P; X = prev * M^{-1}
    if sign < 0:
        return -prev, [[-x for x in row[n:]] for row in A]
    return prev, [row[n:] for row in A]


def _permutation_sign(perm: Sequence[int]) -> int:
    s, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length and length % 2 == 0:
            s = -s
    return s


def unit_pivot_inverse(M: list[list[Laurent]]) -> tuple[Laurent, list[list[Laurent]]] | None:
    """Gauss-Jordan with full pivoting restricted to unit entries.

    Returns ``(det(M), M^{-1})`` or None when at some stage no unit pivot is
    available. Among unit candidates the pivot minimising a Markowitz-style
    fill-in estimate (row size times column count) is taken; dividing by
    units only keeps entries from the growth of fraction-free elimination.
    """
    n = len(M)
    d = M[0][0].datum
    one, zero = Laurent.one(d), Laurent.zero(d)
    A = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    rows, cols = set(range(n)), set(range(n))
    piv: dict[int, int] = {}
    det = one
    for _ in range(n):
        colcount = {c: sum(1 for r in rows if A[r][c]) for c in cols}
        best = None
        for r in sorted(rows):
            rowsize = sum(len(x) for x in A[r])
            for c in sorted(cols):
                x = A[r][c]
                if x and x.is_unit():
                    score = (rowsize * (colcount[c] - 1), r, c)
                    if best is None or score < best:
                        best = score
        if best is None:
            return None
        _, r, c = best
        p = A[r][c]
        det = det * p
        pinv = p.unit_inverse()
        A[r] = [x * pinv if x else x for x in A[r]]
        row_r = A[r]
        for i in range(n):
            f = A[i][c]
            if i != r and f:
                A[i] = [a - f * b if b else a for a, b in zip(A[i], row_r)]
        rows.discard(r)
        cols.discard(c)
        piv[r] = c
    inv: list = [None] * n
    for r, c in piv.items():
        inv[c] = A[r][n:]
    if _permutation_sign([piv[r] for r in range(n)]) < 0:
        det = -det
    return det, inv


def determinant(M: list[list[Laurent]]) -> Laurent:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    d = M[0][0].datum
    A = [list(r) for r in M]
    prev = Laurent.one(d)
    sign = 1
    for k in range(n - 1):
        p = next((i for i in range(k, n) if A[i][k]), None)
        if p is None:
            return Laurent.zero(d)
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = exact_divide(A[k][k] * A[i][j] - A[i][k] * A[k][j], prev)
        prev = A[k][k]
    return A[n - 1][n - 1] if sign > 0 else -A[n - 1][n - 1]


@dataclass
class SteinbergBasis:
    """Verified free basis (u_w) of R(T) over R(T)^W with its Gram data.

    Lists are indexed by Weyl group element id; index 0 is the identity and
    carries the weight 0.
    """

    datum: RootDatum
    weights: list[Weight]
    elements: list[Laurent]
    gram: list[list[Laurent]]
    gram_det: Laurent
    gram_inverse: list[list[Laurent]]
    dual: list[Laurent]

    def __len__(self):
        return len(self.elements)

    def expand(self, u: Laurent) -> list[Laurent]:
        """Coordinates c_w = P(u, u^w), so that u = sum_w c_w u_w."""
        return [pairing(u, v) for v in self.dual]

    def combine(self, coeffs: Sequence[Laurent]) -> Laurent:
        out = Laurent.zero(self.datum)
        for c, e in zip(coeffs, self.elements):
            out = out + c * e
        return out

    def duality_matrix(self) -> list[list[Laurent]]:
        return [[pairing(a, b) for b in self.dual] for a in self.elements]

    def to_json(self) -> dict:
        W = self.datum.weyl
        return {
            "type": self.datum.type_string,
            "order": len(self.elements),
            "words": [[i + 1 for i in w.word] for w in W],
            "weights": [list(l) for l in self.weights],
            "gram": [[g.to_json() for g in row] for row in self.gram],
            "determinant": self.gram_det.to_json(),
            "dual": [u.to_json() for u in self.dual],
        }


def steinberg_basis(datum: RootDatum, weights: Sequence[Sequence[int]] | None = None) -> SteinbergBasis:
    """Build the candidate basis, compute the Gram matrix and certify it.

    ``weights`` overrides the Steinberg weights (one per Weyl element, in
    enumeration order, the first being 0). Raises SteinbergError unless the
    Gram determinant is a unit of R(T)^W.
    """
    if not datum.is_simply_connected:
        raise SteinbergError("a Steinberg basis needs pi_1 torsion-free (simply connected lattice)")
    n = len(datum.weyl)
    if weights is None:
        weights = steinberg_weights(datum)
    weights = [tuple(int(x) for x in l) for l in weights]
    if len(weights) != n:
        raise SteinbergError(f"need {n} weights, got {len(weights)}")
    if any(weights[0]):
        raise SteinbergError("the weight attached to the identity must be 0")
    elements = [Laurent.monomial(datum, l) for l in weights]
    gram = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            gram[i][j] = gram[j][i] = pairing(elements[i], elements[j])
    fast = unit_pivot_inverse(gram)
    if fast is not None:
        c, inv = fast
    else:
        c, X = fraction_free_inverse(gram)
    if not c.is_unit():
        raise SteinbergError(f"candidate weights fail the unit-determinant check (det ~ {c})")
    if not c.is_invariant():
        raise SteinbergError("Gram determinant is not W-invariant")
    if fast is None:
        cinv = c.unit_inverse()
        inv = [[x * cinv for x in row] for row in X]
    dual = []
    for w in range(n):
        u = Laurent.zero(datum)
        for v in range(n):
            if inv[w][v]:
                u = u + inv[w][v] * elements[v]
        dual.append(u)
    return SteinbergBasis(datum, weights, elements, gram, c, inv, dual)


def dual_basis(basis: SteinbergBasis) -> list[Laurent]:
    return list(basis.dual)


def expand_in_basis(u: Laurent, basis: SteinbergBasis) -> list[Laurent]:
    return basis.expand(u)


def expand_endomorphism(op: Callable[[Laurent], Laurent], basis: SteinbergBasis) -> list[list[Laurent]]:
    """Coefficients b[w][w'] in R(T)^W with op(u) = sum b[w][w'] u_w partial_{w0}(u_{w'} u).

    Evaluating at u = u^v isolates column v: op(u^v) = sum_w b[w][v] u_w.
    """
    n = len(basis)
    b = [[None] * n for _ in range(n)]
    for v in range(n):
        coords = basis.expand(op(basis.dual[v]))
        for w in range(n):
            b[w][v] = coords[w]
    return b


def apply_expansion(b: list[list[Laurent]], basis: SteinbergBasis, u: Laurent) -> Laurent:
    out = Laurent.zero(basis.datum)
    for w, row in enumerate(b):
        for v, c in enumerate(row):
            if c:
                out = out + c * basis.elements[w] * pairing(basis.elements[v], u)
    return out
