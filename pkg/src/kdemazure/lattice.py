"""Root data, character lattices and finite Weyl groups.

All weights live in *ambient* coordinates: the first ``rank`` entries are
coordinates with respect to the fundamental weights, the remaining
``torus_factor`` entries span a central torus on which W acts trivially.
The ambient lattice is the weight lattice (times the torus lattice), so it
contains every admissible character lattice and also rho.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

Weight = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


class RootDatumError(ValueError):
    pass


_ALLOWED = {
    "A": (1, 2, 3, 4),
    "B": (2, 3, 4),
    "C": (3, 4),
    "D": (4,),
    "G": (2,),
}


def cartan_matrix(family: str, n: int) -> list[list[int]]:
    """Cartan matrix ``A[i][j] = <alpha_i^vee, alpha_j>`` with Bourbaki numbering."""
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    if family in "ABC":
        for i in range(n - 1):
            A[i][i + 1] = A[i + 1][i] = -1
        if family == "B":
            A[n - 1][n - 2] = -2
        elif family == "C":
            A[n - 2][n - 1] = -2
    elif family == "D":
        for i in range(n - 2):
            A[i][i + 1] = A[i + 1][i] = -1
        A[n - 3][n - 1] = A[n - 1][n - 3] = -1
    elif family == "G":
        A[0][1] = -3
        A[1][0] = -1
    else:
        raise RootDatumError(f"unknown Cartan family {family!r}")
    return A


def parse_type(type_string: str) -> tuple[list[tuple[str, int]], int]:
    """Parse ``"A1xB2*T1"`` into ``([("A", 1), ("B", 2)], 1)``."""
    s = type_string.replace(" ", "")
    if not s:
        raise RootDatumError("empty type string")
    parts = s.split("*")
    head, tails = parts[0], parts[1:]
    torus = 0
    for t in tails:
        m = re.fullmatch(r"T(\d+)", t)
        if not m:
            raise RootDatumError(f"malformed torus factor {t!r} in {type_string!r}")
        torus += int(m.group(1))
    factors = []
    if head and not re.fullmatch(r"T\d+", head):
        for f in head.split("x"):
            m = re.fullmatch(r"([A-G])(\d+)", f)
            if not m:
                raise RootDatumError(
                    f"malformed simple factor {f!r}; expected e.g. A2, B3, G2, "
                    "joined by 'x', optionally followed by '*T<n>'"
                )
            fam, n = m.group(1), int(m.group(2))
            if fam not in _ALLOWED or n not in _ALLOWED[fam]:
                raise RootDatumError(f"unsupported simple type {f}")
            factors.append((fam, n))
    elif head:
        torus += int(head[1:])
    return factors, torus


def _block_diagonal(blocks: Sequence[list[list[int]]]) -> list[list[int]]:
    n = sum(len(b) for b in blocks)
    A = [[0] * n for _ in range(n)]
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                A[k + i][k + j] = v
        k += len(b)
    return A


def _validate_cartan(A: list[list[int]]) -> list[Fraction]:
    """Check the Cartan axioms; return a symmetrizer d with d_i A_ij symmetric."""
    n = len(A)
    for i in range(n):
        if A[i][i] != 2:
            raise RootDatumError("Cartan matrix must have 2 on the diagonal")
        for j in range(n):
            if i != j and (A[i][j] > 0 or (A[i][j] == 0) != (A[j][i] == 0)):
                raise RootDatumError("invalid off-diagonal Cartan entries")
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        queue = [start]
        while queue:
            i = queue.pop()
            for j in range(n):
                if j != i and A[i][j] != 0:
                    val = d[i] * A[i][j] / A[j][i]
                    if d[j] is None:
                        d[j] = val
                        queue.append(j)
                    elif d[j] != val:
                        raise RootDatumError("Cartan matrix is not symmetrizable")
    # positive definiteness of the symmetrized form via leading minors
    B = [[d[i] * A[i][j] for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        if _det_fraction([row[:k] for row in B[:k]]) <= 0:
            raise RootDatumError("Cartan matrix is not of finite type")
    return d  # type: ignore[return-value]


def _det_fraction(M: list[list[Fraction]]) -> Fraction:
    M = [[Fraction(x) for x in row] for row in M]
    n = len(M)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            det = -det
        det *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            for j in range(k, n):
                M[i][j] -= f * M[k][j]
    return det


def _inverse_fraction(M: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            raise RootDatumError("lattice basis is singular")
        A[k], A[p] = A[p], A[k]
        piv = A[k][k]
        A[k] = [x / piv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k]
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return [row[n:] for row in A]


@dataclass(frozen=True)
class WeylElement:
    id: int
    word: tuple[int, ...]
    length: int
    sign: int
    matrix: Matrix

    def act(self, weight: Sequence[int]) -> Weight:
        return tuple(sum(m * x for m, x in zip(row, weight)) for row in self.matrix)

    def word_str(self) -> str:
        return "".join(str(i + 1) for i in self.word) or "e"

    def __repr__(self) -> str:
        return f"WeylElement({self.word_str()})"


class WeylGroup:
    """Finite Weyl group enumerated by breadth-first search.

    Element 0 is the identity; ``word`` of ``s_i w`` is ``(i,) + word(w)``
    so every stored word is reduced. Products are computed by folding the
    left-multiplication table along a word rather than from a full table.
    """

    def __init__(self, datum: RootDatum):
        self.datum = datum
        r, n = datum.rank, datum.dim
        simple = []
        for i in range(r):
            a = datum.simple_roots[i]
            S = [[int(p == q) for q in range(n)] for p in range(n)]
            for p in range(n):
                S[p][i] -= a[p]
            simple.append(S)
        self._simple_matrices = simple
        ident = tuple(tuple(int(p == q) for q in range(n)) for p in range(n))
        elements = [WeylElement(0, (), 0, 1, ident)]
        index = {ident: 0}
        left: list[list[int]] = []
        queue = deque([0])
        while queue:
            k = queue.popleft()
            w = elements[k]
            row = []
            for i in range(r):
                S = simple[i]
                M = tuple(
                    tuple(sum(S[p][t] * w.matrix[t][q] for t in range(n)) for q in range(n))
                    for p in range(n)
                )
                j = index.get(M)
                if j is None:
                    j = len(elements)
                    if j > 5000:
                        raise RootDatumError("Weyl group too large or infinite")
                    index[M] = j
                    ln = w.length + 1
                    elements.append(WeylElement(j, (i,) + w.word, ln, (-1) ** ln, M))
                    queue.append(j)
                row.append(j)
            while len(left) <= k:
                left.append([])
            left[k] = row
        self.elements = elements
        self._left = left  # _left[w][i] = id of s_i w
        self._index = index
        self._words_cache: dict[int, list[tuple[int, ...]]] = {}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k: int) -> WeylElement:
        return self.elements[k]

    @property
    def identity(self) -> WeylElement:
        return self.elements[0]

    @cached_property
    def longest(self) -> WeylElement:
        return max(self.elements, key=lambda w: w.length)

    def simple(self, i: int) -> WeylElement:
        return self.elements[self._left[0][i]]

    def left_mul_simple(self, i: int, w: WeylElement) -> WeylElement:
        return self.elements[self._left[w.id][i]]

    def mul(self, w: WeylElement, v: WeylElement) -> WeylElement:
        k = v.id
        for i in reversed(w.word):
            k = self._left[k][i]
        return self.elements[k]

    def inverse(self, w: WeylElement) -> WeylElement:
        k = 0
        for i in w.word:
            k = self._left[k][i]
        return self.elements[k]

    def from_word(self, word: Sequence[int]) -> WeylElement:
        k = 0
        for i in reversed(word):
            if not 0 <= i < self.datum.rank:
                raise RootDatumError(f"simple reflection index {i + 1} out of range")
            k = self._left[k][i]
        return self.elements[k]

    def from_matrix(self, M) -> WeylElement:
        return self.elements[self._index[tuple(tuple(r) for r in M)]]

    def all_reduced_words(self, w: WeylElement) -> list[tuple[int, ...]]:
        cached = self._words_cache.get(w.id)
        if cached is not None:
            return cached
        if w.length == 0:
            out = [()]
        else:
            out = []
            for i in range(self.datum.rank):
                v = self.left_mul_simple(i, w)
                if v.length < w.length:
                    out.extend((i,) + rest for rest in self.all_reduced_words(v))
            out.sort()
        self._words_cache[w.id] = out
        return out


@dataclass(eq=False)
class RootDatum:
    """Split root datum given by a Cartan matrix and a character lattice.

    ``lattice`` holds basis vectors (rows) of X(T) in ambient coordinates.
    """

    type_string: str
    cartan: tuple[tuple[int, ...], ...]
    lattice: tuple[tuple[int, ...], ...]
    torus_factor: int = 0
    lattice_choice: str = "simply_connected"
    _symmetrizer: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._symmetrizer = _validate_cartan([list(r) for r in self.cartan])
        self._lattice_inv = _inverse_fraction(self.lattice)
        for a in self.simple_roots:
            if not self.in_lattice(a):
                raise RootDatumError("lattice does not contain the root lattice")

    # identity ---------------------------------------------------------
    def _key(self):
        return (self.cartan, self.lattice, self.torus_factor)

    def __eq__(self, other):
        return self is other or (isinstance(other, RootDatum) and self._key() == other._key())

    def __hash__(self):
        return hash(self._key())

    # basic data -------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def dim(self) -> int:
        return self.rank + self.torus_factor

    def zero_weight(self) -> Weight:
        return (0,) * self.dim

    @cached_property
    def simple_roots(self) -> tuple[Weight, ...]:
        r = self.rank
        return tuple(
            tuple(self.cartan[p][j] for p in range(r)) + (0,) * self.torus_factor for j in range(r)
        )

    @cached_property
    def fundamental_weights(self) -> tuple[Weight, ...]:
        return tuple(tuple(int(p == i) for p in range(self.dim)) for i in range(self.rank))

    @cached_property
    def rho(self) -> Weight:
        return (1,) * self.rank + (0,) * self.torus_factor

    @cached_property
    def _root_data(self):
        # roots in simple-root coordinates paired with coroots in simple-coroot coordinates
        r, A = self.rank, self.cartan
        seen = {}
        queue = deque()
        for i in range(r):
            e = tuple(int(j == i) for j in range(r))
            seen[e] = e
            queue.append(e)
        while queue:
            c = queue.popleft()
            cv = seen[c]
            for i in range(r):
                n = sum(A[i][j] * c[j] for j in range(r))  # <beta, alpha_i^vee>
                m = sum(cv[j] * A[j][i] for j in range(r))  # <alpha_i, beta^vee>
                c2 = tuple(c[j] - (n if j == i else 0) for j in range(r))
                cv2 = tuple(cv[j] - (m if j == i else 0) for j in range(r))
                if c2 not in seen:
                    seen[c2] = cv2
                    queue.append(c2)
        pos = [c for c in seen if all(x >= 0 for x in c)]
        pos.sort(key=lambda c: (sum(c), tuple(-x for x in c)))
        return pos, seen

    def _ambient(self, c) -> Weight:
        r = self.rank
        return tuple(sum(self.cartan[p][j] * c[j] for j in range(r)) for p in range(r)) + (
            0,
        ) * self.torus_factor

    @cached_property
    def positive_roots(self) -> tuple[Weight, ...]:
        pos, _ = self._root_data
        return tuple(self._ambient(c) for c in pos)

    @cached_property
    def positive_roots_simple_coords(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self._root_data[0])

    @cached_property
    def roots(self) -> tuple[Weight, ...]:
        pos = self.positive_roots
        return pos + tuple(tuple(-x for x in a) for a in pos)

    @cached_property
    def coroot(self) -> dict[Weight, tuple[int, ...]]:
        """Map root -> coroot in simple-coroot coordinates, so
        ``<lambda, beta^vee> = sum(coroot[beta][i] * lambda[i])``."""
        _, seen = self._root_data
        return {self._ambient(c): cv for c, cv in seen.items()}

    @cached_property
    def root_index(self) -> dict[Weight, int]:
        return {a: k for k, a in enumerate(self.positive_roots)}

    def pairing(self, weight: Sequence[int], root: Weight) -> int:
        cv = self.coroot[root]
        return sum(c * x for c, x in zip(cv, weight))

    def reflect(self, root: Weight, weight: Sequence[int]) -> Weight:
        n = self.pairing(weight, root)
        if n == 0:
            return tuple(weight)
        return tuple(x - n * a for x, a in zip(weight, root))

    def is_root(self, v) -> bool:
        return tuple(v) in self.coroot

    def is_positive_root(self, v) -> bool:
        return tuple(v) in self.root_index

    def is_dominant(self, weight: Sequence[int]) -> bool:
        return all(x >= 0 for x in weight[: self.rank])

    # lattice ----------------------------------------------------------
    def lattice_coordinates(self, weight: Sequence[int]) -> tuple[Fraction, ...]:
        n = self.dim
        # weight = sum_k c_k lattice[k]  =>  c = weight * lattice^{-1}
        return tuple(sum(Fraction(weight[p]) * self._lattice_inv[p][k] for p in range(n)) for k in range(n))

    def in_lattice(self, weight: Sequence[int]) -> bool:
        return all(c.denominator == 1 for c in self.lattice_coordinates(weight))

    @cached_property
    def lattice_index_in_ambient(self) -> int:
        return abs(int(_det_fraction([list(r) for r in self.lattice])))

    @property
    def is_simply_connected(self) -> bool:
        """True when X(T) is the full ambient lattice (weight lattice times torus)."""
        return self.lattice_index_in_ambient == 1

    # Weyl group -------------------------------------------------------
    @cached_property
    def weyl(self) -> WeylGroup:
        return WeylGroup(self)

    def __repr__(self) -> str:
        return f"RootDatum({self.type_string!r}, {self.lattice_choice})"


def build_root_datum(
    type_string: str,
    lattice_choice: str | Sequence[Sequence[int]] = "simply_connected",
    torus_factor: int = 0,
) -> RootDatum:
    """Build and validate a root datum.

    ``lattice_choice`` is ``"simply_connected"``, ``"adjoint"`` or an explicit
    square integer matrix whose rows span X(T) in ambient coordinates.
    """
    factors, torus = parse_type(type_string)
    if torus_factor < 0:
        raise RootDatumError("torus_factor must be nonnegative")
    torus += torus_factor
    if not factors and torus == 0:
        raise RootDatumError(f"empty root datum {type_string!r}")
    A = _block_diagonal([cartan_matrix(f, n) for f, n in factors])
    r = len(A)
    dim = r + torus
    ident = [[int(i == j) for j in range(dim)] for i in range(dim)]
    if isinstance(lattice_choice, str):
        if lattice_choice == "simply_connected":
            basis = ident
        elif lattice_choice == "adjoint":
            basis = [[A[p][j] for p in range(r)] + [0] * torus for j in range(r)] + ident[r:]
        else:
            raise RootDatumError(f"unknown lattice choice {lattice_choice!r}")
        label = lattice_choice
    else:
        basis = [list(map(int, row)) for row in lattice_choice]
        if len(basis) != dim or any(len(row) != dim for row in basis):
            raise RootDatumError(f"explicit lattice must be a {dim}x{dim} integer matrix")
        label = "explicit"
    if r == 0:
        cartan: tuple = ()
    else:
        cartan = tuple(tuple(row) for row in A)
    return RootDatum(
        type_string=type_string,
        cartan=cartan,
        lattice=tuple(tuple(row) for row in basis),
        torus_factor=torus,
        lattice_choice=label,
    )


def enumerate_weyl(datum: RootDatum) -> list[WeylElement]:
    return list(datum.weyl.elements)


def all_reduced_words(datum: RootDatum, w: WeylElement) -> list[tuple[int, ...]]:
    return datum.weyl.all_reduced_words(w)


@dataclass(frozen=True)
class LatticeEmbedding:
    """Inclusion X(T) -> X(T~) induced by a covering; identity in ambient coordinates.

    ``matrix`` expresses source lattice basis vectors in target lattice basis
    coordinates (rows), and ``index`` is the finite index of the image.
    """

    source: RootDatum
    target: RootDatum
    matrix: tuple[tuple[int, ...], ...]
    index: int

    def map_weight(self, weight: Sequence[int]) -> Weight:
        if not self.source.in_lattice(weight):
            raise RootDatumError(f"{tuple(weight)} is not in the source lattice")
        return tuple(weight)

    def map_lattice_coordinates(self, coords: Sequence[int]) -> tuple[int, ...]:
        n = len(coords)
        return tuple(sum(coords[k] * self.matrix[k][j] for k in range(n)) for j in range(n))


def lattice_extension(datum: RootDatum, super_datum: RootDatum) -> LatticeEmbedding:
    if datum.cartan != super_datum.cartan or datum.torus_factor != super_datum.torus_factor:
        raise RootDatumError("incompatible Cartan data")
    rows = []
    for b in datum.lattice:
        c = super_datum.lattice_coordinates(b)
        if any(x.denominator != 1 for x in c):
            raise RootDatumError("source lattice is not contained in the target lattice")
        rows.append(tuple(int(x) for x in c))
    index = abs(int(_det_fraction([list(r) for r in rows])))
    return LatticeEmbedding(datum, super_datum, tuple(rows), index)
