"""D-modules of the form A = R(T) (x)_{R(G)} B.

B stands in for K_G(X) and is given by generators: free summands (W-invariant
Laurent elements, i.e. R(G)), "ring" summands (R(T) viewed as an
R(G)-algebra, used for the flag variety) and the two-element residue field
R(G)/(2, x + x^{-1}) of the SU(2) torsion example. A class in A is stored by
its coordinates with respect to a basis (u_w) of R(T) over R(G).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .hecke import (
    TwistedOperator,
    apply,
    op_scalar,
    op_weyl,
    partial_operator,
    partial_prime_operator,
)
from .lattice import RootDatum
from .laurent import Laurent
from .operators import top
from .steinberg import SteinbergBasis, steinberg_basis

FREE, RING, F2 = "free", "ring", "su2_torsion"


class ModuleError(ValueError):
    pass


def su2_residue(v: Laurent) -> int:
    """Image of an invariant v in R(G)/(2, x + x^{-1}) = F_2.

    Modulo x + x^{-1} the variable satisfies x^2 = -1, so v reduces to the
    integer v(i); its parity is the residue.
    """
    tot = 0
    for (k,), c in v.terms.items():
        if isinstance(c, Fraction):
            raise ModuleError("torsion summands need integer scalars")
        r = k % 4
        if r == 0:
            tot += c
        elif r == 2:
            tot -= c
        # odd powers are +-i and cancel for an invariant element
    return tot % 2


@dataclass(frozen=True)
class CoefficientModule:
    """B as a direct sum of summands; ``degrees`` is an inert Z/2 label per summand."""

    datum: RootDatum
    kinds: tuple[str, ...]
    degrees: tuple[int, ...] = ()
    scalar_ring: str = "integers"

    def __post_init__(self):
        if not self.degrees:
            object.__setattr__(self, "degrees", (0,) * len(self.kinds))
        for k in self.kinds:
            if k not in (FREE, RING, F2):
                raise ModuleError(f"unknown summand kind {k!r}")
            if k == F2 and (self.datum.type_string.replace(" ", "") != "A1" or self.datum.dim != 1
                            or not self.datum.is_simply_connected):
                raise ModuleError("the torsion summand is only defined for SU(2) (A1, simply connected)")

    @classmethod
    def free(cls, datum: RootDatum, rank: int = 1, scalar_ring: str = "integers") -> CoefficientModule:
        return cls(datum, (FREE,) * rank, scalar_ring=scalar_ring)

    @classmethod
    def su2_torsion(cls, datum: RootDatum, free_rank: int = 0) -> CoefficientModule:
        return cls(datum, (FREE,) * free_rank + (F2,))

    @classmethod
    def flag(cls, datum: RootDatum) -> CoefficientModule:
        return cls(datum, (RING,))

    @property
    def rank(self) -> int:
        return len(self.kinds)

    @property
    def is_algebra(self) -> bool:
        return self.kinds in ((FREE,), (RING,))

    def zero(self) -> tuple:
        return tuple(0 if k == F2 else Laurent.zero(self.datum, self.scalar_ring) for k in self.kinds)

    def element(self, comps: Sequence) -> tuple:
        if len(comps) != self.rank:
            raise ModuleError(f"expected {self.rank} components")
        out = []
        for k, c in zip(self.kinds, comps):
            if k == F2:
                out.append(int(c) % 2)
                continue
            if isinstance(c, (int, Fraction)):
                c = Laurent.constant(self.datum, c)
            if k == FREE and not c.is_invariant():
                raise ModuleError(f"free summand component {c} is not W-invariant")
            out.append(c)
        return tuple(out)

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple((x + y) % 2 if k == F2 else x + y for k, x, y in zip(self.kinds, a, b))

    def neg(self, a: tuple) -> tuple:
        return tuple(x % 2 if k == F2 else -x for k, x in zip(self.kinds, a))

    def scale(self, v: Laurent, a: tuple) -> tuple:
        """Action of an invariant v in R(G)."""
        out = []
        for k, x in zip(self.kinds, a):
            if k == F2:
                out.append(su2_residue(v) * x % 2)
            else:
                out.append(v * x)
        return tuple(out)

    def is_zero(self, a: tuple) -> bool:
        return all(not x for x in a)

    def multiply(self, a: tuple, b: tuple) -> tuple:
        if not self.is_algebra:
            raise ModuleError("coefficient module has no algebra structure")
        return (a[0] * b[0],)


@dataclass(frozen=True)
class InducedElement:
    """a = sum_w u_w (x) coords[w]."""

    coords: tuple

    def __getitem__(self, k):
        return self.coords[k]


class InducedModule:
    """A = R(T) (x)_{R(G)} B with D acting on the left factor."""

    def __init__(self, B: CoefficientModule, basis: SteinbergBasis | None = None):
        self.B = B
        self.datum = B.datum
        self.basis = basis if basis is not None else steinberg_basis(B.datum)
        if self.basis.datum != self.datum:
            raise ModuleError("basis and coefficient module use different root data")
        self._matrices: dict[TwistedOperator, list[list[Laurent]]] = {}

    def __len__(self):
        return len(self.basis)

    # elements ---------------------------------------------------------
    def element(self, coords: Sequence[Sequence]) -> InducedElement:
        if len(coords) != len(self.basis):
            raise ModuleError(f"expected {len(self.basis)} coordinates")
        return InducedElement(tuple(self.B.element(c) for c in coords))

    def zero(self) -> InducedElement:
        return InducedElement(tuple(self.B.zero() for _ in range(len(self.basis))))

    def add(self, a: InducedElement, b: InducedElement) -> InducedElement:
        return InducedElement(tuple(self.B.add(x, y) for x, y in zip(a.coords, b.coords)))

    def neg(self, a: InducedElement) -> InducedElement:
        return InducedElement(tuple(self.B.neg(x) for x in a.coords))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a: InducedElement) -> bool:
        return all(self.B.is_zero(x) for x in a.coords)

    def equal(self, a: InducedElement, b: InducedElement) -> bool:
        return self.is_zero(self.sub(a, b))

    def tensor(self, u: Laurent, b: tuple) -> InducedElement:
        """The class u (x) b."""
        coeffs = self.basis.expand(u)
        return InducedElement(tuple(self.B.scale(c, b) for c in coeffs))

    # D-action -----------------------------------------------------------
    def matrix(self, op: TwistedOperator) -> list[list[Laurent]]:
        """M[v][w] = v-th coordinate of op(u_w); entries lie in R(T)^W."""
        M = self._matrices.get(op)
        if M is None:
            cols = [self.basis.expand(apply(op, u)) for u in self.basis.elements]
            n = len(cols)
            M = [[cols[w][v] for w in range(n)] for v in range(n)]
            self._matrices[op] = M
        return M

    def act(self, op: TwistedOperator, a: InducedElement) -> InducedElement:
        M = self.matrix(op)
        n = len(M)
        out = []
        for v in range(n):
            acc = self.B.zero()
            for w in range(n):
                if M[v][w]:
                    acc = self.B.add(acc, self.B.scale(M[v][w], a.coords[w]))
            out.append(acc)
        return InducedElement(tuple(out))

    def mul_scalar(self, u: Laurent, a: InducedElement) -> InducedElement:
        """The R(T)-module structure: u . a."""
        return self.act(op_scalar(u), a)

    def scale_B(self, v: Laurent, a: InducedElement) -> InducedElement:
        """The R(G)-module structure through B."""
        return InducedElement(tuple(self.B.scale(v, x) for x in a.coords))

    # invariants ---------------------------------------------------------
    def is_hecke_invariant(self, a: InducedElement) -> bool:
        """Annihilated by every partial'_w with w != 1 (these span I(D))."""
        d = self.datum
        ok = all(self.is_zero(self.act(partial_prime_operator(w, d), a)) for w in d.weyl if w.length > 0)
        if ok and not self.is_weyl_invariant(a):
            raise AssertionError("Hecke-invariant class that is not Weyl-invariant")
        return ok

    def is_weyl_invariant(self, a: InducedElement) -> bool:
        d = self.datum
        W = d.weyl
        return all(self.equal(self.act(op_weyl(W.simple(i), d), a), a) for i in range(d.rank))

    # push and pull ------------------------------------------------------
    def j_pullback(self, b: tuple) -> InducedElement:
        b = self.B.element(b) if not isinstance(b, tuple) else b
        return InducedElement((b,) + tuple(self.B.zero() for _ in range(len(self.basis) - 1)))

    def j_pushforward(self, a: InducedElement) -> tuple:
        acc = self.B.zero()
        for u, b in zip(self.basis.elements, a.coords):
            acc = self.B.add(acc, self.B.scale(top(u), b))
        return acc

    def is_pullback(self, a: InducedElement) -> bool:
        return all(self.B.is_zero(x) for x in a.coords[1:])

    def top_operator(self) -> TwistedOperator:
        return partial_operator(self.datum.weyl.longest, self.datum)

    def project_weyl_formula(self, a: InducedElement) -> tuple[tuple, bool]:
        """b = j_*(a), checked against j^*(b) = partial_{w0}(a) being Hecke invariant."""
        b = self.j_pushforward(a)
        pa = self.act(self.top_operator(), a)
        ok = self.equal(self.j_pullback(b), pa) and self.is_hecke_invariant(pa)
        return b, ok

    # pairing ------------------------------------------------------------
    def module_pairing(self, a1: InducedElement, a2: InducedElement) -> tuple:
        """P_X(a1, a2) = j_*(a1 a2) = sum_{w,v} P(u_w, u_v) b_w b'_v."""
        B = self.B
        if not B.is_algebra:
            raise ModuleError("module pairing needs an algebra of coefficients")
        G = self.basis.gram
        acc = B.zero()
        for w, x in enumerate(a1.coords):
            if B.is_zero(x):
                continue
            for v, y in enumerate(a2.coords):
                if B.is_zero(y):
                    continue
                acc = B.add(acc, B.scale(G[w][v], B.multiply(x, y)))
        return acc

    def basis_class(self, w: int) -> InducedElement:
        one = (Laurent.one(self.datum, self.B.scalar_ring),)
        return self.tensor(self.basis.elements[w], one)

    def dual_class(self, w: int) -> InducedElement:
        one = (Laurent.one(self.datum, self.B.scalar_ring),)
        return self.tensor(self.basis.dual[w], one)

    def render(self, a: InducedElement) -> str:
        parts = []
        for u, b in zip(self.basis.elements, a.coords):
            if self.B.is_zero(b):
                continue
            comps = ", ".join(str(x) if k != F2 else f"{x}m" for k, x in zip(self.B.kinds, b))
            parts.append(f"({u}) (x) [{comps}]")
        return " + ".join(parts) or "0"


# flag variety ---------------------------------------------------------------

class FlagModel(InducedModule):
    """K_T(G/T) = R(T) (x)_{R(G)} R(T); the second factor plays the role of y."""

    def __init__(self, datum: RootDatum, basis: SteinbergBasis | None = None):
        super().__init__(CoefficientModule.flag(datum), basis)

    def cls(self, first: Laurent, second: Laurent | None = None) -> InducedElement:
        """The coset of first(x) * second(y)."""
        if second is None:
            second = Laurent.one(self.datum)
        return self.tensor(first, (second,))

    def project(self, a: InducedElement) -> Laurent:
        """partial_{w0} on the first factor, landing in the y-copy R(T) = K_G(G/T)."""
        pa = self.act(self.top_operator(), a)
        if not self.is_pullback(pa):
            raise AssertionError("projection did not land in the invariant part")
        b = pa.coords[0][0]
        if b != self.j_pushforward(a)[0]:
            raise AssertionError("projection disagrees with the pushforward")
        return b


def flag_model(datum: RootDatum, basis: SteinbergBasis | None = None) -> FlagModel:
    if not datum.is_simply_connected:
        raise ModuleError("flag model needs pi_1 torsion-free")
    return FlagModel(datum, basis)


# McLeod example -------------------------------------------------------------

def su2_basis(datum: RootDatum) -> SteinbergBasis:
    """The basis {1, x} of R(T) over R(G) for SU(2)."""
    return steinberg_basis(datum, [(0,), (1,)])


@dataclass
class McLeodReport:
    witness: str
    witness_weyl_invariant: bool
    witness_hecke_invariant: bool
    grid: list[dict] = field(default_factory=list)
    hecke_equals_pullback: bool = False
    weyl_strictly_larger: bool = False
    torsion_free_agree: bool = False

    @property
    def ok(self) -> bool:
        return (
            self.witness_weyl_invariant
            and not self.witness_hecke_invariant
            and self.hecke_equals_pullback
            and self.weyl_strictly_larger
            and self.torsion_free_agree
        )

    def to_json(self) -> dict:
        return {
            "witness": self.witness,
            "witness_weyl_invariant": self.witness_weyl_invariant,
            "witness_hecke_invariant": self.witness_hecke_invariant,
            "grid": self.grid,
            "hecke_invariants_equal_pullback_image": self.hecke_equals_pullback,
            "weyl_invariants_strictly_larger": self.weyl_strictly_larger,
            "torsion_free_weyl_equals_hecke": self.torsion_free_agree,
            "ok": self.ok,
        }


def mcleod_report(datum: RootDatum, free_samples: Sequence[Laurent] = ()) -> McLeodReport:
    """B = R(G) (+) R(G)/(2, x + x^{-1}) over SU(2) with basis {1, x}."""
    if datum.type_string.replace(" ", "") != "A1" or not datum.is_simply_connected:
        raise ModuleError("the McLeod example lives on SU(2)")
    basis = su2_basis(datum)
    A = InducedModule(CoefficientModule.su2_torsion(datum, free_rank=1), basis)
    zero = Laurent.zero(datum)
    witness = A.element([(zero, 0), (zero, 1)])
    rep = McLeodReport(
        witness="m.x",
        witness_weyl_invariant=A.is_weyl_invariant(witness),
        witness_hecke_invariant=A.is_hecke_invariant(witness),
    )
    free_parts = [zero] + list(free_samples)
    agree = True
    larger = False
    for f1 in free_parts:
        for t1 in (0, 1):
            for t2 in (0, 1):
                a = A.element([(f1, t1), (zero, t2)])
                h, w = A.is_hecke_invariant(a), A.is_weyl_invariant(a)
                pb = A.is_pullback(a)
                if f1 is zero:
                    rep.grid.append({"b1": t1, "b2": t2, "weyl": w, "hecke": h, "pullback": pb})
                agree &= h == pb
                larger |= w and not h
    rep.hecke_equals_pullback = agree
    rep.weyl_strictly_larger = larger
    # with torsion-free coefficients the two notions agree
    F = InducedModule(CoefficientModule.free(datum, 1), basis)
    ok = True
    for f1 in free_parts:
        for f2 in free_parts:
            a = F.element([(f1,), (f2,)])
            ok &= F.is_weyl_invariant(a) == F.is_hecke_invariant(a)
    rep.torsion_free_agree = ok
    return rep
