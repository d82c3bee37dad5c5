"""Property suites over one root datum, used by ``selftest`` and the tests."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .hecke import (
    annihilates_top,
    hecke_relations_check,
    in_augmentation_ideal,
    normal_form,
    random_operator,
)
from .kmodule import CoefficientModule, InducedModule, mcleod_report, flag_model
from .lattice import RootDatum
from .laurent import Laurent, random_laurent
from .operators import (
    OperatorKind,
    antisymmetrize,
    apply_simple,
    averaging_u0,
    braid_check,
    partial_prime,
    partial_prime_conjugated,
    projection_pi,
    top,
    weyl_character,
    weyl_denominator,
)
from .steinberg import SteinbergError, steinberg_basis

D, DP = OperatorKind.delta, OperatorKind.delta_prime


@dataclass
class CheckResult:
    name: str
    ok: bool
    checked: int = 0
    seconds: float = 0.0
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checked": self.checked, "detail": self.detail}


@dataclass
class Report:
    type_string: str
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {"type": self.type_string, "ok": self.ok, "checks": [r.to_json() for r in self.results]}


def _run(name: str, fn: Callable[[], tuple[int, list[str]]]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        n, fails = fn()
        ok, detail = not fails, "; ".join(fails[:3])
    except Exception as exc:  # report, do not crash the suite
        n, ok, detail = 0, False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, ok, n, time.perf_counter() - t0, detail)


def samples(datum: RootDatum, rng: random.Random, n: int, **kw) -> list[Laurent]:
    return [random_laurent(datum, rng, **kw) for _ in range(n)]


# individual suites ----------------------------------------------------------

def check_braid(datum: RootDatum, us: list[Laurent]) -> tuple[int, list[str]]:
    fails = [repr(w) for w in datum.weyl if not braid_check(datum, w, us)]
    return len(datum.weyl), fails


def check_operator_identities(datum: RootDatum, us: list[Laurent], vs: list[Laurent]) -> tuple[int, list[str]]:
    W = datum.weyl
    one = Laurent.one(datum)
    fails: list[str] = []
    n = 0
    roots = list(datum.positive_roots)
    for a in roots + [tuple(-x for x in r) for r in roots]:
        s = lambda u, a=a: u.reflect(a)
        dl = lambda u, a=a: apply_simple(D, a, u)
        dp = lambda u, a=a: apply_simple(DP, a, u)
        ea = Laurent.monomial(datum, a)
        ema = Laurent.monomial(datum, tuple(-x for x in a))
        neg = tuple(-x for x in a)
        if dl(one) != 1 or dp(one) != 0:
            fails.append(f"unit values at {a}")
        for u, v in zip(us, vs):
            n += 1
            checks = {
                "square": dl(dl(u)) == dl(u),
                "square'": dp(dp(u)) == dp(u),
                "reflect": s(dl(u)) == dl(u),
                "reflect-": dl(s(u)) == apply_simple(D, neg, u) == u + ea * u - ea * dl(u),
                "two-operators": dp(u) == ea * (dl(u) - u),
                "leibniz": dl(u * v) == dl(u) * v + s(u) * (dl(v) - v),
                "product'": dp(u * v) == dp(u) * v + s(u) * dp(v),
                "product": dl(u * v) == dl(u) * v + ema * s(u) * dp(v),
            }
            fails += [f"{k} at {a}" for k, ok in checks.items() if not ok]
    for w in W:
        winv = W.inverse(w)
        for i, a in enumerate(datum.simple_roots):
            wa = w.act(a)
            for u in us[:5]:
                if apply_simple(D, i, u.weyl_act(winv)).weyl_act(w) != apply_simple(D, wa, u):
                    fails.append(f"conjugation {w!r} at alpha_{i + 1}")
        for u in us[:5]:
            n += 1
            if partial_prime(w, u) != partial_prime_conjugated(w, u):
                fails.append(f"rho-conjugation {w!r}")
    return n, fails


def check_characters(datum: RootDatum, rng: random.Random, count: int = 5, bound: int = 2) -> tuple[int, list[str]]:
    fails = []
    d = weyl_denominator(datum)
    if d != antisymmetrize(Laurent.one(datum)):
        fails.append("d != J(1)")
    if top(d) != len(datum.weyl):
        fails.append("partial_{w0}(d) != |W|")
    for _ in range(count):
        lam = [rng.randint(0, bound) if i < datum.rank else rng.randint(-bound, bound) for i in range(datum.dim)]
        if not datum.in_lattice(lam):
            continue
        chi = weyl_character(datum, lam, verify=True)
        if not chi.is_invariant():
            fails.append(f"character of {lam} not invariant")
    return count, fails


def check_hecke(datum: RootDatum, rng: random.Random, count: int = 10) -> tuple[int, list[str]]:
    fails = []
    rep = hecke_relations_check(datum, samples(datum, rng, 3, n_terms=3, exp_range=(-2, 2)))
    fails += rep.failures
    n = rep.checked
    for _ in range(count):
        op = random_operator(datum, rng, n_terms=3, exp_range=(-2, 2))
        nf = normal_form(op)
        n += 1
        if nf.reconstruct() != op:
            fails.append("normal form round-trip")
        if in_augmentation_ideal(op) != annihilates_top(op):
            fails.append("augmentation equivalence")
    return n, fails


def check_steinberg(datum: RootDatum, rng: random.Random, count: int = 5) -> tuple[int, list[str]]:
    try:
        B = steinberg_basis(datum)
    except SteinbergError as exc:
        return 0, [str(exc)]
    fails = []
    n = len(B)
    if n <= 12:
        for i, row in enumerate(B.duality_matrix()):
            if any(x != (1 if i == j else 0) for j, x in enumerate(row)):
                fails.append(f"duality row {i}")
    for u in samples(datum, rng, count, n_terms=3, exp_range=(-2, 2)):
        if B.combine(B.expand(u)) != u:
            fails.append(f"reproducing identity on {u}")
    return n + count, fails


def check_modules(datum: RootDatum, rng: random.Random, count: int = 5) -> tuple[int, list[str]]:
    fails = []
    A = InducedModule(CoefficientModule.free(datum, 1))
    n = len(A)
    inv = [weyl_character(datum, w, verify=False) for w in ([0] * datum.dim, [1] + [0] * (datum.dim - 1))
           if datum.in_lattice(w)]
    top_op = A.top_operator()
    for _ in range(count):
        a = A.element([(rng.choice(inv) * rng.randint(-3, 3),) for _ in range(n)])
        b, ok = A.project_weyl_formula(a)
        if not ok:
            fails.append("projection check")
        if A.is_hecke_invariant(a) != A.is_pullback(a):
            fails.append("Hecke invariants != pullback image")
        pa = A.act(top_op, a)
        if not A.equal(A.act(top_op, pa), pa):
            fails.append("pi not idempotent")
        if A.j_pushforward(A.j_pullback(b)) != b:
            fails.append("j_* j^* != 1")
    return count, fails


def check_discriminant(datum: RootDatum, rng: random.Random, count: int = 5) -> tuple[int, list[str]]:
    u0 = averaging_u0(datum)
    fails = []
    W = datum.weyl
    for u in samples(datum, rng, count, n_terms=3, exp_range=(-2, 2)):
        avg = Laurent.zero(datum, "rationals")
        for w in W:
            avg = avg + u.weyl_act(w).to_rational()
        avg = avg.scale(Fraction(1, len(W)))
        if projection_pi(u0, u) != avg:
            fails.append(f"pi != average on {u}")
    return count, fails


def selftest(datum: RootDatum, seed: int = 0, quick: bool = False) -> Report:
    rng = random.Random(seed)
    rep = Report(datum.type_string)
    big = len(datum.weyl) > 12
    ns = 3 if (quick or big) else 10
    us = samples(datum, rng, ns)
    vs = samples(datum, rng, ns)
    rep.results.append(_run("braid", lambda: check_braid(datum, us)))
    rep.results.append(_run("operator-identities", lambda: check_operator_identities(datum, us, vs)))
    rep.results.append(_run("characters", lambda: check_characters(datum, rng)))
    if len(datum.weyl) <= 12:
        rep.results.append(_run("hecke", lambda: check_hecke(datum, rng, 3 if quick else 10)))
    rep.results.append(_run("discriminant", lambda: check_discriminant(datum, rng)))
    if datum.is_simply_connected:
        rep.results.append(_run("steinberg", lambda: check_steinberg(datum, rng)))
        if len(datum.weyl) <= 12:
            rep.results.append(_run("modules", lambda: check_modules(datum, rng)))
    if datum.type_string == "A1" and datum.dim == 1 and datum.is_simply_connected:
        rep.results.append(_run("mcleod", lambda: (1, [] if mcleod_report(datum).ok else ["mcleod report"])))
        rep.results.append(_run("flag", lambda: _flag_table(datum)))
    return rep


def su2_flag_expected(k: int, l: int) -> dict[int, int]:
    """Exponent -> coefficient of the three-case SU(2) formula times y^l."""
    if k >= 0:
        exps, c = range(-k, k + 1, 2), 1
    elif k == -1:
        exps, c = (), 0
    else:
        exps, c = range(k + 2, -k - 1, 2), -1
    return {e + l: c for e in exps}


def _flag_table(datum: RootDatum) -> tuple[int, list[str]]:
    F = flag_model(datum)
    fails = []
    n = 0
    for k in range(-5, 6):
        for l in range(-2, 3):
            n += 1
            got = F.project(F.cls(Laurent.monomial(datum, (k,)), Laurent.monomial(datum, (l,))))
            if {e[0]: c for e, c in got.terms.items()} != su2_flag_expected(k, l):
                fails.append(f"k={k} l={l}")
    return n, fails
