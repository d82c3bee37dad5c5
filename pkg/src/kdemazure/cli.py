"""Command-line interface: ``kdemazure <subcommand> --type A2 ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors. ``--output json`` output is deterministic for a fixed ``--seed``.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import Sequence

from .checks import selftest, su2_flag_expected
from .hecke import (
    NotInDError,
    TwistedOperator,
    hecke_relations_check,
    in_augmentation_ideal,
    normal_form,
    op_delta,
    op_scalar,
    op_weyl,
    random_operator,
)
from .kmodule import CoefficientModule, InducedModule, ModuleError, flag_model, mcleod_report
from .lattice import RootDatum, RootDatumError, build_root_datum
from .laurent import Laurent, LaurentError, parse_laurent, random_laurent
from .operators import OperatorError, braid_check, demazure_character, weyl_character
from .steinberg import SteinbergError, steinberg_basis

GRAMMAR = """\
types:     A1..A4, B2..B4, C3, C4, D4, G2, joined by 'x', optionally '*T<k>' (e.g. A1xA1, A2*T1)
lattice:   simply_connected | adjoint
weights:   comma-separated integers in fundamental-weight coordinates, torus coordinates last
           (write --weight=-1,0 for a leading minus sign)
elements:  integer combinations of x^k (rank one) or e[a,b,...], e.g. '2*e[1,0] - 1' or 'x^2 + x^-2'
operators: elements, s[i], d[i], dp[i] (1-based simple indices) combined with + - * and parentheses"""


class UsageError(Exception):
    pass


# helpers ------------------------------------------------------------------

def _datum(args) -> RootDatum:
    return build_root_datum(args.type, args.lattice, args.torus)


def _weight(datum: RootDatum, text: str) -> tuple[int, ...]:
    try:
        w = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad weight {text!r}") from None
    if len(w) != datum.dim:
        raise UsageError(f"weight needs {datum.dim} coordinates, got {len(w)}")
    return w


def _word(datum: RootDatum, text: str) -> tuple[int, ...]:
    if text in ("", "e", "1"):
        return ()
    parts = text.split(",") if "," in text else list(text)
    try:
        word = tuple(int(p) - 1 for p in parts)
    except ValueError:
        raise UsageError(f"bad word {text!r}") from None
    if any(not 0 <= i < datum.rank for i in word):
        raise UsageError(f"word letters must lie in 1..{datum.rank}")
    return word


def _samples(datum: RootDatum, seed: int, n: int) -> list[Laurent]:
    rng = random.Random(seed)
    return [random_laurent(datum, rng, n_terms=4, exp_range=(-4, 4), coeff_range=(-9, 9)) for _ in range(n)]


def _laurent_out(u: Laurent, datum: RootDatum, var: str = "x") -> dict:
    return {"text": u.render(var), "terms": u.to_json()}


_OP_TOKEN = re.compile(
    r"\s*(?:(dp|d|s)\[(\d+)\]|(\d+(?:/\d+)?)|(e\[[^\]]*\])|(x(?:\^-?\d+)?)|([-+*()]))"
)


def parse_operator(datum: RootDatum, text: str, scalar_ring: str = "integers") -> TwistedOperator:
    """Recursive-descent parser for the operator grammar."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _OP_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse operator at {text[pos:]!r}")
        pos = m.end()
        kind, idx, num, ebr, xv, punct = m.groups()
        if kind:
            i = int(idx) - 1
            if not 0 <= i < datum.rank:
                raise UsageError(f"simple index {idx} out of range 1..{datum.rank}")
            if kind == "s":
                toks.append(op_weyl(datum.weyl.simple(i), datum))
            else:
                toks.append(op_delta("delta" if kind == "d" else "delta_prime", i, datum))
        elif num or ebr or xv:
            toks.append(op_scalar(parse_laurent(datum, num or ebr or xv, scalar_ring)))
        else:
            toks.append(punct)
    k = 0

    def peek():
        return toks[k] if k < len(toks) else None

    def expr():
        nonlocal k
        out = term()
        while peek() in ("+", "-"):
            op = toks[k]
            k += 1
            rhs = term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term():
        nonlocal k
        out = factor()
        while peek() == "*":
            k += 1
            out = out * factor()
        return out

    def factor():
        nonlocal k
        t = peek()
        if t == "-":
            k += 1
            return -factor()
        if t == "(":
            k += 1
            out = expr()
            if peek() != ")":
                raise UsageError("unbalanced parentheses")
            k += 1
            return out
        if isinstance(t, TwistedOperator):
            k += 1
            return t
        raise UsageError(f"unexpected token {t!r}")

    if not toks:
        raise UsageError("empty operator")
    result = expr()
    if k != len(toks):
        raise UsageError(f"trailing input in operator {text!r}")
    return result


# subcommands -------------------------------------------------------------

def cmd_char(args):
    d = _datum(args)
    lam = _weight(d, args.weight)
    chi = weyl_character(d, lam)
    data = {"type": d.type_string, "weight": list(lam), "character": _laurent_out(chi, d),
            "dimension": str(chi.evaluate_at_identity())}
    return 0, data, chi.render()


def cmd_demazure_char(args):
    d = _datum(args)
    lam = _weight(d, args.weight)
    w = d.weyl.from_word(_word(d, args.w))
    chi = demazure_character(w, lam, d)
    data = {"type": d.type_string, "w": [i + 1 for i in w.word], "weight": list(lam),
            "character": _laurent_out(chi, d)}
    return 0, data, chi.render()


def cmd_braid_check(args):
    d = _datum(args)
    us = _samples(d, args.seed, args.samples)
    W = d.weyl
    targets = [W.longest] if args.longest_only else list(W)
    rows = [{"w": [i + 1 for i in w.word], "reduced_words": len(W.all_reduced_words(w)),
             "ok": braid_check(d, w, us)} for w in targets]
    ok = all(r["ok"] for r in rows)
    plain = "\n".join(f"{W[0].word_str() if not r['w'] else ''.join(map(str, r['w']))}: "
                      f"{r['reduced_words']} words {'ok' if r['ok'] else 'FAIL'}" for r in rows)
    return (0 if ok else 1), {"type": d.type_string, "samples": args.samples, "ok": ok, "elements": rows}, plain


def cmd_hecke(args):
    d = _datum(args)
    rng = random.Random(args.seed)
    rep = hecke_relations_check(d, [random_laurent(d, rng, n_terms=3, exp_range=(-2, 2)) for _ in range(3)])
    trips = []
    for _ in range(args.samples):
        op = random_operator(d, rng, n_terms=3, exp_range=(-2, 2))
        nf = normal_form(op)
        trips.append(nf.reconstruct() == op)
    ok = rep.ok and all(trips)
    data = {"type": d.type_string, "relations": rep.to_json(), "round_trips": len(trips),
            "round_trips_ok": all(trips), "ok": ok}
    plain = f"relations checked: {rep.checked}, failures: {len(rep.failures)}\n" \
            f"normal-form round trips: {sum(trips)}/{len(trips)}\n{'ok' if ok else 'FAIL'}"
    return (0 if ok else 1), data, plain


def cmd_basis(args):
    d = _datum(args)
    if not d.is_simply_connected:
        raise UsageError("a Steinberg basis needs pi_1 torsion-free; use --lattice simply_connected")
    weights = None
    if args.weights:
        weights = [_weight(d, w) for w in args.weights.split(";")]
    B = steinberg_basis(d, weights)
    lines = [f"|W| = {len(B)}, Gram determinant = {B.gram_det.render()}"]
    for w, u, v in zip(d.weyl, B.elements, B.dual):
        lines.append(f"{w.word_str():>12}  u = {u.render():<16} dual = {v.render()}")
    data = B.to_json()
    data["gram"] = [[g.render() for g in row] for row in B.gram]
    data["determinant"] = B.gram_det.render()
    data["dual"] = [_laurent_out(v, d) for v in B.dual]
    return 0, data, "\n".join(lines)


def cmd_normal_form(args):
    d = _datum(args)
    op = parse_operator(d, args.op, args.scalars)
    nf = normal_form(op)
    lines = [f"{d.weyl[k].word_str()}: {c.render()}" for k, c in
             sorted(nf.coeffs.items(), key=lambda kc: (d.weyl[kc[0]].length, kc[0]))] or ["0"]
    aug = in_augmentation_ideal(op)
    lines.append(f"annihilates 1: {aug}")
    data = {"type": d.type_string, "operator": args.op, "normal_form": nf.to_json(), "augmentation_ideal": aug}
    return 0, data, "\n".join(lines)


def cmd_invariants(args):
    d = _datum(args)
    rng = random.Random(args.seed)
    A = InducedModule(CoefficientModule.free(d, args.rank))
    W = d.weyl
    pool = [Laurent.one(d)]
    for i in range(d.rank):
        lam = [0] * d.dim
        lam[i] = 1
        if d.in_lattice(lam):
            pool.append(weyl_character(d, lam, verify=False))
    top_op = A.top_operator()
    n_inv = n_agree = n_unique = 0
    for t in range(args.samples):
        if t % 2:
            b = tuple(rng.choice(pool) * rng.randint(-3, 3) for _ in range(args.rank))
            a = A.j_pullback(b)
        else:
            a = A.element([[rng.choice(pool) * rng.randint(-3, 3) for _ in range(args.rank)] for _ in W])
        h = A.is_hecke_invariant(a)
        n_inv += h
        n_agree += h == A.is_pullback(a)
        b, ok = A.project_weyl_formula(a)
        # uniqueness: j^* is injective since u_1 = 1 is a basis vector
        n_unique += ok and A.equal(A.j_pullback(b), A.act(top_op, a))
    ok = n_agree == args.samples == n_unique
    data = {"type": d.type_string, "rank": args.rank, "samples": args.samples, "hecke_invariant": n_inv,
            "hecke_iff_pullback": n_agree, "projection_ok": n_unique, "ok": ok}
    plain = (f"{args.samples} samples, {n_inv} Hecke-invariant; invariant <=> pullback on {n_agree}; "
             f"projection formula on {n_unique}\n{'ok' if ok else 'FAIL'}")
    return (0 if ok else 1), data, plain


def cmd_mcleod(args):
    d = _datum(args)
    if d.dim != 1:
        raise UsageError("the torsion example lives on SU(2); use --type A1")
    rep = mcleod_report(d, [weyl_character(d, (k,), verify=False) for k in (1, 2)])
    data = rep.to_json()
    lines = [f"witness m.x: Weyl-invariant {rep.witness_weyl_invariant}, "
             f"Hecke-invariant {rep.witness_hecke_invariant}"]
    lines += [f"  b1={g['b1']} b2={g['b2']}: weyl={g['weyl']} hecke={g['hecke']} pullback={g['pullback']}"
              for g in rep.grid]
    lines.append("ok" if rep.ok else "FAIL")
    return (0 if rep.ok else 1), data, "\n".join(lines)


def cmd_flag(args):
    d = _datum(args)
    F = flag_model(d)
    if args.first is not None or args.k is not None:
        if args.k is not None:
            if d.dim != 1:
                raise UsageError("--k/--l need a rank-one lattice; use --first/--second")
            first, second = Laurent.monomial(d, (args.k,)), Laurent.monomial(d, (args.l,))
        else:
            first = parse_laurent(d, args.first, args.scalars)
            second = parse_laurent(d, args.second or "1", args.scalars)
        p = F.project(F.cls(first, second))
        return 0, {"type": d.type_string, "first": first.to_json(), "second": second.to_json(),
                   "projection": _laurent_out(p, d, "y")}, p.render("y")
    if d.dim != 1:
        raise UsageError("the table mode needs type A1; pass --first/--second")
    rows, ok = [], True
    for k in range(-5, 6):
        for l in range(-2, 3):
            p = F.project(F.cls(Laurent.monomial(d, (k,)), Laurent.monomial(d, (l,))))
            good = {e[0]: c for e, c in p.terms.items()} == su2_flag_expected(k, l)
            ok &= good
            rows.append({"k": k, "l": l, "projection": p.render("y"), "ok": good})
    plain = "\n".join(f"k={r['k']:>2} l={r['l']:>2}: {r['projection']}" for r in rows)
    return (0 if ok else 1), {"type": d.type_string, "table": rows, "ok": ok}, plain + ("\nok" if ok else "\nFAIL")


def cmd_selftest(args):
    d = _datum(args)
    rep = selftest(d, args.seed, quick=args.quick)
    lines = [f"{'PASS' if r.ok else 'FAIL'} {r.name} ({r.checked}) {r.detail}".rstrip() for r in rep.results]
    return (0 if rep.ok else 1), rep.to_json(), "\n".join(lines)


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", default="A1", help="root system type, e.g. A2 or A1xA1*T1")
    common.add_argument("--lattice", default="simply_connected", choices=["simply_connected", "adjoint"])
    common.add_argument("--torus", type=int, default=0, help="rank of an extra central torus factor")
    common.add_argument("--scalars", default="integers", choices=["integers", "rationals"])
    common.add_argument("--output", default="plain", choices=["plain", "json"])
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(
        prog="kdemazure",
        description="Demazure operators, the Hecke ring and induced K-theory modules.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, epilog=GRAMMAR,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(func=fn)
        return sp

    sp = add("char", cmd_char, "Weyl character of a dominant weight")
    sp.add_argument("--weight", required=True)
    sp = add("demazure-char", cmd_demazure_char, "Demazure character partial_w(e^lambda)")
    sp.add_argument("--w", required=True, help="word in simple reflections, e.g. 12 or 1,2; 'e' for identity")
    sp.add_argument("--weight", required=True)
    sp = add("braid-check", cmd_braid_check, "word independence of partial_w and partial'_w")
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--longest-only", action="store_true")
    sp = add("hecke", cmd_hecke, "Hecke ring relations and normal-form round trips")
    sp.add_argument("--samples", type=int, default=10)
    sp = add("basis", cmd_basis, "Steinberg basis, Gram matrix and dual basis")
    sp.add_argument("--weights", help="override weights separated by ';' (first must be 0)")
    sp = add("normal-form", cmd_normal_form, "expand an operator in the partial'_w basis")
    sp.add_argument("--op", required=True)
    sp = add("invariants", cmd_invariants, "Hecke invariants versus the pullback image for free coefficients")
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--samples", type=int, default=20)
    add("mcleod", cmd_mcleod, "SU(2) torsion example")
    sp = add("flag", cmd_flag, "projection on K_T of the flag variety")
    sp.add_argument("--k", type=int)
    sp.add_argument("--l", type=int, default=0)
    sp.add_argument("--first")
    sp.add_argument("--second")
    sp = add("selftest", cmd_selftest, "run the property suites for one type")
    sp.add_argument("--quick", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, data, plain = args.func(args)
    except (UsageError, RootDatumError, LaurentError, OperatorError, ModuleError) as exc:
        print(f"error: {exc}\n\n{GRAMMAR}", file=sys.stderr)
        return 2
    except (NotInDError, SteinbergError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.output == "json":
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        print(plain)
    return code


if __name__ == "__main__":
    sys.exit(main())
