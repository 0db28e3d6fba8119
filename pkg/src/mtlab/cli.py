"""Batch front end: ``mtlab <group> <command> [files] [flags]``.

Exit status: 0 success, 1 a check failed (report still printed), 2 usage or
input-format error.  Reports go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import binlab, dtree, ecf, setsys, synth, tusp
from .boolfn import FunctionFamily, TruthTable
from .costs import CostTable, format_bits, parse_bits


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {path}: {e}") from e


class Out:
    """Collects a report as JSON or text lines."""

    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, obj, text):
        if self.as_json:
            print(json.dumps(obj, sort_keys=True))
        else:
            print(text if isinstance(text, str) else "\n".join(text))


def _bits(X: str, l: int) -> int:
    if len(X) != l or set(X) - {"0", "1"}:
        raise UsageError(f"selection {X!r} must be {l} characters of 0/1")
    return parse_bits(X)


def _fmt_cost_table(C: CostTable) -> list[str]:
    return [f"C({format_bits(X, C.l)}) = {C.values[X]}" for X in range(1 << C.l)]


# ---------------------------------------------------------------- ecf / hs


def cmd_ecf_validate(a, out):
    C = CostTable.from_json(_load(a.file))
    rep = ecf.validate_ecf(C)
    out.emit(rep.to_json(), rep.lines())
    return 0 if rep.passes else 1


def cmd_ecf_cstar(a, out):
    C = ecf.cstar()
    out.emit(C.to_json(), _fmt_cost_table(C))
    return 0


def cmd_ecf_random(a, out):
    C = ecf.random_ecf(a.l, a.max_value, a.seed)
    out.emit(C.to_json(), _fmt_cost_table(C))
    return 0


def cmd_ecf_realize(a, out):
    C = CostTable.from_json(_load(a.file))
    A = setsys.realize_ecf(C)
    back = setsys.hs_cost_table(A)
    ok = back == C
    text = [f"{u} w={w} in sets " + ",".join(str(i + 1) for i, S in enumerate(A.sets) if u in S) for u, w in zip(A.universe, A.weights)]
    text.append(f"hitting-set cost table reproduces input: {'yes' if ok else 'NO'}")
    out.emit({"system": A.to_json(), "reproduces": ok}, text)
    return 0 if ok else 1


def cmd_hs_solve(a, out):
    A = setsys.WeightedSetSystem.from_json(_load(a.file))
    X = _bits(a.X, A.l)
    ids, w = setsys.min_hitting_set(A, X)
    out.emit({"X": a.X, "hitting_set": list(ids), "weight": w}, f"X={a.X}: {{{', '.join(ids)}}} weight {w}")
    return 0


def cmd_hs_table(a, out):
    A = setsys.WeightedSetSystem.from_json(_load(a.file))
    C = setsys.hs_cost_table(A)
    out.emit(C.to_json(), _fmt_cost_table(C))
    return 0


# ---------------------------------------------------------------- decision trees


def cmd_dt_depth(a, out):
    f = TruthTable.from_json(_load(a.file))
    d = dtree.depth(f)
    out.emit({"depth": d}, f"D(f) = {d}")
    return 0


def cmd_dt_cost_table(a, out):
    F = FunctionFamily.from_json(_load(a.file))
    C = dtree.multitask_cost(F, workers=a.threads)
    rep = ecf.validate_ecf(C)
    out.emit({**C.to_json(), "ecf": rep.to_json()}, _fmt_cost_table(C) + rep.lines())
    return 0 if rep.passes else 1


def cmd_dt_tree(a, out):
    f = TruthTable.from_json(_load(a.file))
    T = dtree.optimal_tree(f)

    def show(t, pad=""):
        if isinstance(t, dtree.Leaf):
            return [f"{pad}-> {t.label}"]
        return [f"{pad}x{t.q}?"] + show(t.zero, pad + "  0 ") + show(t.one, pad + "  1 ")

    out.emit({"depth": dtree.tree_depth(T), "tree": dtree.tree_to_json(T)}, [f"depth {dtree.tree_depth(T)}"] + show(T))
    return 0


# ---------------------------------------------------------------- tusp


def _tusp(path):
    return tusp.SearchProblem.from_json(_load(path))


def cmd_tusp_classify(a, out):
    W = _tusp(a.file)
    c = tusp.classify(W)
    js = c.to_json(W.n)
    text = [f"total: {'yes' if c.total else 'no (' + js['not_total_at'] + ')'}",
            f"unique: {'yes' if c.unique else 'no (' + js['not_unique_at'] + ')'}",
            f"TUSP: {'yes' if c.is_tusp else 'no'}"]
    out.emit({**js, "is_tusp": c.is_tusp}, text)
    return 0 if c.is_tusp else 1


def cmd_tusp_depth(a, out):
    W = _tusp(a.file)
    s, D = tusp.s_of(W), tusp.depth_tusp(W)
    out.emit({"s": s, "depth": D}, f"s(W) = {s}, D(W) = {D}")
    return 0


def cmd_tusp_solve(a, out):
    W = _tusp(a.file)
    _, worst = tusp.solve_quadratic(W)
    s = tusp.s_of(W)
    ok = worst <= min(s * s, tusp.triangular(s))
    out.emit(
        {"worst": worst, "s": s, "s_squared": s * s, "triangular": tusp.triangular(s), "ok": ok},
        f"phase solver worst case {worst} <= s(s+1)/2 = {tusp.triangular(s)} <= s^2 = {s * s}: {'pass' if ok else 'FAIL'}",
    )
    return 0 if ok else 1


def cmd_tusp_from_udnf(a, out):
    obj = _load(a.file)
    W = tusp.udnf_to_tusp(tusp.Dnf.from_json(obj["f1"]), tusp.Dnf.from_json(obj["f2"]), int(obj["n"]))
    out.emit(W.to_json(), W.witnesses)
    return 0


def cmd_tusp_find_gap(a, out):
    r = tusp.find_gap_tusp(a.n, a.seed, a.budget)
    if r is None:
        out.emit({"found": False, "tried": a.budget}, f"no TUSP with D > s in {a.budget} tries")
        return 0
    out.emit(
        {"found": True, "s": r.s, "depth": r.D, "tusp": r.W.to_json(), "tried": r.tried},
        [f"s(W) = {r.s}, D(W) = {r.D}"] + list(r.W.witnesses),
    )
    return 0


# ---------------------------------------------------------------- werf / bins


def cmd_werf_random(a, out):
    bound = binlab.claim_bound(a.m, a.d, a.t)
    print(f"failure probability per (S, c): {bound['expression']} = {bound['p_S_c']:.4g}; union bound {bound['union']:.4g}", file=sys.stderr)
    J, tries = binlab.sample_werf(a.m, a.d, a.t, a.seed, a.max_tries)
    out.emit({**J.to_json(), "tries": tries}, [f"found after {tries} tries", json.dumps(J.to_json())])
    return 0


def cmd_werf_verify(a, out):
    J = binlab.Werf.from_json(_load(a.file))
    r = binlab.verify_werf(J, a.t)
    if r.ok:
        out.emit({"ok": True}, f"({J.m},{J.d},{a.t})-wERF: pass")
        return 0
    out.emit({"ok": False, "c": r.c, "S": list(r.S)}, f"FAIL: value {r.c} has no preimage vanishing on S={list(r.S)}")
    return 1


def _bin(path):
    return binlab.bin_from_json(_load(path))


def cmd_bin_build(a, out):
    W = _tusp(a.tusp)
    J = binlab.parity_werf(a.parity) if a.parity else binlab.Werf.from_json(_load(a.werf))
    b = binlab.build_mystery_bin(W, J, a.M if a.M is not None else J.d)
    out.emit(b.to_json(), json.dumps(b.to_json()))
    return 0


def cmd_bin_certify(a, out):
    r = binlab.certify_mbf(_bin(a.file), _fraction(a.T), _fraction(a.delta))
    out.emit({**r.to_json(), "pass": r.ok}, r.lines())
    return 0 if r.ok else 1


def cmd_bin_security(a, out):
    r = binlab.security(_bin(a.file), a.q)
    out.emit({"q": r.q, "security": str(r.beta), "keys": r.keys, "M": r.M}, f"security at q={r.q}: {r.beta} ({r.keys}/{r.M} keys)")
    return 0


def cmd_bin_lift(a, out):
    b = binlab.xor_lift(_bin(a.file), a.c)
    out.emit(b.to_json(), json.dumps(b.to_json()))
    return 0


# ---------------------------------------------------------------- synth


def _spec(path):
    return synth.SynthesisSpec.from_json(_load(path))


def cmd_synth_build(a, out):
    F = synth.build_family(_spec(a.file))
    out.emit(F.to_json(), json.dumps(F.to_json()))
    return 0


def cmd_synth_solve(a, out):
    spec = _spec(a.file)
    r = synth.two_phase_solver(spec, _bits(a.X, spec.A.l))
    out.emit(
        {"X": a.X, "hitting_set": list(r.hitting_set), "worst": r.worst, "bound": r.bound},
        f"X={a.X}: hitting set {{{', '.join(r.hitting_set)}}}, worst case {r.worst} queries (per-bin bound {r.bound})",
    )
    return 0 if r.worst <= r.bound else 1


def cmd_synth_verify(a, out):
    spec = _spec(a.file)
    budgets = None
    if a.budgets:
        budgets = {u: int(q) for u, q in _load(a.budgets).items()}
    rep = synth.verify_sandwich(spec, _fraction(a.T), _fraction(a.eps), budgets, workers=a.threads)
    out.emit({**rep.to_json(), "pass": rep.ok}, rep.text())
    return 0 if rep.ok else 1


def _fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"not a number: {text!r}") from e


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--threads", type=int, default=1, help="worker threads (1 = serial)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="mtlab", description="Exact multitask decision-tree costs, hitting sets and mystery bins.")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def group(name, help):
        g = groups.add_parser(name, help=help)
        return g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def cmd(g, name, fn, help, file=True):
        c = g.add_parser(name, help=help, parents=[common])
        if file:
            c.add_argument("file", help="JSON input, or - for stdin")
        c.set_defaults(fn=fn)
        return c

    g = group("ecf", "economic cost functions")
    cmd(g, "validate", cmd_ecf_validate, "check the three axioms")
    cmd(g, "cstar", cmd_ecf_cstar, "print the C* table", file=False)
    c = cmd(g, "random", cmd_ecf_random, "random ECF", file=False)
    c.add_argument("--l", type=int, required=True)
    c.add_argument("--max-value", type=int, default=8)
    c.add_argument("--seed", type=int, required=True)
    cmd(g, "realize", cmd_ecf_realize, "set system whose hitting-set cost is the input")

    g = group("hs", "hitting sets")
    c = cmd(g, "solve", cmd_hs_solve, "minimum-weight hitting set")
    c.add_argument("--X", required=True, help="selection bits, X1 first")
    cmd(g, "table", cmd_hs_table, "hitting-set cost for every selection")

    g = group("dt", "decision trees")
    cmd(g, "depth", cmd_dt_depth, "exact depth of a truth table")
    cmd(g, "cost-table", cmd_dt_cost_table, "multitask cost table of a family")
    cmd(g, "tree", cmd_dt_tree, "a depth-optimal tree")

    g = group("tusp", "total unique search problems")
    cmd(g, "classify", cmd_tusp_classify, "totality and uniqueness")
    cmd(g, "depth", cmd_tusp_depth, "s(W) and exact D(W)")
    cmd(g, "solve", cmd_tusp_solve, "phase solver worst case against its bounds")
    cmd(g, "from-udnf", cmd_tusp_from_udnf, "TUSP from a complementary pair of uDNFs")
    c = cmd(g, "find-gap", cmd_tusp_find_gap, "random search for D(W) > s(W)", file=False)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--budget", type=int, default=200)

    g = group("werf", "weak exposure-resilient functions")
    c = cmd(g, "random", cmd_werf_random, "sample until verified", file=False)
    for flag in ("--m", "--d", "--t", "--seed"):
        c.add_argument(flag, type=int, required=True)
    c.add_argument("--max-tries", type=int, default=100)
    c = cmd(g, "verify", cmd_werf_verify, "check the wERF property")
    c.add_argument("--t", type=int, required=True)

    g = group("bin", "bin functions")
    c = cmd(g, "build", cmd_bin_build, "structured mystery bin", file=False)
    c.add_argument("--tusp", required=True, help="TUSP JSON")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--werf", help="wERF JSON")
    src.add_argument("--parity", type=int, metavar="M_BITS", help="use the parity wERF on this many bits")
    c.add_argument("--M", type=int, help="key count (default: the wERF range)")
    c = cmd(g, "certify", cmd_bin_certify, "check the three mystery-bin properties")
    c.add_argument("--T", required=True)
    c.add_argument("--delta", required=True)
    c = cmd(g, "security", cmd_bin_security, "exact security game value")
    c.add_argument("--q", type=int, required=True)
    c = cmd(g, "lift", cmd_bin_lift, "XOR block lift")
    c.add_argument("--c", type=int, required=True)

    g = group("synth", "family synthesis from a set system and bins")
    cmd(g, "build", cmd_synth_build, "materialize the function family")
    c = cmd(g, "solve", cmd_synth_solve, "two-phase solver worst case")
    c.add_argument("--X", required=True)
    c = cmd(g, "verify", cmd_synth_verify, "sandwich report")
    c.add_argument("--T", required=True, help="cost scale")
    c.add_argument("--eps", required=True)
    c.add_argument("--budgets", help="JSON object element id -> adversary query budget")
    return p


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"mtlab: {e}", file=sys.stderr)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        return a.fn(a, Out(a.json))
    except UsageError as e:
        print(f"mtlab: {e}", file=sys.stderr)
        return 2
    except (KeyError, TypeError) as e:
        print(f"mtlab: malformed input: {e!r}", file=sys.stderr)
        return 2
    except binlab.WerfSearchError as e:
        print(f"mtlab: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"mtlab: {e}", file=sys.stderr)
        return 2


def run(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
