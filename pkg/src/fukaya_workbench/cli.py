"""Command line front end.

Every verb prints a deterministic report; rerunning a command gives
byte-identical output.  --format machine swaps the human lines for a
flat key=value block.  Exit codes: 0 success, 1 verification failure,
2 usage or parse errors.  The environment variable WORKBENCH_SEED
(default 0) seeds the randomized self-check options.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

from .ainfinity import (
    check_strict_unit,
    element_to_text,
    find_ainf_violation,
    functor_defect,
    functor_shift,
    linf_defect,
    load_category,
    load_functor,
    load_linf,
    load_ocha,
    measure_discrepancies,
    ocha_defect,
    ocha_specialization_report,
)
from .budget import (
    IndexInput,
    continuation_shift,
    energy_action_check,
    eps_delta_budget,
    strip_end_bound,
    thin_part_count,
    validate_floer_window,
    vertex_curvature_budget,
    virtual_dimension,
)
from .novikov import ActionValue
from .strata import (
    ColoredTree,
    Glue,
    Surface,
    cluster_strata_for_shape,
    coloring_cone_dim,
    generalized_corner_flag,
    intrinsic_width,
    stacked_gluing_lengths,
    stacked_shapes,
    stacked_strata_for_shape,
    validate_coloring,
    width_expr_from_text,
)
from .trees import (
    classify_tuple,
    enumerate_stable_trees,
    reduce_tuple,
    shape_to_sexpr,
    tree_from_text,
)


def _fmt_float(x) -> str:
    return "%.12g" % float(x)


class Out:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def kv(self, key, value):
        sep = "=" if self.fmt == "machine" else ": "
        print("%s%s%s" % (key, sep, value))

    def item(self, key, text):
        """A list entry: bare line in text mode, indexed key otherwise."""
        if self.fmt == "machine":
            print("%s=%s" % (key, text))
        else:
            print(text)

    def seq(self, key, values):
        body = ",".join(str(v) for v in values)
        if self.fmt == "machine":
            print("%s=%s" % (key, body))
        else:
            print("%s: [%s]" % (key, body))


def _seed() -> int:
    return int(os.environ.get("WORKBENCH_SEED", "0"))


def _read_source(path: str) -> str:
    """Read a file; 'bundled:NAME' loads NAME.cat from the package data."""
    if path.startswith("bundled:"):
        name = path[len("bundled:"):]
        ref = resources.files("fukaya_workbench").joinpath("data", name + ".cat")
        if not ref.is_file():
            raise ValueError("no bundled fixture named %r" % name)
        return ref.read_text()
    with open(path) as fh:
        return fh.read()


def _parse_labels(text: str):
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    labels = tuple(x.strip() for x in s.split(",") if x.strip())
    if len(labels) < 2:
        raise ValueError("need at least two labels, got %r" % text)
    return labels


def _labels_from_args(args):
    if getattr(args, "labels", None):
        return _parse_labels(args.labels)
    if getattr(args, "d", None):
        return tuple("L%d" % i for i in range(args.d + 1))
    raise ValueError("give either --labels or --d")


def _chunks(seq, n):
    step = max(1, (len(seq) + n - 1) // n)
    return [seq[i:i + step] for i in range(0, len(seq), step)]


def _pool_map(worker, jobs):
    with ProcessPoolExecutor(max_workers=min(4, os.cpu_count() or 1)) as pool:
        return list(pool.map(worker, jobs))


# workers must be importable module-level functions


def _sexpr_chunk(shapes):
    return [shape_to_sexpr(s) for s in shapes]


def _cluster_chunk(job):
    labels, shapes = job
    out = []
    for shape in shapes:
        for s in cluster_strata_for_shape(labels, shape):
            out.append((s.dim, s.report_line()))
    return out


def _stacked_chunk(job):
    labels, shapes = job
    out = []
    for shape in shapes:
        for s in stacked_strata_for_shape(labels, shape):
            out.append((s.dim, s.report_line()))
    return out


# -- verbs -------------------------------------------------------------


def cmd_reduce(args):
    out = Out(args.format)
    labels = _parse_labels(args.tuple)
    rt = reduce_tuple(labels)
    out.kv("input", "(%s)" % ",".join(labels))
    out.kv("reduced", rt.to_text())
    out.kv("d_R", rt.d_R)
    if args.format == "machine":
        out.kv("m0_begin", rt.m0_begin)
        out.kv("m0_end", rt.m0_end)
    else:
        out.kv("m0", "%d+%d" % (rt.m0_begin, rt.m0_end))
    out.kv("fundamental", "(%s)" % ",".join(rt.fundamental))
    out.kv("constant", "yes" if rt.is_constant else "no")
    return 0


def cmd_classify(args):
    out = Out(args.format)
    labels = _parse_labels(args.tuple)
    out.kv("input", "(%s)" % ",".join(labels))
    out.kv("class", classify_tuple(labels))
    return 0


def _is_binary(shape) -> bool:
    if shape is None:
        return True
    return len(shape) == 2 and all(_is_binary(c) for c in shape)


def cmd_trees(args):
    out = Out(args.format)
    shapes = enumerate_stable_trees(args.d)
    if args.binary:
        shapes = [s for s in shapes if _is_binary(s)]
    if args.parallel:
        texts = [t for chunk in _pool_map(_sexpr_chunk, _chunks(shapes, 8)) for t in chunk]
    else:
        texts = [shape_to_sexpr(s) for s in shapes]
    for i, t in enumerate(texts):
        out.item("tree.%d" % i, t)
    out.kv("count", len(texts))
    return 0


def _report_strata(args, shapes, worker, per_shape):
    out = Out(args.format)
    labels = _labels_from_args(args)
    if args.parallel:
        chunks = _chunks(shapes, 8)
        results = _pool_map(worker, [(labels, c) for c in chunks])
        pairs = [p for chunk in results for p in chunk]
    else:
        pairs = []
        for shape in shapes:
            for s in per_shape(labels, shape):
                pairs.append((s.dim, s.report_line()))
    for i, (_, line) in enumerate(pairs):
        out.item("stratum.%d" % i, line)
    top = max((dim for dim, _ in pairs), default=-1)
    counts = [0] * (top + 1)
    euler = 0
    for dim, _ in pairs:
        counts[dim] += 1
        euler += (-1) ** dim
    out.seq("f-vector", counts)
    out.kv("euler", euler)
    out.kv("count", len(pairs))
    return 0


def cmd_strata(args):
    labels = _labels_from_args(args)
    d = len(labels) - 1
    if d < 2:
        raise ValueError("cluster strata need d >= 2")
    return _report_strata(args, enumerate_stable_trees(d), _cluster_chunk,
                          cluster_strata_for_shape)


def cmd_stacked(args):
    labels = _labels_from_args(args)
    return _report_strata(args, stacked_shapes(len(labels) - 1), _stacked_chunk,
                          stacked_strata_for_shape)


def cmd_coloring(args):
    out = Out(args.format)
    tree, colored = tree_from_text(_read_source(args.file))
    ct = ColoredTree(tree, colored)
    report = validate_coloring(ct)
    out.kv("valid", "yes" if report.valid else "no")
    if not report.valid:
        out.kv("violation", report.violation)
        return 1
    for i, c in enumerate(report.constraints):
        out.item("constraint.%d" % i, "constraint: %s" % c if args.format == "text" else c)
    for k, p in enumerate(tree.interior_edges, start=1):
        v = report.witness.lengths[p]
        out.item("witness.e%d" % k, "len e%d = %s" % (k, v) if args.format == "text" else str(v))
    out.kv("cone_dim", coloring_cone_dim(ct))
    out.kv("corner", "generalized" if generalized_corner_flag(ct) else "simplicial")
    return 0


def _expr_leaves(e) -> int:
    if isinstance(e, Surface):
        return e.d
    return _expr_leaves(e.outer) + _expr_leaves(e.inner) - 1


def _expr_neck_total(e) -> Fraction:
    if isinstance(e, Surface):
        return Fraction(0)
    return _expr_neck_total(e.outer) + _expr_neck_total(e.inner) + Fraction(e.length)


def _random_width_expr(rng, depth):
    if depth <= 0 or rng.random() < 0.35:
        return Surface(rng.randint(2, 4))
    outer = _random_width_expr(rng, depth - 1)
    inner = _random_width_expr(rng, depth - 1)
    n = rng.randint(1, _expr_leaves(outer))
    length = Fraction(rng.randint(0, 60), rng.randint(1, 12))
    return Glue(outer, n, inner, length)


def cmd_width(args):
    out = Out(args.format)
    if args.stack is not None:
        child = [Fraction(x) for x in args.child_widths.split(",")] if args.child_widths else []
        root = [Fraction(x) for x in args.root_widths.split(",")] if args.root_widths else []
        lengths = stacked_gluing_lengths(Fraction(args.stack), child, root)
        out.kv("scale", _fmt_float(math.exp(-1.0 / float(Fraction(args.stack)))))
        out.seq("lengths", [_fmt_float(v) for v in lengths])
        return 0
    if args.random is not None:
        rng = random.Random(_seed())
        bad = 0
        for _ in range(args.random):
            expr = _random_width_expr(rng, 4)
            prof = intrinsic_width(expr)
            ok = (
                prof.d == _expr_leaves(expr)
                and all(w >= 0 for w in prof.widths)
                and (not prof.widths or max(prof.widths) <= _expr_neck_total(expr))
            )
            if not ok:
                bad += 1
        out.kv("random", "%d ok" % args.random if not bad else "%d failed" % bad)
        out.kv("seed", _seed())
        return 1 if bad else 0
    if not args.expr:
        raise ValueError("give a width expression, --random N, or --stack RHO")
    prof = intrinsic_width(width_expr_from_text(args.expr))
    out.kv("widths", prof.to_text())
    out.kv("d", prof.d)
    return 0


def cmd_check_ainf(args):
    out = Out(args.format)
    cat = load_category(_read_source(args.file))
    hit = find_ainf_violation(cat, args.max_d)
    if hit is None:
        out.kv("ainf", "pass")
        out.kv("max_d", args.max_d)
        return 0
    inputs, defect = hit
    out.kv("ainf", "fail")
    out.kv("witness", "(%s)" % ",".join(inputs))
    out.kv("defect", element_to_text(defect))
    return 1


def cmd_check_linf(args):
    out = Out(args.format)
    alg = load_linf(_read_source(args.file))
    for n in range(1, args.max_n + 1):
        for tup in itertools.combinations_with_replacement(alg.basis, n):
            defect = linf_defect(alg, tup)
            if defect:
                out.kv("linf", "fail")
                out.kv("witness", "(%s)" % ",".join(tup))
                out.kv("defect", element_to_text(defect))
                return 1
    out.kv("linf", "pass")
    out.kv("max_n", args.max_n)
    return 0


def cmd_check_ocha(args):
    out = Out(args.format)
    s = load_ocha(_read_source(args.file))
    for k in range(0, args.max_closed + 1):
        for closed in itertools.combinations_with_replacement(s.closed_basis, k):
            for d in range(0, args.max_open + 1):
                if k == 0 and d == 0:
                    continue
                for opens in itertools.product(s.open_basis, repeat=d):
                    defect = ocha_defect(s, closed, opens)
                    if defect:
                        out.kv("ocha", "fail")
                        out.kv("witness_closed", "(%s)" % ",".join(closed))
                        out.kv("witness_open", "(%s)" % ",".join(opens))
                        out.kv("defect", element_to_text(defect))
                        return 1
    out.kv("ocha", "pass")
    out.kv("max_closed", args.max_closed)
    out.kv("max_open", args.max_open)
    if args.specializations:
        rep = ocha_specialization_report(s, args.max_open, args.max_closed)
        out.kv("open_sector_matches_ainf", "yes" if rep.open_sector_matches else "no")
        out.kv("closed_sector_linf_consistent",
               "yes" if rep.closed_sector_consistent else "no")
        if not (rep.open_sector_matches and rep.closed_sector_consistent):
            return 1
    return 0


def _parse_units(values):
    units = {}
    for v in values or ():
        if ":" not in v:
            raise ValueError("unit must be OBJECT:GEN, got %r" % v)
        obj, _, gen = v.partition(":")
        units[obj] = gen
    return units


def cmd_measure(args):
    out = Out(args.format)
    cat = load_category(_read_source(args.file))
    rep = measure_discrepancies(cat, _parse_units(args.unit))
    for d in sorted(rep.raw):
        out.kv("raw.%d" % d, rep.raw[d])
    for d in sorted(rep.eps):
        out.kv("eps.%d" % d, rep.eps[d])
    for obj in sorted(rep.unit_levels):
        out.kv("unit.%s" % obj, rep.unit_levels[obj])
    out.kv("filtered", "yes" if rep.is_filtered else "no")
    return 0


def cmd_unit(args):
    out = Out(args.format)
    cat = load_category(_read_source(args.file))
    rep = check_strict_unit(cat, args.object, args.unit)
    if rep.ok:
        out.kv("unit", "pass")
        return 0
    out.kv("unit", "fail")
    v = rep.first
    out.kv("violation", "d=%d slot=%d inputs=(%s)" % (v.d, v.slot, ",".join(v.inputs)))
    out.kv("found", element_to_text(v.found))
    out.kv("expected", element_to_text(v.expected))
    out.kv("violations", len(rep.violations))
    return 1


def cmd_functor(args):
    out = Out(args.format)
    source = load_category(_read_source(args.source))
    target = load_category(_read_source(args.target))
    F = load_functor(_read_source(args.map), source, target)
    rep = functor_shift(F)
    for d in sorted(rep.raw):
        out.kv("raw.%d" % d, rep.raw[d])
    out.kv("rho_star", rep.rho_star)
    if args.no_check:
        return 0
    for d in range(1, args.max_d + 1):
        for inputs in source.composable_tuples(d):
            defect = functor_defect(F, inputs)
            if defect:
                out.kv("equation", "fail")
                out.kv("witness", "(%s)" % ",".join(inputs))
                out.kv("defect", element_to_text(defect))
                return 1
    out.kv("equation", "pass")
    out.kv("max_d", args.max_d)
    return 0


def cmd_budget(args):
    out = Out(args.format)
    which = args.which
    if which == "vertex":
        val = vertex_curvature_budget(args.d, args.eps, args.case, args.convention)
        out.kv("budget", val)
        return 0
    if which == "epsdelta":
        rep = eps_delta_budget(args.eps, args.delta)
        out.kv("worst_case", rep.worst_case)
        out.kv("interior_cap", rep.interior_cap)
        if args.random:
            rng = random.Random(_seed())
            bad = 0
            for _ in range(args.random):
                eps = Fraction(rng.randint(1, 2000), rng.randint(1, 2000))
                delta = Fraction(1000 + rng.randint(1, 999), 2000)
                if eps_delta_budget(eps, delta).worst_case != 0:
                    bad += 1
            out.kv("random", "%d ok" % args.random if not bad else "%d failed" % bad)
            out.kv("seed", _seed())
            if bad:
                return 1
        return 0
    if which == "window":
        delta = Fraction(args.delta) if args.delta is not None else None
        rep = validate_floer_window(Fraction(args.lo), Fraction(args.hi),
                                    Fraction(args.eps), delta)
        out.kv("window", "(%s, %s)" % (rep.lower, rep.upper))
        out.kv("ok", "yes" if rep.ok else "no")
        if not rep.ok:
            out.kv("reason", rep.reason)
            return 1
        return 0
    if which == "strip":
        cutoffs = [float(x) for x in args.cutoffs.split(",")]
        rep = strip_end_bound(Fraction(args.lo), Fraction(args.hi), args.end, cutoffs)
        out.kv("bound", _fmt_float(rep.bound))
        out.kv("closed_form", _fmt_float(rep.closed_form))
        out.kv("quadrature_error", _fmt_float(rep.quadrature_error))
        return 0
    if which == "energy":
        inputs = [ActionValue.from_text(x) for x in args.inputs.split(",")]
        output = ActionValue.from_text(args.output)
        rep = energy_action_check(inputs, output, Fraction(args.curvature))
        out.kv("bound", rep.bound.to_text())
        out.kv("output", rep.output.to_text())
        out.kv("ok", "yes" if rep.ok else "no")
        return 0 if rep.ok else 1
    if which == "continuation":
        rep = continuation_shift(args.eps1, args.delta1, args.eps2, args.delta2, args.d)
        out.kv("per_d", rep.per_d)
        out.kv("overall", rep.overall)
        out.kv("theorem_bound", rep.theorem_bound)
        out.kv("filtered", "yes" if rep.filtered else "no")
        return 0
    if which == "thin":
        out.kv("thin_parts", thin_part_count(args.d, args.case))
        return 0
    raise ValueError("unknown budget subcommand %r" % which)


def cmd_dim(args):
    out = Out(args.format)
    morse = None
    if args.morse is not None:
        morse = tuple(int(x) for x in args.morse.split(",") if x.strip() != "")
    inp = IndexInput(
        case=args.case,
        d=args.d,
        n=args.n,
        d_R=args.d_R,
        maslov=args.mu,
        morse_indices=morse,
        out_index=args.out_index,
        l=args.l,
        k=args.k,
    )
    out.kv("dim", virtual_dimension(inp))
    return 0


# -- parser ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "machine"), default="text",
                     help="output style (default text)")
    par = argparse.ArgumentParser(add_help=False)
    par.add_argument("--parallel", action="store_true",
                     help="shard the enumeration over a process pool")

    p = argparse.ArgumentParser(
        prog="workbench",
        description="verification workbench for filtered A-infinity structures",
    )
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("reduce", parents=[fmt], help="reduce a label tuple")
    s.add_argument("tuple", help="label tuple like '(L0,L0,L2,L3,L2,L1,L0)'")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("classify", parents=[fmt], help="classify a label tuple")
    s.add_argument("tuple")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("trees", parents=[fmt, par], help="enumerate stable shapes")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--binary", action="store_true", help="only binary shapes")
    s.set_defaults(func=cmd_trees)

    s = sub.add_parser("strata", parents=[fmt, par], help="cluster strata report")
    s.add_argument("--labels")
    s.add_argument("--d", type=int, help="shorthand for distinct labels L0..Ld")
    s.set_defaults(func=cmd_strata)

    s = sub.add_parser("stacked", parents=[fmt, par], help="stacked strata report")
    s.add_argument("--labels")
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_stacked)

    s = sub.add_parser("coloring", parents=[fmt], help="validate a colored tree file")
    s.add_argument("file")
    s.set_defaults(func=cmd_coloring)

    s = sub.add_parser("width", parents=[fmt], help="intrinsic widths and gluing lengths")
    s.add_argument("expr", nargs="?", help="expression like '(glue (surface 2) 1 (surface 2) 3/10)'")
    s.add_argument("--random", type=int, metavar="N", help="self-check N random expressions")
    s.add_argument("--stack", metavar="RHO", help="stacking parameter in (-1,0)")
    s.add_argument("--child-widths", default="", help="comma list of widths at the colored vertices")
    s.add_argument("--root-widths", default="", help="comma list of root surface widths")
    s.set_defaults(func=cmd_width)

    s = sub.add_parser("check-ainf", parents=[fmt], help="scan a category for relation violations")
    s.add_argument("file", help="category file, or bundled:exterior")
    s.add_argument("--max-d", type=int, default=4)
    s.set_defaults(func=cmd_check_ainf)

    s = sub.add_parser("check-linf", parents=[fmt], help="scan bracket tables")
    s.add_argument("file")
    s.add_argument("--max-n", type=int, default=3)
    s.set_defaults(func=cmd_check_linf)

    s = sub.add_parser("check-ocha", parents=[fmt], help="scan open-closed tables")
    s.add_argument("file")
    s.add_argument("--max-closed", type=int, default=2)
    s.add_argument("--max-open", type=int, default=3)
    s.add_argument("--specializations", action="store_true",
                   help="also cross-check the degenerate sectors")
    s.set_defaults(func=cmd_check_ocha)

    s = sub.add_parser("measure", parents=[fmt], help="action discrepancy report")
    s.add_argument("file")
    s.add_argument("--unit", action="append", metavar="OBJECT:GEN")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("unit", parents=[fmt], help="strict unit check")
    s.add_argument("file")
    s.add_argument("--object", required=True)
    s.add_argument("--unit", required=True)
    s.set_defaults(func=cmd_unit)

    s = sub.add_parser("functor", parents=[fmt], help="functor shift and equation check")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--map", required=True)
    s.add_argument("--max-d", type=int, default=3)
    s.add_argument("--no-check", action="store_true", help="skip the equation scan")
    s.set_defaults(func=cmd_functor)

    s = sub.add_parser("budget", help="curvature and energy budgets")
    which = s.add_subparsers(dest="which", required=True)

    w = which.add_parser("vertex", parents=[fmt])
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--eps", required=True)
    w.add_argument("--case", choices=("open", "closed"), default="open")
    w.add_argument("--convention", choices=("main", "draft"), default="main")
    w.set_defaults(func=cmd_budget)

    w = which.add_parser("epsdelta", parents=[fmt])
    w.add_argument("--eps", required=True)
    w.add_argument("--delta", required=True)
    w.add_argument("--random", type=int, metavar="N")
    w.set_defaults(func=cmd_budget)

    w = which.add_parser("window", parents=[fmt])
    w.add_argument("--lo", required=True)
    w.add_argument("--hi", required=True)
    w.add_argument("--eps", required=True)
    w.add_argument("--delta")
    w.set_defaults(func=cmd_budget)

    w = which.add_parser("strip", parents=[fmt])
    w.add_argument("--lo", required=True)
    w.add_argument("--hi", required=True)
    w.add_argument("--end", choices=("entry", "exit"), required=True)
    w.add_argument("--cutoffs", required=True, help="comma list of monotone samples")
    w.set_defaults(func=cmd_budget)

    w = which.add_parser("energy", parents=[fmt])
    w.add_argument("--inputs", required=True, help="comma list of actions, -inf allowed")
    w.add_argument("--output", required=True)
    w.add_argument("--curvature", default="0")
    w.set_defaults(func=cmd_budget)

    w = which.add_parser("continuation", parents=[fmt])
    w.add_argument("--eps1", required=True)
    w.add_argument("--delta1", required=True)
    w.add_argument("--eps2", required=True)
    w.add_argument("--delta2", required=True)
    w.add_argument("--d", type=int, required=True)
    w.set_defaults(func=cmd_budget)

    w = which.add_parser("thin", parents=[fmt])
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--case", choices=("open", "closed"), default="open")
    w.set_defaults(func=cmd_budget)

    s = sub.add_parser("dim", parents=[fmt], help="virtual dimension formulas")
    s.add_argument("--case", required=True)
    s.add_argument("--d", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--d-R", dest="d_R", type=int)
    s.add_argument("--mu", type=int, help="Maslov index")
    s.add_argument("--morse", help="comma list of input indices; '' for none")
    s.add_argument("--out-index", dest="out_index", type=int)
    s.add_argument("--l", type=int)
    s.add_argument("--k", type=int)
    s.set_defaults(func=cmd_dim)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
