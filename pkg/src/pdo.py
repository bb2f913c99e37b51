#!/usr/bin/env python3
"""
Command line front end.

    pdo.py --dim 2 mult "D1^2+D2^2" "x1*D2+x2*D1"
    pdo.py --dim 2 --script data/positive_triple.pdo
    pdo.py verify-paper
"""
import argparse
import logging
import shlex
import sys
from typing import Dict, List, Optional, Sequence

from rich.markup import escape
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from config import get_settings
from darboux import build_example_K, isom_check, kernel_membership, rlambda_decompose, rlambda_membership
from errors import EXIT_INTERNAL, EXIT_NEGATIVE, EXIT_OK, ParseError, PDOError, UsageError
from expression_parser import Value, bind_all, format_value, parse_expression, parse_script
from log_setup import configure_logging, err_console
from operators import (
    DiffOp,
    ExpFunction,
    apply,
    commutator,
    compose,
    conjugate_through,
    symbol,
)
from poly_core import LAMBDA, MultiPoly, RatFun, format_poly
from report_generator import ReportGenerator
from resultant import (
    ModeKind,
    OutcomeKind,
    ResultantMode,
    build_resultant_matrix,
    differential_resultant,
    dform_decomposition,
    homogenized_symbol_zero_check,
    homogenized_symbols,
    sampled_selections,
    verify_annihilation,
    x_content_search,
)
from schemas import Provenance, value_to_json
from worked_examples import WorkedExamples

logger = logging.getLogger("pdo")

# Verbs that work without --dim
DIMENSIONLESS = {"verify-paper", "x-search"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdo", description="Exact partial differential operator toolkit")
    parser.add_argument("--dim", type=int, help="Number of variables n")
    parser.add_argument("--format", choices=["text", "json"], default="text", help="Output format")
    parser.add_argument("--out", type=str, help="Write the report to this file instead of stdout")
    parser.add_argument("--let", action="append", default=[], metavar="NAME=EXPR",
                        help="Bind a name before evaluating arguments (repeatable)")
    parser.add_argument("--script", type=str, help="Script file of bindings followed by one command")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    verbs = parser.add_subparsers(dest="verb", metavar="VERB")

    p = verbs.add_parser("mult", help="Compose operators left to right")
    p.add_argument("operators", nargs="+")

    p = verbs.add_parser("apply", help="Apply an operator to f*exp(x.z)")
    p.add_argument("operator")
    p.add_argument("--fn", default="1", help="Coefficient f (may involve x, z and parameters)")

    p = verbs.add_parser("commutator", help="A o B - B o A")
    p.add_argument("a")
    p.add_argument("b")

    p = verbs.add_parser("conjugate", help="Q with Q o K = K o P")
    p.add_argument("p")
    p.add_argument("k")
    p.add_argument("--order", type=int, help="Ansatz order (default: order of P)")

    p = verbs.add_parser("resultant", help="mu-shifted differential resultant of n+1 operators")
    p.add_argument("operators", nargs="+")
    p.add_argument("--mode", default="exhaustive", help="exhaustive or sampled:k")
    p.add_argument("--seed", type=int, help="Seed for sampled mode and rank test")
    p.add_argument("--rank-only", action="store_true", help="Only decide whether the resultant is zero")
    p.add_argument("--workers", type=int, help="Worker processes for minor determinants")

    p = verbs.add_parser("kernel-check", help="Is a constant-coefficient Q in R0(K)?")
    p.add_argument("q")
    p.add_argument("--k", help="The operator K (default: the example x1 x2 (D1 D2 - lambda) o 1/(x1 x2))")

    for name, help_text in (("rlambda-check", "Is q(z1, z2) in R_lambda?"),
                            ("rlambda-decompose", "Write q as g*(z1 z2 - lambda)^3 + c")):
        p = verbs.add_parser(name, help=help_text)
        p.add_argument("q")
        p.add_argument("--lambda", dest="lam", help="Value of lambda (default: symbolic)")

    p = verbs.add_parser("dform", help="Cofactor operators D_i for one maximal minor")
    p.add_argument("operators", nargs="+")
    p.add_argument("--rows", help="Comma separated 1-based rows of the minor (default: a random nonzero one)")
    p.add_argument("--seed", type=int)

    p = verbs.add_parser("annihilate", help="Does p(L1, ..., Lm) vanish?")
    p.add_argument("p")
    p.add_argument("operators", nargs="+")

    p = verbs.add_parser("symbol-zeros", help="Common zeros at infinity of the homogenized symbols")
    p.add_argument("operators", nargs="+")
    p.add_argument("--height", type=int, help="Coordinate bound of the search grid")

    p = verbs.add_parser("x-search", help="Look for x-dependent resultants of commuting triples")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int, default=2, help="Minors sampled per triple")

    p = verbs.add_parser("verify-paper", help="Run the reproduction suite")
    p.add_argument("--full", action="store_true", help="Exhaustive resultant and the full property sweeps")
    p.add_argument("--seed", type=int)
    return parser


class Session:
    """Dimension and bound names shared by every argument of one command"""

    def __init__(self, dim: int, env: Optional[Dict[str, Value]] = None):
        self.dim = dim
        self.env = env or {}

    def evaluate(self, src: str) -> Value:
        try:
            return parse_expression(src, self.dim, self.env)
        except PDOError as e:
            e.subexpression = src
            raise

    def operator(self, src: str) -> DiffOp:
        value = self.evaluate(src)
        if not isinstance(value, DiffOp):
            raise ParseError(f"Expected an operator, got {format_value(value)}", src, 0)
        return value

    def operators(self, sources: Sequence[str]) -> List[DiffOp]:
        return [self.operator(src) for src in sources]

    def function(self, src: str) -> RatFun:
        value = self.evaluate(src)
        if isinstance(value, DiffOp):
            if not value.is_zero and value.order != 0:
                raise ParseError("Expected a function, got an operator", src, 0)
            return value.coefficient((0,) * self.dim)
        return value if isinstance(value, RatFun) else RatFun.from_poly(value)

    def polynomial(self, src: str) -> MultiPoly:
        """A polynomial; constant-coefficient operators stand for their symbol"""
        value = self.evaluate(src)
        if isinstance(value, DiffOp):
            return symbol(value)
        if isinstance(value, RatFun):
            if not value.is_polynomial:
                raise ParseError(f"Expected a polynomial, got {format_value(value)}", src, 0)
            return value.as_poly()
        return value

    def lam(self, src: Optional[str]) -> MultiPoly:
        if src is None:
            return MultiPoly.var(LAMBDA)
        return self.polynomial(src)


def make_session(args, bindings) -> Session:
    if args.dim is None:
        if args.verb in DIMENSIONLESS:
            return Session(0)
        raise UsageError("--dim is required for this command")
    if not 1 <= args.dim <= get_settings().max_dim:
        raise UsageError(f"--dim must be between 1 and {get_settings().max_dim}")
    for text in args.let:
        if "=" not in text:
            raise UsageError(f"--let expects NAME=EXPR, got {text!r}")
        name, src = (part.strip() for part in text.split("=", 1))
        bindings.append((name, src))
    env: Dict[str, Value] = {}
    for name, src in bindings:
        try:
            env = bind_all([(name, src)], args.dim, env)
        except PDOError as e:
            e.subexpression = f"{name} = {src}"
            raise
    return Session(args.dim, env)


# --- verbs ---

def run_mult(args, s: Session, rg: ReportGenerator):
    ops = s.operators(args.operators)
    product = ops[0]
    for op in ops[1:]:
        product = compose(product, op)
    return rg.for_value(format_value(product), product), EXIT_OK


def run_apply(args, s: Session, rg: ReportGenerator):
    op = s.operator(args.operator)
    result = apply(op, ExpFunction(s.dim, s.function(args.fn)))
    return rg.for_value(str(result), result), EXIT_OK


def run_commutator(args, s: Session, rg: ReportGenerator):
    result = commutator(s.operator(args.a), s.operator(args.b))
    return rg.for_value(format_value(result), result), EXIT_OK


def run_conjugate(args, s: Session, rg: ReportGenerator):
    p, k = s.operator(args.p), s.operator(args.k)
    order = args.order if args.order is not None else max(p.order, 0)
    result = conjugate_through(p, k, order)
    return rg.for_value(format_value(result), result), EXIT_OK


def _progress_callback(progress: Progress):
    task = progress.add_task("minors", total=None)

    def update(done: int, total: int, degree: int) -> None:
        progress.update(task, completed=done, total=total, description=f"minors (gcd degree {degree})")

    return update


def run_resultant(args, s: Session, rg: ReportGenerator):
    ops = s.operators(args.operators)
    seed = get_settings().seed if args.seed is None else args.seed
    mode = ResultantMode(ModeKind.RANK_ONLY, seed=seed) if args.rank_only else ResultantMode.parse(args.mode, seed)
    workers = get_settings().workers if args.workers is None else args.workers
    with Progress(TextColumn("{task.description}"), BarColumn(), MofNCompleteColumn(), TimeElapsedColumn(),
                  console=err_console, transient=True, disable=not err_console.is_terminal) as progress:
        outcome = differential_resultant(ops, mode, workers, on_progress=_progress_callback(progress))
    rows, cols = outcome.shape
    if outcome.kind == OutcomeKind.ZERO:
        lines = [f"0  (rank {outcome.rank} < {cols} columns)"]
    elif outcome.kind == OutcomeKind.NONZERO:
        lines = [f"nonzero  (rank {outcome.rank} = {cols} columns)"]
    else:
        lines = [format_poly(outcome.value)]
        if mode.kind == ModeKind.SAMPLED:
            lines.append(f"# gcd of {outcome.minors_examined} sampled minors: a multiple of the resultant")
        if not outcome.content.is_constant or not outcome.content_den.is_constant:
            removed = format_poly(outcome.content)
            if not outcome.content_den.is_constant:
                removed = f"({removed})/({format_poly(outcome.content_den)})"
            lines.append(f"# removed content {removed}" + (" (depends on x)" if outcome.x_dependent else ""))
    lines.append(f"# matrix {rows}x{cols}")
    if outcome.zero_columns:
        lines.append("# zero columns: " + ", ".join(str(list(c)) for c in outcome.zero_columns))
    provenance = Provenance(seed=seed, mode=outcome.mode, minors_examined=outcome.minors_examined, workers=workers)
    report = rg.for_value(
        "\n".join(lines),
        outcome.value if outcome.kind == OutcomeKind.POLY else None,
        provenance=provenance,
        outcome=outcome.kind.value,
        rank=outcome.rank,
        shape=[rows, cols],
        content=value_to_json(outcome.content),
        content_den=value_to_json(outcome.content_den),
        x_dependent=outcome.x_dependent,
        zero_columns=[list(c) for c in outcome.zero_columns],
    )
    return report, EXIT_OK


def _verdict(rg: ReportGenerator, holds: bool, yes: str, no: str):
    report = rg.build(yes if holds else no, {"holds": holds}, ok=holds)
    return report, EXIT_OK if holds else EXIT_NEGATIVE


def run_kernel_check(args, s: Session, rg: ReportGenerator):
    q = s.operator(args.q)
    k = s.operator(args.k) if args.k else build_example_K(s.dim)[0]
    holds = kernel_membership(k, q)
    report, code = _verdict(rg, holds, "in R0(K)", "not in R0(K)")
    if not args.k:
        report.result["agrees_with_rlambda"] = isom_check(q)
    return report, code


def run_rlambda_check(args, s: Session, rg: ReportGenerator):
    holds = rlambda_membership(s.polynomial(args.q), s.lam(args.lam))
    return _verdict(rg, holds, "in R_lambda", "not in R_lambda")


def run_rlambda_decompose(args, s: Session, rg: ReportGenerator):
    q, lam = s.polynomial(args.q), s.lam(args.lam)
    g, c = rlambda_decompose(q, lam)
    text = f"g = {format_poly(g)}\nc = {format_poly(c)}\nq = g*(z1*z2 - ({format_poly(lam)}))^3 + c"
    return rg.build(text, {"g": value_to_json(g), "c": value_to_json(c)}), EXIT_OK


def run_dform(args, s: Session, rg: ReportGenerator):
    ops = s.operators(args.operators)
    m = build_resultant_matrix(ops, s.dim)
    if args.rows:
        try:
            selection = tuple(int(r) - 1 for r in args.rows.split(","))
        except ValueError:
            raise UsageError(f"--rows expects comma separated integers, got {args.rows!r}") from None
    else:
        found = sampled_selections(m, 1, args.seed)
        if not found:
            raise UsageError("No nonzero maximal minor found; pass --rows")
        selection = found[0]
    ds, det = dform_decomposition(m, selection)
    lines = [f"rows {','.join(str(r + 1) for r in selection)}", f"det = {format_poly(det)}"]
    lines += [f"D{i} = {format_value(d)}" for i, d in enumerate(ds, start=1)]
    result = {
        "rows": [r + 1 for r in selection],
        "det": value_to_json(det),
        "operators": [value_to_json(d) for d in ds],
    }
    return rg.build("\n".join(lines), result), EXIT_OK


def run_annihilate(args, s: Session, rg: ReportGenerator):
    p = s.polynomial(args.p)
    holds = verify_annihilation(p, s.operators(args.operators))
    return _verdict(rg, holds, "p(L) = 0", "p(L) != 0")


def run_symbol_zeros(args, s: Session, rg: ReportGenerator):
    ops = s.operators(args.operators)
    forms = homogenized_symbols(ops)
    zeros = homogenized_symbol_zero_check(ops, args.height)
    lines = [f"top form {i}: {format_poly(f)}" for i, f in enumerate(forms, start=1)]
    lines.append("zeros at infinity: " + (", ".join(str(z) for z in zeros) if zeros else "none found"))
    result = {"forms": [value_to_json(f) for f in forms], "zeros": [list(z) for z in zeros]}
    return rg.build("\n".join(lines), result), EXIT_OK


def run_x_search(args, s: Session, rg: ReportGenerator):
    seed = get_settings().seed if args.seed is None else args.seed
    hits = x_content_search(args.trials, seed, args.k)
    lines = []
    records = []
    for hit in hits:
        outcome = hit.outcome
        flag = "x-DEPENDENT" if outcome.x_dependent else "x-free"
        lines.append(f"trial {hit.trial}: q = {format_poly(hit.q)}  {outcome.kind.value}  {flag}")
        records.append({
            "trial": hit.trial,
            "q": value_to_json(hit.q),
            "outcome": outcome.kind.value,
            "x_dependent": outcome.x_dependent,
            "content": value_to_json(outcome.content),
            "content_den": value_to_json(outcome.content_den),
        })
    found = sum(1 for hit in hits if hit.outcome.x_dependent)
    lines.append(f"{found} of {len(hits)} triples gave x-dependent content")
    provenance = Provenance(seed=seed, mode=f"sampled:{args.k}")
    return rg.build("\n".join(lines), {"trials": records}, provenance=provenance), EXIT_OK


def run_verify_paper(args, s: Session, rg: ReportGenerator):
    seed = get_settings().seed if args.seed is None else args.seed
    results = WorkedExamples(full=args.full, seed=seed).run()
    report = rg.suite_report(results, args.full)
    report.provenance = Provenance(seed=seed, mode="exhaustive" if args.full else "sampled:40")
    return report, EXIT_OK if report.ok else EXIT_NEGATIVE


COMMANDS = {
    "mult": run_mult,
    "apply": run_apply,
    "commutator": run_commutator,
    "conjugate": run_conjugate,
    "resultant": run_resultant,
    "kernel-check": run_kernel_check,
    "rlambda-check": run_rlambda_check,
    "rlambda-decompose": run_rlambda_decompose,
    "dform": run_dform,
    "annihilate": run_annihilate,
    "symbol-zeros": run_symbol_zeros,
    "x-search": run_x_search,
    "verify-paper": run_verify_paper,
}


def report_error(e: PDOError) -> None:
    err_console.print(f"[red]Error:[/red] {escape(str(e))}", highlight=False)
    if isinstance(e, ParseError) and e.source:
        err_console.print(e.pointer(), markup=False, highlight=False)
    subexpression = getattr(e, "subexpression", None)
    if subexpression and not isinstance(e, ParseError):
        err_console.print(f"  in: {subexpression}", markup=False, highlight=False)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        bindings = []
        if args.script:
            with open(args.script, encoding="utf-8") as fh:
                script = parse_script(fh.read(), args.dim or 0)
            bindings = script.bindings
            if args.verb is None:
                if not script.command:
                    raise UsageError(f"{args.script} has no command line")
                args = parser.parse_args(argv + script.command)
        if args.verb is None:
            parser.print_usage(sys.stderr)
            return 2
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except OSError as e:
        err_console.print(f"[red]Error:[/red] cannot read script: {escape(str(e))}", highlight=False)
        return 2
    except PDOError as e:
        report_error(e)
        return e.exit_code

    try:
        settings = get_settings()
        configure_logging(settings.log_level, args.verbose)
        session = make_session(args, bindings)
        command = " ".join(shlex.quote(a) for a in argv)
        rg = ReportGenerator(command, args.verb, args.format, args.out)
        report, code = COMMANDS[args.verb](args, session, rg)
        rg.emit(report)
        return code
    except PDOError as e:
        report_error(e)
        return e.exit_code
    except Exception:
        logger.exception("internal failure")
        err_console.print("[red]Error:[/red] internal failure", highlight=False)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
