"""Command-line driver: parse, classify, generate properties, verify, report."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..compmodel import build_equivalence_model, build_invariant_model
from ..frontend import FrontendError, check_support, parse_source
from ..propertygen import (DEFAULT_THRESHOLD, NoPropertyApplicable, classify_unit,
                           find_key_variables, generate_properties, parse_custom_invariant)
from ..translator import build_independent_model, dump_model
from ..translator.model import DEFAULT_UNROLL
from ..translator.theta import InternalError, UnsupportedExpr
from ..verifier import SearchConfig, verify
from .report import (EXIT_ERROR, EXIT_VALID, ContractResult, FileError, PropertyResult,
                     Report)

log = logging.getLogger("finverif")

PROPERTY_KINDS = ("invariant", "equivalence", "all")


@dataclass
class Options:
    property: str = "all"
    search: SearchConfig = field(default_factory=SearchConfig)
    unroll_bound: int = DEFAULT_UNROLL
    threshold: float = DEFAULT_THRESHOLD
    key_vars: Optional[tuple] = None
    invariant: Optional[str] = None
    contracts: Optional[tuple] = None   # restrict to these contract names


class AnalysisError(Exception):
    """A file that cannot be analyzed; carries rendered diagnostics."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


def load_unit(path: str, opts: Options):
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise AnalysisError([f"{path}: cannot read: {exc.strerror}"]) from None
    try:
        asts = parse_source(source)
    except FrontendError as exc:
        raise AnalysisError([exc.diagnostic.render(path)]) from None
    if not asts:
        raise AnalysisError([f"{path}: no contract found"])
    names = {c.name for c in asts}
    diags = [d.render(path) for c in asts for d in check_support(c, names)]
    if diags:
        raise AnalysisError(diags)
    try:
        model = build_independent_model(asts, unroll_bound=opts.unroll_bound)
    except FrontendError as exc:
        raise AnalysisError([exc.diagnostic.render(path)]) from None
    except (UnsupportedExpr, InternalError) as exc:
        loc = getattr(exc, "loc", None)
        where = f"{path}:{loc.line}:{loc.col}" if loc is not None else path
        raise AnalysisError([f"{where}: error: {exc}"]) from None
    return asts, model


def contract_properties(ast, asts, cats, opts: Options):
    """Key variables and the property list of one contract (possibly empty)."""
    kv = find_key_variables(ast, opts.threshold, opts.key_vars)
    custom = None
    if opts.invariant:
        try:
            custom = parse_custom_invariant(opts.invariant, ast)
        except ValueError:
            custom = None   # names a mapping of another contract
    props = generate_properties(ast, kv, cats, asts, custom)
    if opts.property != "all":
        props = [p for p in props if p.kind == opts.property]
    return kv, props


def build_model(indep, prop):
    if prop.kind == "invariant":
        return build_invariant_model(indep, prop)
    return build_equivalence_model(indep, prop)


def analyze_file(path: str, opts: Options) -> tuple:
    """(contract results, file error or None); never raises for analysis problems."""
    try:
        asts, indep = load_unit(path, opts)
    except AnalysisError as exc:
        return [], FileError(path, exc.diagnostics)
    cats_by_name = classify_unit(asts, opts.threshold, opts.key_vars)
    results = []
    for ast in asts:
        if opts.contracts and ast.name not in opts.contracts:
            continue
        cats = cats_by_name[ast.name]
        res = ContractResult(path, ast.name, sorted(c.value for c in cats))
        try:
            kv, props = contract_properties(ast, asts, cats, opts)
        except NoPropertyApplicable as exc:
            res.note = f"no property applicable: {exc}"
            results.append(res)
            continue
        res.key_variables = {"balances": list(kv.balances_vars),
                             "total_supply": kv.total_supply}
        for prop in props:
            log.info("verifying %s of %s", prop.name, ast.name)
            verdict = verify(build_model(indep, prop), opts.search)
            res.properties.append(PropertyResult.from_verdict(prop, verdict))
        results.append(res)
    return results, None


def _analyze_to_dicts(args):
    path, opts = args
    results, err = analyze_file(path, opts)
    return [asdict(r) for r in results], (asdict(err) if err else None)


def run(paths, opts: Options, jobs: int = 1) -> tuple:
    """Analyze every file; returns (exit code, Report)."""
    work = [(p, opts) for p in paths]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_analyze_to_dicts, work))
    else:
        outputs = [_analyze_to_dicts(w) for w in work]
    # report assembly stays sequential and in argument order
    d = {"contracts": [c for cs, _ in outputs for c in cs],
         "errors": [e for _, e in outputs if e is not None]}
    report = Report.from_dict(d)
    return report.exit_code(), report


def dump(paths, opts: Options, which: Optional[str], out) -> int:
    """--dump-rules / --dump-model: print rule sets instead of verifying."""
    code = EXIT_VALID
    for path in paths:
        try:
            asts, indep = load_unit(path, opts)
        except AnalysisError as exc:
            for d in exc.diagnostics:
                print(d, file=sys.stderr)
            code = EXIT_ERROR
            continue
        if which is None:
            out.write(f"// ==== {path}: independent model\n")
            out.write(dump_model(indep.rules))
            continue
        cats_by_name = classify_unit(asts, opts.threshold, opts.key_vars)
        for ast in asts:
            try:
                _, props = contract_properties(ast, asts, cats_by_name[ast.name], opts)
            except NoPropertyApplicable:
                continue
            for prop in props:
                if prop.kind == which:
                    out.write(f"// ==== {path}: {ast.name} {prop.name}\n")
                    out.write(dump_model(build_model(indep, prop).rules))
    return code


# ------------------------------------------------------------------ argument parsing

def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _solver(text):
    if text == "builtin" or (text.startswith("smtlib:") and len(text) > 7):
        return text
    raise argparse.ArgumentTypeError("expected 'builtin' or 'smtlib:<path>'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="finverif",
        description="Verify invariant and equivalence properties of Solidity contracts.")
    ap.add_argument("paths", nargs="*", help="Solidity source files")
    ap.add_argument("--property", choices=PROPERTY_KINDS, default="all")
    ap.add_argument("--tx-bound", type=_positive_int, default=2,
                    help="external transactions per execution (default 2)")
    ap.add_argument("--max-depth", type=_positive_int, default=SearchConfig.max_depth,
                    help="rule applications per trace")
    ap.add_argument("--call-depth", type=_positive_int, default=2,
                    help="nesting depth of internal and fallback calls")
    ap.add_argument("--unroll-bound", type=_positive_int, default=DEFAULT_UNROLL)
    ap.add_argument("--timeout", type=float, default=300.0, help="seconds per property")
    ap.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                    help="name similarity threshold for key variables (0-100)")
    ap.add_argument("--key-vars", help="comma-separated balance variable names")
    ap.add_argument("--invariant", help="custom invariant: 'sum(m[a], m[b]) == C|totalSupply'")
    ap.add_argument("--solver", type=_solver, default="builtin",
                    help="'builtin' or 'smtlib:<path to an SMT-LIB2 solver>'")
    ap.add_argument("--dump-rules", action="store_true",
                    help="print the independent model and exit")
    ap.add_argument("--dump-model", choices=("invariant", "equivalence"),
                    help="print the complementary model of that property kind and exit")
    ap.add_argument("--json", metavar="FILE", help="write the JSON report to FILE ('-': stdout)")
    ap.add_argument("--jobs", type=_positive_int, default=1, help="files analyzed in parallel")
    ap.add_argument("--corpus", metavar="MANIFEST", help="run the corpus harness on MANIFEST")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def options_from_args(args) -> Options:
    cfg = SearchConfig(max_depth=args.max_depth, tx_bound=args.tx_bound,
                       call_depth_cap=args.call_depth, timeout=args.timeout, solver=args.solver)
    key_vars = tuple(k.strip() for k in args.key_vars.split(",") if k.strip()) \
        if args.key_vars else None
    return Options(args.property, cfg, args.unroll_bound, args.threshold, key_vars,
                   args.invariant)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_VALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        opts = options_from_args(args)
    except ValueError as exc:
        print(f"finverif: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.corpus:
        from .corpus import corpus_main
        return corpus_main(args.corpus, opts, args.jobs, args.json)
    if not args.paths:
        ap.print_usage(sys.stderr)
        print("finverif: no input files", file=sys.stderr)
        return EXIT_ERROR
    if args.dump_rules or args.dump_model:
        return dump(args.paths, opts, args.dump_model, sys.stdout)
    code, report = run(args.paths, opts, args.jobs)
    if args.json == "-":
        sys.stdout.write(report.to_json() + "\n")
    else:
        sys.stdout.write(report.render_text())
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(report.to_json() + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
