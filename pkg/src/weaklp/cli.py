"""Command line front end.

Exit status: 0 on success, 1 when a verification report fails, 2 on usage
or input errors.
"""
import argparse
import csv
import io as _stdio
import os
import sys

from . import io
from .core import AtomicVector, DyadicStep, make_params, lq1_norm, quasi_norm, weak_norm
from .embeddings import (
    LevelStack,
    build_layout,
    p_project,
    r_embed,
    t_embed,
    w_project,
)
from .harness import SUITES, TrialConfig, chain_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(parser):
    parser.add_argument("--p", type=float, default=2.0, help="exponent p > 1 (default 2)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def _with_input(parser):
    parser.add_argument("input", nargs="?", default="-", help="JSON file, inline JSON, or - for stdin")


def build_parser():
    parser = _Parser(prog="weaklp", description="Weak-L^p norms, embeddings and verification suites.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="weak norm, quasi-norm and L^{q,1} norm of atoms or a step")
    _with_input(p)
    _common(p)

    p = sub.add_parser("embed-tk", help="dyadic embedding of a step function into a level stack")
    _with_input(p)
    _common(p)
    p.add_argument("--N", type=int, default=None, help="refine the step to this level first")

    p = sub.add_parser("project-pk", help="project a level stack onto the consistent stacks")
    _with_input(p)
    _common(p)

    p = sub.add_parser("embed-r", help="block embedding of a k=1 level stack into a sequence")
    _with_input(p)
    _common(p)

    p = sub.add_parser("project-w", help="block averaging of a sequence")
    _with_input(p)
    _common(p)
    p.add_argument("--N", type=int, default=None, help="layout level when the input carries none")

    p = sub.add_parser("verify", help="run one verification suite")
    _common(p)
    p.add_argument("--suite", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=None, help="largest interval length k")
    p.add_argument("--N", type=int, default=None, help="largest dyadic level")

    p = sub.add_parser("chain", help="measured constants along the embedding chain")
    _common(p)
    p.add_argument("--sizes", default="2,4,6,8", help="comma separated truncation levels")
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=4, help="largest interval length k")
    return parser


def _read_input(arg):
    if arg == "-":
        text = sys.stdin.read()
    elif arg.lstrip().startswith("{"):
        text = arg
    elif os.path.exists(arg):
        with open(arg) as fh:
            text = fh.read()
    else:
        raise io.InputError(f"input {arg!r} is neither a file nor inline JSON")
    doc = io.loads(text)
    return doc, io.decode(doc)


def _expect(obj, kinds, verb):
    if not isinstance(obj, kinds):
        names = " or ".join(k.__name__ for k in kinds)
        raise io.InputError(f"{verb} expects {names}, got {type(obj).__name__}")
    return obj


def _csv(rows, header):
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["%.17g" % v if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _object_csv(obj):
    if isinstance(obj, AtomicVector):
        return _csv(((i + 1, v) for i, v in enumerate(obj.atoms.tolist())), ["index", "value"])
    if isinstance(obj, DyadicStep):
        return _csv(((j + 1, v) for j, v in enumerate(obj.values.tolist())), ["j", "value"])
    rows = [(n, j + 1, v) for n, lev in enumerate(obj.levels) for j, v in enumerate(lev.tolist())]
    return _csv(rows, ["n", "j", "value"])


def _report_csv(report):
    rows = []
    for r in report["records"]:
        worst = min(r["checks"], key=lambda c: c["margin"])
        rows.append(
            (r["trial"], r["seed"], r["p"], r["ratio"], r["margin"], r["pass"], worst["name"], worst["lhs"], worst["rhs"])
        )
    return _csv(rows, ["trial", "seed", "p", "ratio", "margin", "pass", "worst_check", "lhs", "rhs"])


def _chain_csv(report):
    rows = []
    for name, link in report["links"].items():
        for N, value in link["by_size"].items():
            rows.append((name, int(N), value, link["bound"], link["within_bound"], link["uniform"]))
    return _csv(rows, ["link", "N", "constant", "bound", "within_bound", "uniform"])


def _emit(text, out):
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _run(args):
    params = make_params(args.p)
    status = EXIT_OK
    if args.verb == "norm":
        _, obj = _read_input(args.input)
        obj = _expect(obj, (AtomicVector, DyadicStep), "norm")
        doc = {"weak": weak_norm(obj, params), "quasi": quasi_norm(obj, params), "lq1": lq1_norm(obj, params)}
        text = _csv([tuple(doc.values())], list(doc)) if args.format == "csv" else io.dumps(doc)
    elif args.verb in ("embed-tk", "project-pk", "embed-r", "project-w"):
        raw, obj = _read_input(args.input)
        extra = {}
        if args.verb == "embed-tk":
            f = _expect(obj, (DyadicStep,), args.verb)
            if args.N is not None and args.N < f.level:
                raise io.InputError(f"--N {args.N} is below the step level {f.level}")
            result = t_embed(f, params, N=args.N)
        elif args.verb == "project-pk":
            result = p_project(_expect(obj, (LevelStack,), args.verb), params)
        elif args.verb == "embed-r":
            x = _expect(obj, (LevelStack,), args.verb)
            if x.k != 1:
                raise io.InputError(f"field 'k': embed-r needs k = 1, got {x.k}")
            layout = build_layout(x.N)
            result = r_embed(x, layout, params)
            extra = {"layout": io.encode(layout)}
        else:
            a = _expect(obj, (AtomicVector,), args.verb)
            if "layout" in raw:
                layout = io.decode_layout(raw["layout"])
            elif args.N is not None:
                layout = build_layout(args.N)
            else:
                raise io.InputError("project-w needs a 'layout' field or the --N flag")
            if len(a) != layout.total_length:
                raise io.InputError(
                    f"field 'atoms': length {len(a)} does not match layout length {layout.total_length}"
                )
            result = w_project(a, layout)
            extra = {"layout": io.encode(layout)}
        if args.format == "csv":
            text = _object_csv(result)
        else:
            text = io.dumps({**io.encode(result), **extra})
    elif args.verb == "verify":
        if args.suite not in SUITES:
            raise UsageError(f"unknown suite {args.suite!r}; valid suites: {', '.join(SUITES)}")
        config = TrialConfig(
            suite=args.suite, p_values=(params.p,), trials=args.trials, seed=args.seed, max_level=args.N, max_k=args.k
        )
        report = run_suite(config).to_dict()
        text = _report_csv(report) if args.format == "csv" else io.dumps(report, indent=1)
        status = EXIT_OK if report["pass"] else EXIT_FAIL
    else:
        try:
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"--sizes must be comma separated integers, got {args.sizes!r}") from None
        k_values = tuple(k for k in (1, 2, 4) if k <= args.k) or (1,)
        report = chain_report(params.p, sizes, seed=args.seed, trials=args.trials, k_values=k_values)
        text = _chain_csv(report) if args.format == "csv" else io.dumps(report, indent=1)
        status = EXIT_OK if report["pass"] else EXIT_FAIL
    _emit(text, args.out)
    return status


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError, OSError) as exc:
        print(f"weaklp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
