"""Command-line driver: `sstt-check check|solve|compute`."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

from .corpus import expand_paths
from .diagnostics import Diagnostic, ParseError, SourceSpan, diagnostics_json
from .evaluator import DEFAULT_FUEL, Options, whnf
from .parser import parse_text
from .printer import show
from .sequents import parse_sequent
from .topes import entails
from .typechecker import Checker, check_module

EXIT_OK, EXIT_TYPE_ERROR, EXIT_INPUT_ERROR = 0, 1, 2


@dataclass
class FileReport:
    path: str
    declarations: int = 0
    diagnostics: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        codes = {d.code for d in self.diagnostics}
        if "E-PARSE" in codes:
            return EXIT_INPUT_ERROR
        return EXIT_TYPE_ERROR if codes else EXIT_OK


@dataclass
class RunReport:
    files: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return max((f.exit_code for f in self.files), default=EXIT_OK)

    @property
    def diagnostics(self) -> list:
        return [d for f in self.files for d in f.diagnostics]


def _unreadable(path, err) -> Diagnostic:
    return Diagnostic(path, SourceSpan(path, 1, 1, 1, 1), "E-PARSE", f"cannot read file: {err.strerror or err}")


def run_check(paths, options: Options | None = None, isolate: bool = False, checker: Checker | None = None) -> RunReport:
    """Check files in order; without `isolate` they share one signature."""
    options = options or Options()
    shared = checker or Checker(options=options)
    report = RunReport()
    for path in map(str, expand_paths(paths)):
        file_report = FileReport(path)
        report.files.append(file_report)
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except (OSError, UnicodeDecodeError) as err:
            file_report.diagnostics.append(_unreadable(path, err))
            continue
        module = parse_text(text, path)
        result = check_module(module, Checker(options=options) if isolate else shared, path)
        file_report.declarations = len(result.checked)
        file_report.diagnostics = result.diagnostics
        file_report.outputs = result.outputs
    return report


def _use_color(choice: str | None, stream) -> bool:
    choice = choice or os.environ.get("SSTT_COLOR", "auto")
    if choice == "always":
        return True
    if choice == "never":
        return False
    return stream.isatty()


def _options(args) -> Options:
    return Options(type_in_type=args.type_in_type, fuel=args.fuel)


def cmd_check(args) -> int:
    report = run_check(args.files, _options(args), isolate=args.isolate)
    if args.json:
        print(diagnostics_json(report.diagnostics))
        return report.exit_code
    color = _use_color(args.color, sys.stderr)
    frames = None if args.full_trace else 3
    for f in report.files:
        for span, text in f.outputs:
            print(f"{span}: {text}")
        for d in f.diagnostics:
            print(d.render(frames, color), file=sys.stderr)
        print(f"{f.path}: {f.declarations} declaration(s) checked, {len(f.diagnostics)} error(s)")
    return report.exit_code


def cmd_solve(args) -> int:
    if args.file in (None, "-"):
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(args.file, encoding="utf-8") as handle:
                lines = handle.read().splitlines()
        except OSError as err:
            print(f"{args.file}: cannot read file: {err.strerror}", file=sys.stderr)
            return EXIT_INPUT_ERROR
    status = EXIT_OK
    for number, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("--"):
            continue
        try:
            seq = parse_sequent(text)
        except ParseError as err:
            print(f"error: line {number}: {err.message}")
            status = EXIT_INPUT_ERROR
            continue
        print(f"{'valid' if entails(seq) else 'invalid'}: {text}")
    return status


def cmd_compute(args) -> int:
    checker = Checker(options=_options(args))
    report = run_check([args.file], checker.options, checker=checker)
    for d in report.diagnostics:
        print(d.render(3, _use_color(args.color, sys.stderr)), file=sys.stderr)
    if report.exit_code == EXIT_INPUT_ERROR:
        return EXIT_INPUT_ERROR
    decl = checker.signature.get(args.name)
    if decl is None:
        print(f"E-UNBOUND: no checked definition named {args.name!r}", file=sys.stderr)
        return EXIT_TYPE_ERROR
    if decl.body is None:
        print(f"{args.name} is postulated and has no body", file=sys.stderr)
        return EXIT_TYPE_ERROR
    print(show(whnf(checker.context(), decl.body)))
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sstt-check", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def checking_flags(p):
        p.add_argument("--type-in-type", action="store_true", help="accept U : U as rzk-1 does")
        p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, help="evaluation steps per declaration")
        p.add_argument("--color", choices=("auto", "always", "never"), default=None)

    check = sub.add_parser("check", help="type-check files in order")
    check.add_argument("files", nargs="+", help="files or corpus directories")
    check.add_argument("--json", action="store_true", help="print diagnostics as JSON")
    check.add_argument("--isolate", action="store_true", help="give each file its own signature")
    check.add_argument("--full-trace", action="store_true", help="show every trace frame")
    checking_flags(check)
    check.set_defaults(run=cmd_check)

    solve = sub.add_parser("solve", help="decide tope sequents, one per line")
    solve.add_argument("file", nargs="?", help="sequent file, or - for stdin")
    solve.set_defaults(run=cmd_solve)

    compute = sub.add_parser("compute", help="print the weak-head normal form of a definition")
    compute.add_argument("file")
    compute.add_argument("name")
    checking_flags(compute)
    compute.set_defaults(run=cmd_compute)
    return parser


def _positive(text) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("fuel must be positive")
    return value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
