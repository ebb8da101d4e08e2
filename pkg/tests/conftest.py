from pathlib import Path

import pytest

from sstt.corpus import load_manifest
from sstt.evaluator import Options
from sstt.parser import parse_text
from sstt.typechecker import Checker, check_module

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def check_source(text, checker=None, options=None, file="<test>.rzk"):
    """Check rzk source (header added if missing); returns (result, checker)."""
    if not text.lstrip().startswith("#lang"):
        text = "#lang rzk-1\n" + text
    checker = checker or Checker(options=options or Options())
    module = parse_text(text, file)
    return check_module(module, checker, file), checker


def codes(result):
    return [d.code for d in result.diagnostics]


@pytest.fixture(scope="session")
def corpus_run():
    """Every manifest entry checked in order against one shared signature."""
    checker = Checker()
    results = []
    for entry in load_manifest(CORPUS):
        module = parse_text(entry.path.read_text(encoding="utf-8"), str(entry.path))
        results.append((entry, module, check_module(module, checker, str(entry.path))))
    return checker, results


class Env:
    """A checker plus a context extended by a parameter telescope."""

    def __init__(self, params="", prelude="", options=None):
        from sstt.parser import parse_declarations

        self.checker = Checker(options=options or Options())
        if prelude:
            result, _ = check_source(prelude, self.checker)
            assert not result.diagnostics, [d.render() for d in result.diagnostics]
        ctx = self.checker.context()
        if params:
            (decl,) = parse_declarations(f"#postulate _env {params} : U")
            ctx, _, _ = self.checker.telescope(ctx, decl.params, ())
        self.ctx = ctx

    def type(self, text, ctx=None):
        from sstt.parser import parse_term

        return self.checker.check_type(ctx or self.ctx, parse_term(text))[0]

    def term(self, text, ty, ctx=None):
        from sstt.parser import parse_term

        ctx = ctx or self.ctx
        return self.checker.check(ctx, parse_term(text), self.type(ty, ctx) if isinstance(ty, str) else ty)

    def infer(self, text, ctx=None):
        from sstt.parser import parse_term

        return self.checker.infer(ctx or self.ctx, parse_term(text))


@pytest.fixture
def env():
    return Env


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
