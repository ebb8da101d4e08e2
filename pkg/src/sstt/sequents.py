"""ASCII tope sequents `hyp, hyp |- goal` over interval variables."""

from __future__ import annotations

from .diagnostics import CheckError, ParseError
from .evaluator import Context, to_tope
from .parser import Parser, tokenize
from .terms import IntervalCube, free_vars
from .topes import Sequent

TURNSTILES = ("|-", "⊢")


def parse_sequent(line: str) -> Sequent:
    """Free variables range over the interval `2`."""
    for turnstile in TURNSTILES:
        left, sep, right = line.partition(turnstile)
        if sep:
            break
    else:
        raise ParseError("expected '|-' between hypotheses and goal", 1, 1)
    hyps = _topes(left, 1, allow_empty=True)
    (goal,) = _topes(right, len(left) + len(sep) + 1, allow_empty=False, single=True)
    names = sorted(set().union(*(free_vars(t) for t in hyps + [goal])))
    ctx = Context.empty()
    for name in names:
        ctx = ctx.with_cube(name, IntervalCube())
    try:
        return Sequent(
            ctx.cube_zone, tuple(to_tope(ctx, h) for h in hyps), to_tope(ctx, goal)
        )
    except CheckError as err:
        raise ParseError(err.message, 1, 1) from None


def _topes(text, col, allow_empty, single=False):
    p = Parser(tokenize(text, 1, col))
    if p.peek.kind == "eof":
        if allow_empty:
            return []
        raise p.error("expected a tope")
    out = [p.disjunction()]
    while not single and p.at(","):
        p.advance()
        out.append(p.disjunction())
    if p.peek.kind != "eof":
        raise p.error("unexpected input in sequent")
    return out
