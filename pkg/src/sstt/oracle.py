"""Reference semantics for tope sequents by enumerating finite weak orders.

Every leaf point of sort 2 is assigned a level in a chain whose bottom
level holds 0 and whose top level holds 1. A sequent is valid iff its goal
holds in every such assignment that satisfies all hypotheses.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as cartesian

import numpy as np

from .cube import And, Atom, Bot, Eq, Leq, ONE, Or, Top, ZERO
from .topes import Sequent, _leaves, prepare

MAX_ATOMS = 6


class OracleCapacityError(Exception):
    """The sequent mentions more points than the oracle will enumerate."""


@lru_cache(maxsize=None)
def weak_orders(n: int):
    """All weak orders of n points strictly between or on the endpoints.

    Returns (levels, tops): levels[r, i] is the level of point i in model r,
    0 sits at level 0 and 1 at level tops[r]. The interior levels in use are
    exactly 1..tops[r]-1, so each weak order appears once.
    """
    rows, tops = [], []
    for m in range(n + 1):
        for levels in cartesian(range(m + 2), repeat=n):
            if {v for v in levels if 0 < v <= m} == set(range(1, m + 1)):
                rows.append(levels)
                tops.append(m + 1)
    return np.array(rows, dtype=np.int8).reshape(len(rows), n), np.array(tops, dtype=np.int8)


def _evaluate(t, column, zeros, tops):
    match t:
        case Top():
            return np.ones_like(tops, dtype=bool)
        case Bot():
            return np.zeros_like(tops, dtype=bool)
        case And(a, b):
            return _evaluate(a, column, zeros, tops) & _evaluate(b, column, zeros, tops)
        case Or(a, b):
            return _evaluate(a, column, zeros, tops) | _evaluate(b, column, zeros, tops)
        case Leq(a, b):
            return column(a) <= column(b)
        case Eq(a, b):
            return column(a) == column(b)
        case Atom():
            raise OracleCapacityError("opaque tope atoms have no finite model here")
    raise ValueError(f"not a tope: {t!r}")


def oracle_entails(seq: Sequent) -> bool:
    sorts = dict(seq.cube_zone)
    hyps = [prepare(h, sorts) for h in seq.hypotheses]
    goal = prepare(seq.goal, sorts)
    points: dict = {}
    for t in [*hyps, goal]:
        _leaves(t, sorts, points)
    leaves = [p for p in points if p not in (ZERO, ONE)]
    if any(not points[p] for p in leaves):
        raise OracleCapacityError("only points of the interval are modelled")
    if len(leaves) > MAX_ATOMS:
        raise OracleCapacityError(f"{len(leaves)} points exceed the budget of {MAX_ATOMS}")
    levels, tops = weak_orders(len(leaves))
    zeros = np.zeros_like(tops)
    where = {p: i for i, p in enumerate(leaves)}

    def column(p):
        if p == ZERO:
            return zeros
        if p == ONE:
            return tops
        return levels[:, where[p]]

    ok = np.ones_like(tops, dtype=bool)
    for h in hyps:
        ok &= _evaluate(h, column, zeros, tops)
    holds = _evaluate(goal, column, zeros, tops)
    return bool(np.all(holds | ~ok))

