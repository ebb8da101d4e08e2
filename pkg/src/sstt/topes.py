"""Decision procedure for tope sequents."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian

from .cube import (
    BOT,
    TOP,
    And,
    Atom,
    Bot,
    COne,
    CProj1,
    CProj2,
    CStar,
    CTuple,
    CVar,
    CZero,
    Eq,
    INTERVAL,
    Leq,
    ONE,
    Or,
    ProductSort,
    STAR,
    Shape,
    SortError,
    Top,
    UnitSort,
    ZERO,
    sort_of,
)


@dataclass(frozen=True)
class Sequent:
    cube_zone: tuple  # of (name, CubeSort)
    hypotheses: tuple
    goal: object

    def __str__(self):
        hyps = ", ".join(str(h) for h in self.hypotheses)
        return f"{hyps} ⊢ {self.goal}" if hyps else f"⊢ {self.goal}"


def normalize_point(e, sorts):
    """Push projections through tuples, contract tuple-η and collapse sort 1."""
    s = sort_of(e, sorts)
    if isinstance(s, UnitSort):
        return STAR
    match e:
        case CTuple(a, b):
            a, b = normalize_point(a, sorts), normalize_point(b, sorts)
            if isinstance(a, CProj1) and isinstance(b, CProj2) and a.arg == b.arg:
                return a.arg
            return CTuple(a, b)
        case CProj1(a) | CProj2(a):
            a = normalize_point(a, sorts)
            if isinstance(a, CTuple):
                return a.left if isinstance(e, CProj1) else a.right
            return CProj1(a) if isinstance(e, CProj1) else CProj2(a)
    return e


def _components(e, s, sorts):
    """Split a normalized point of sort `s` into (leaf, sort) pairs."""
    if isinstance(s, UnitSort):
        return []
    if isinstance(s, ProductSort):
        left = normalize_point(CProj1(e), sorts)
        right = normalize_point(CProj2(e), sorts)
        return _components(left, s.left, sorts) + _components(right, s.right, sorts)
    return [(e, s)]


def prepare(t, sorts):
    """Normalize points and decompose equalities of tuples componentwise."""
    match t:
        case Top() | Bot():
            return t
        case And(a, b):
            return And(prepare(a, sorts), prepare(b, sorts))
        case Or(a, b):
            return Or(prepare(a, sorts), prepare(b, sorts))
        case Eq(a, b):
            sa, sb = sort_of(a, sorts), sort_of(b, sorts)
            if sa != sb:
                raise SortError(f"{t}: sorts {sa} and {sb} differ")
            left = _components(normalize_point(a, sorts), sa, sorts)
            right = _components(normalize_point(b, sorts), sb, sorts)
            out = TOP
            for (x, _), (y, _) in reversed(list(zip(left, right))):
                lit = Eq(x, y)
                out = lit if isinstance(out, Top) else And(lit, out)
            return out
        case Leq(a, b):
            for side in (a, b):
                if sort_of(side, sorts) != INTERVAL:
                    raise SortError(f"{t}: ≤ compares points of 2")
            return Leq(normalize_point(a, sorts), normalize_point(b, sorts))
        case Atom(head, args):
            return Atom(head, tuple(normalize_point(a, sorts) for a in args))
    raise SortError(f"not a tope: {t!r}")


def dnf(t) -> list:
    """Disjunctive normal form as a list of literal lists."""
    match t:
        case Top():
            return [[]]
        case Bot():
            return []
        case And(a, b):
            return [x + y for x, y in cartesian(dnf(a), dnf(b))]
        case Or(a, b):
            return dnf(a) + dnf(b)
    return [[t]]


def _leaves(t, sorts, out):
    match t:
        case And(a, b) | Or(a, b):
            _leaves(a, sorts, out)
            _leaves(b, sorts, out)
        case Eq(a, b) | Leq(a, b):
            for p in (a, b):
                if p not in out:
                    out[p] = sort_of(p, sorts) == INTERVAL
        case Atom(_, args):
            for a in args:
                for leaf, s in _components(a, sort_of(a, sorts), sorts):
                    if leaf not in out:
                        out[leaf] = s == INTERVAL


class AtomClosure:
    """Order closure over leaf points; 0 and 1 are always tracked.

    `le[i]` is a bitmask of the indices j with point i ≤ point j. Equality
    is two-way order, so union-find classes are read off the masks.
    """

    def __init__(self, points: dict, sorts):
        self.sorts = sorts
        self.points = [ZERO, ONE] + [p for p in points if p not in (ZERO, ONE)]
        self.index = {p: i for i, p in enumerate(self.points)}
        self.interval = [True, True] + [points[p] for p in self.points[2:]]
        n = len(self.points)
        self.le = [1 << i for i in range(n)]
        self.atoms = []
        for i in range(n):
            if self.interval[i]:
                self.le[0] |= 1 << i
                self.le[i] |= 1 << 1

    def copy(self):
        c = object.__new__(AtomClosure)
        c.sorts, c.points, c.index, c.interval = self.sorts, self.points, self.index, self.interval
        c.le = list(self.le)
        c.atoms = list(self.atoms)
        return c

    @property
    def inconsistent(self):
        return bool(self.le[1] & 1)

    def add_le(self, i, j):
        if self.le[i] >> j & 1:
            return
        above = self.le[j]
        bit = 1 << i
        for k, mask in enumerate(self.le):
            if mask & bit:
                self.le[k] = mask | above

    def assume(self, lit):
        match lit:
            case Leq(a, b):
                self.add_le(self.index[a], self.index[b])
            case Eq(a, b):
                i, j = self.index[a], self.index[b]
                self.add_le(i, j)
                self.add_le(j, i)
            case Atom(head, args):
                self.atoms.append((head, args))
            case Top():
                pass
            case _:
                raise ValueError(f"not a literal: {lit}")

    def leq(self, a, b):
        return bool(self.le[self.index[a]] >> self.index[b] & 1)

    def same(self, a, b):
        return self.leq(a, b) and self.leq(b, a)

    def point_eq(self, a, b):
        if a == b:
            return True
        sa = sort_of(a, self.sorts)
        ca = _components(a, sa, self.sorts)
        cb = _components(b, sa, self.sorts)
        return all(self.same(x, y) for (x, _), (y, _) in zip(ca, cb))

    def has_atom(self, atom):
        for head, args in self.atoms:
            if head == atom.head and len(args) == len(atom.args):
                if all(self.point_eq(x, y) for x, y in zip(args, atom.args)):
                    return True
        return False

    def determined(self, i, j):
        return bool(self.le[i] >> j & 1 or self.le[j] >> i & 1)


def _interval_points(t, closure, out):
    match t:
        case And(a, b) | Or(a, b):
            _interval_points(a, closure, out)
            _interval_points(b, closure, out)
        case Eq(a, b) | Leq(a, b):
            for p in (a, b):
                i = closure.index[p]
                if closure.interval[i] and i not in out:
                    out.append(i)


def _holds(closure: AtomClosure, goal) -> bool:
    if closure.inconsistent:
        return True
    match goal:
        case Top():
            return True
        case Bot():
            return False
        case Leq(a, b):
            return closure.leq(a, b)
        case Eq(a, b):
            return closure.same(a, b)
        case Atom():
            return closure.has_atom(goal)
        case And(a, b):
            return _holds(closure, a) and _holds(closure, b)
        case Or(a, b):
            if _holds(closure, a) or _holds(closure, b):
                return True
            pts = []
            _interval_points(goal, closure, pts)
            for x in range(len(pts)):
                for y in range(x + 1, len(pts)):
                    i, j = pts[x], pts[y]
                    if not closure.determined(i, j):
                        left, right = closure.copy(), closure.copy()
                        left.add_le(i, j)
                        right.add_le(j, i)
                        return _holds(left, goal) and _holds(right, goal)
            return False
    raise ValueError(f"not a tope: {goal!r}")


def entails(seq: Sequent) -> bool:
    sorts = dict(seq.cube_zone)
    hyps = [prepare(h, sorts) for h in seq.hypotheses]
    goal = prepare(seq.goal, sorts)
    points: dict = {}
    for h in hyps:
        _leaves(h, sorts, points)
    _leaves(goal, sorts, points)
    base = AtomClosure(points, sorts)
    branches = [[]]
    for h in hyps:
        branches = [b + d for b in branches for d in dnf(h)]
    for branch in branches:
        closure = base.copy()
        for lit in branch:
            closure.assume(lit)
        if not _holds(closure, goal):
            return False
    return True


def consistent(cube_zone, hypotheses) -> bool:
    return not entails(Sequent(tuple(cube_zone), tuple(hypotheses), BOT))


def equivalent(cube_zone, a, b) -> bool:
    zone = tuple(cube_zone)
    return entails(Sequent(zone, (a,), b)) and entails(Sequent(zone, (b,), a))


def subshape(sub: Shape, sup: Shape) -> bool:
    if sub.sort != sup.sort:
        return False
    zone = ((sub.var, sub.sort),)
    return entails(Sequent(zone, (sub.tope,), sup.at(CVar(sub.var))))


def split_branches(cube_zone, hypotheses) -> list:
    """Consistent DNF branches of the hypotheses, as lists of literal topes."""
    sorts = dict(cube_zone)
    branches = [[]]
    for h in hypotheses:
        branches = [b + d for b in branches for d in dnf(prepare(h, sorts))]
    out = []
    for b in branches:
        if consistent(cube_zone, b):
            out.append(b)
    return out
