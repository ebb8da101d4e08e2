"""Sequent generators shared by the solver tests and the acceptance suite."""

import itertools
import random

from hypothesis import strategies as st

from sstt.cube import BOT, INTERVAL, ONE, TOP, ZERO, And, CVar, Eq, Leq, Or
from sstt.topes import Sequent

VARS = ("x", "y", "z", "w")


def zone(names):
    return tuple((n, INTERVAL) for n in names)


def canonical_atoms(names):
    """⊤, ⊥ and every non-reflexive ≤ / ≡ between 0, 1 and the variables."""
    pts = [ZERO, ONE, *map(CVar, names)]
    atoms = [TOP, BOT]
    atoms += [Leq(a, b) for a in pts for b in pts if a != b]
    atoms += [Eq(a, b) for a, b in itertools.combinations(pts, 2)]
    return atoms


def depth_one(atoms):
    pairs = list(itertools.combinations_with_replacement(atoms, 2))
    return atoms + [op(a, b) for op in (And, Or) for a, b in pairs]


def exhaustive_sequents():
    """Sequents over two variables with connective depth at most 2 in total.

    One hypothesis and a goal of depth ≤ 1 each, plus two atomic hypotheses
    with an atomic goal.
    """
    z = zone(VARS[:2])
    atoms = canonical_atoms(VARS[:2])
    shallow = depth_one(atoms)
    for h in shallow:
        for g in shallow:
            yield Sequent(z, (h,), g)
    for h1, h2 in itertools.combinations_with_replacement(atoms, 2):
        for g in atoms:
            yield Sequent(z, (h1, h2), g)


def random_tope(rng, names, depth):
    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.05:
            return TOP
        if roll < 0.1:
            return BOT
        pts = [ZERO, ONE, *map(CVar, names)]
        a, b = rng.choice(pts), rng.choice(pts)
        return Leq(a, b) if rng.random() < 0.6 else Eq(a, b)
    op = And if rng.random() < 0.5 else Or
    return op(random_tope(rng, names, depth - 1), random_tope(rng, names, depth - 1))


def random_sequents(count, seed=0, max_vars=4, max_depth=3, max_hyps=3):
    rng = random.Random(seed)
    for _ in range(count):
        names = VARS[: rng.randint(1, max_vars)]
        hyps = tuple(random_tope(rng, names, rng.randint(0, max_depth)) for _ in range(rng.randint(0, max_hyps)))
        yield Sequent(zone(names), hyps, random_tope(rng, names, rng.randint(0, max_depth)))


points = st.sampled_from([ZERO, ONE, *map(CVar, VARS[:3])])
literals = st.one_of(
    st.just(TOP),
    st.just(BOT),
    st.tuples(points, points).map(lambda p: Leq(*p)),
    st.tuples(points, points).map(lambda p: Eq(*p)),
)
topes = st.recursive(
    literals,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: And(*p)),
        st.tuples(inner, inner).map(lambda p: Or(*p)),
    ),
    max_leaves=6,
)
ZONE3 = zone(VARS[:3])
