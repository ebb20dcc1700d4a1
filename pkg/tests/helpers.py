"""Seeded random generators shared by the unit and acceptance tests."""

from fractions import Fraction

from qtower.tower import Tower, TowerElement


def random_rational(rng, bound=100):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_element(rng, level, bound=100, nonzero=False):
    while True:
        coords = tuple(random_rational(rng, bound) for _ in range(1 << level))
        elt = TowerElement(level, coords)
        if not nonzero or not elt.is_zero:
            return elt


def random_tower(rng, depth, bound=10):
    """A valid tower of exactly the requested depth: each square is a
    random positive non-square of the level below."""
    t = Tower()
    while t.depth < depth:
        cand = random_element(rng, t.depth, bound)
        if cand.is_zero:
            continue
        if t.exact_sign(cand) < 0:
            cand = -cand
        if t.is_square(cand) is not None:
            continue
        t = t.adjoin_sqrt(cand)
    return t
