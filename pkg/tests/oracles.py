"""Brute-force references that share no code with chacon_lab's kernels."""
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def literal_tower(n):
    """Left endpoints of tower n, built by literally cutting and stacking.

    Spacers are drawn one at a time from the leftmost unused point of the
    half-line, as in the construction.
    """
    levels = [Fraction(0)]
    unused = Fraction(1)
    width = Fraction(1)
    for _ in range(n):
        third = width / 3
        cols = [[a + i * third for a in levels] for i in range(3)]
        mid_spacer = [unused]
        unused += third
        right_spacers = []
        for _ in range(3 * len(levels) + 1):
            right_spacers.append(unused)
            unused += third
        levels = cols[0] + cols[1] + mid_spacer + cols[2] + right_spacers
        width = third
    return tuple(levels)


def literal_level(n, x):
    """(level, offset) of Fraction x in the literal tower n, or None."""
    w = Fraction(1, 3**n)
    for level, a in enumerate(literal_tower(n)):
        if a <= x < a + w:
            return level, x - a
    return None


def literal_T(x, n):
    """T(x) read off the literal tower n (None if x is on its top level)."""
    found = literal_level(n, x)
    if found is None:
        return None
    level, off = found
    tower = literal_tower(n)
    if level == len(tower) - 1:
        return None
    return tower[level + 1] + off
