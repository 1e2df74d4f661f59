import random

import pytest
from hypothesis import given, settings, strategies as st

from chacon_lab import transform
from chacon_lab.errors import DepthExhaustedError, NoPreimageError
from chacon_lab.tower import TowerGeometry, height
from chacon_lab.triadic import Triadic

from oracles import literal_T

T = Triadic


def test_apply_examples(geom):
    assert transform.apply(T(0), geom) == T(1, 1)
    assert transform.apply(T(1, 1), geom) == T(1)
    assert transform.apply(T(1), geom) == T(2, 1)
    assert transform.apply(T(7, 1), geom) == T(1, 2)


def test_inverse_examples(geom):
    assert transform.apply_inverse(T(1, 1), geom) == T(0)
    assert transform.apply_inverse(T(1, 2), geom) == T(7, 1)
    assert transform.apply_inverse(T(2, 1), geom) == T(1)
    with pytest.raises(NoPreimageError):
        transform.apply_inverse(T(0), geom)


def test_iterate_examples(geom):
    assert transform.iterate(T(0), 4, geom) == T(4, 1)
    x = T(5, 3)
    assert transform.iterate(x, 0, geom) == x
    assert transform.iterate(transform.iterate(x, 37, geom), -37, geom) == x


def test_product_apply_examples(geom):
    assert transform.product_apply((T(0), T(1, 1)), 1, geom) == (T(1, 1), T(1))
    xs = (T(2, 1), T(5, 4))
    assert transform.product_apply(xs, 0, geom) == xs
    assert transform.product_apply((T(0), T(0)), 4, geom) == (T(4, 1), T(4, 1))


def test_depth_exhausted_only_on_top_of_deepest_tower():
    g = TowerGeometry(3)
    top = g.level_interval(3, height(3) - 1)[0]
    with pytest.raises(DepthExhaustedError):
        transform.apply(top, g)
    below = g.level_interval(3, height(3) - 2)[0]
    assert transform.apply(below, g) == top


@pytest.mark.parametrize("n", [1, 2, 3])
def test_apply_matches_literal_tower(geom, n):
    rng = random.Random(n)
    w = 3 ** (n + 3)
    for _ in range(400):
        x = T(rng.randrange(height(n) * 3**3), n + 3)
        expected = literal_T(x.to_fraction(), n)
        if expected is not None:
            assert transform.apply(x, geom).to_fraction() == expected


def test_backends_agree(any_geom):
    rng = random.Random(3)
    for _ in range(200):
        x = T(rng.randrange(height(4) * 3**6), 10)
        k = rng.randint(-150, 150)
        try:
            y = transform.iterate(x, k, any_geom)
        except NoPreimageError:
            continue
        ref = transform.iterate(x, k, TowerGeometry(8, backend="python"))
        assert y == ref


def test_large_exponent_points_use_big_integers(geom):
    x = T(3**50 + 2, 52)
    y = transform.iterate(x, 1000, geom)
    assert transform.iterate(y, -1000, geom) == x


@settings(max_examples=150, deadline=None)
@given(st.integers(0, height(4) * 3**4 - 1), st.integers(-100, 100), st.integers(-100, 100))
def test_group_law(geom, j, a, b):
    x = T(j, 8)
    try:
        lhs = transform.iterate(x, a + b, geom)
        rhs = transform.iterate(transform.iterate(x, a, geom), b, geom)
    except NoPreimageError:
        return
    assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2, 3])
def test_level_arithmetic_in_half_tower(geom, n):
    g = geom.grid()
    for level in range(geom.half_height(n) - 1):
        for off in (0, 1, 3 ** (geom.max_depth - n) - 1):
            x = T(g.left(n, level) + off, g.scale)
            y = transform.apply(x, geom)
            a, b = geom.locate(n, x), geom.locate(n, y)
            assert b.level == level + 1 and b.offset == a.offset


def test_measure_preservation_shadow(geom):
    # on a fine grid, T maps each non-top tower-2 level bijectively onto the next one
    n, m = 2, 4
    g = geom.grid()
    step = 3 ** (geom.max_depth - m)
    for level in range(height(n) - 1):
        base = g.left(n, level)
        image = {g.step(base + i * step) for i in range(3 ** (m - n))}
        target = g.left(n, level + 1)
        assert image == {target + i * step for i in range(3 ** (m - n))}


def test_orbit_generator(geom):
    it = transform.orbit(T(0), geom)
    first = [next(it) for _ in range(5)]
    assert first[4] == T(4, 1)
    back = list(transform.orbit(T(4, 1), geom, inverse=True))
    assert back == first[::-1]
