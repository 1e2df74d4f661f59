from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chacon_lab.errors import DepthError, OutsideTowerError
from chacon_lab.tower import TowerGeometry, child_level, height, parent_level
from chacon_lab.triadic import Triadic

from oracles import literal_level, literal_tower

T = Triadic


def test_heights():
    assert height(0) == 1
    assert height(1) == 8
    assert [height(n) for n in (2, 3, 6)] == [50, 302, 65318]
    for n in range(12):
        assert height(n + 1) == 2 * (3 * height(n) + 1)
        assert height(n + 1) % 2 == 0


def test_level_interval_examples(geom):
    assert geom.level_interval(1, 2) == (T(1), T(4, 1))
    assert geom.level_interval(1, 7) == (T(7, 1), T(8, 1))
    assert geom.level_interval(2, 8)[0] == T(1, 2)
    with pytest.raises(OutsideTowerError):
        geom.level_interval(1, 8)


@pytest.mark.parametrize("n", range(0, 5))
def test_level_intervals_match_literal_construction(geom, n):
    lefts = [geom.level_interval(n, l)[0].to_fraction() for l in range(geom.height(n))]
    assert tuple(lefts) == literal_tower(n)


def test_locate_examples(geom):
    a = geom.locate(1, T(1))
    assert (a.level, a.offset) == (2, T(0))
    a = geom.locate(1, T(0))
    assert (a.level, a.offset) == (0, T(0))
    a = geom.locate(2, T(8, 1))
    assert (a.level, a.offset) == (16, T(0))
    with pytest.raises(OutsideTowerError):
        geom.locate(1, T(8, 1))


def test_subcolumn_examples(geom):
    assert geom.subcolumn(1, T(0)) == 1
    assert geom.subcolumn(1, T(5, 3)) == 2
    assert geom.subcolumn(0, T(2, 1)) == 3


def test_half_tower_examples(geom):
    assert geom.in_half_tower(1, T(2, 1))
    assert not geom.in_half_tower(1, T(4, 1))
    for n in range(1, 6):
        assert not geom.in_half_tower(n, geom.support_length(n))


def test_depth_is_bounded():
    g = TowerGeometry(3)
    with pytest.raises(DepthError):
        g.level_interval(4, 0)
    with pytest.raises(DepthError):
        g.locate(4, T(0))


@pytest.mark.parametrize("n", range(0, 7))
def test_tiling(geom, n):
    w = 3 ** (geom.max_depth - n)
    g = geom.grid()
    lefts = sorted(g.left(n, l) for l in range(geom.height(n)))
    assert lefts[0] == 0
    assert all(b - a == w for a, b in zip(lefts, lefts[1:]))
    assert lefts[-1] + w == g.L[n]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 6), st.data())
def test_locate_round_trip(geom, n, data):
    level = data.draw(st.integers(0, height(n) - 1))
    e = data.draw(st.integers(n, n + 20))
    off = T(data.draw(st.integers(0, 3 ** (e - n) - 1)), e)
    left, _ = geom.level_interval(n, level)
    addr = geom.locate(n, left + off)
    assert (addr.level, addr.offset) == (level, off)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 4), st.data())
def test_scale_coherence(geom, n, data):
    x = T(data.draw(st.integers(0, height(n + 1) * 3 ** 3 - 1)), n + 4)
    if not x < geom.support_length(n):
        return
    coarse = geom.locate(n, x)
    fine = geom.locate(n + 1, x)
    t = geom.subcolumn(n, x)
    assert child_level(n, coarse.level, t) == fine.level
    assert parent_level(n + 1, fine.level) == (coarse.level, t)
    # t_n is constant on the tower-(n+1) level of x
    left, _ = geom.level_interval(n + 1, fine.level)
    assert geom.subcolumn(n, left) == t


@pytest.mark.parametrize("n", range(1, 6))
def test_half_tower_nesting(geom, n):
    g = geom.grid()
    for level in range(geom.half_height(n)):
        x = T(g.left(n, level), g.scale)
        assert geom.in_half_tower(n + 1, x)
    # C_n contains the whole of tower n-1
    for level in range(geom.height(n - 1)):
        x = T(g.left(n - 1, level), g.scale)
        assert geom.in_half_tower(n, x)
        assert geom.locate(n, x).in_C


def test_literal_oracle_agrees_on_random_points(geom):
    import random

    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(0, 3)
        x = T(rng.randrange(height(n) * 3**6), n + 6)
        a = geom.locate(n, x)
        level, off = literal_level(n, x.to_fraction())
        assert (a.level, a.offset.to_fraction()) == (level, off)


def test_level_widths_uniform_shadow_of_lebesgue_uniqueness(geom):
    # every level of tower n has width 3^-n and splits into three levels of tower n+1
    for n in range(0, 4):
        for level in range(geom.height(n)):
            a, b = geom.level_interval(n, level)
            assert (b - a) == T(1, n)
            kids = sorted(geom.level_interval(n + 1, child_level(n, level, t)) for t in (1, 2, 3))
            assert kids[0][0] == a and kids[-1][1] == b
            assert kids[0][1] == kids[1][0] and kids[1][1] == kids[2][0]
