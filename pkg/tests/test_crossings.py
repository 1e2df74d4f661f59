from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chacon_lab import crossings as cr
from chacon_lab.errors import DepthError, PreconditionError, WindowError
from chacon_lab.tower import TowerGeometry, half_height, height
from chacon_lab.triadic import Triadic

from oracles import literal_T, literal_level

T = Triadic


def literal_mask(xs, n, steps, deep=4):
    """Membership of (T^{xd})^j xs in C_n^d for j = 0..steps, from the literal tower."""
    pts = [x.to_fraction() for x in xs]
    out = []
    for _ in range(steps + 1):
        found = [literal_level(n, p) for p in pts]
        out.append(all(f is not None and f[0] < half_height(n) for f in found))
        pts = [literal_T(p, deep) for p in pts]
    return out


def test_known_crossings(geom):
    assert cr.first_crossing((T(0),), 2, geom) == cr.Crossing(2, 0, 24)
    assert cr.crossings_in_window((T(0), T(0)), 2, 0, 100, geom) == [cr.Crossing(2, 0, 24), cr.Crossing(2, 50, 74)]
    assert cr.second_crossing((T(0),), 3, 1000, geom) == cr.Crossing(3, 302, 452)
    assert cr.second_crossing((T(0),), 3, 200, geom) is None


def test_crossing_object():
    c = cr.Crossing(2, 5, 9)
    assert len(c) == 5 and 5 in c and 10 not in c
    assert cr.Crossing(2, 0, 20).contains(c)
    assert c.to_json() == {"depth": 2, "start": 5, "end": 9, "length": 5}


def test_crossing_preconditions(geom):
    with pytest.raises(PreconditionError):
        cr.crossing_at((T(0), T(4, 1)), 1, 0, geom)  # 4/3 is on level 4, above C_1
    with pytest.raises(PreconditionError):
        cr.crossing_at((T(0),), 2, -1, geom)  # 0 has no preimage
    with pytest.raises(WindowError):
        cr.find_special_depths((T(0),), 3, window=100, geometry=geom)
    with pytest.raises(DepthError):
        cr.find_special_depths((T(0),), 12, geometry=geom)


def test_backward_part_counts_as_outside(geom):
    # the orbit of 0 is undefined before time 0, so the crossing starts there
    assert cr.crossing_at((T(0),), 3, 10, geom).start == 0


def test_partial_shift():
    s = cr.PartialShift.from_g1(3, [1, 3])
    assert s.G2 == {2}
    assert s.apply_levels((4, 4, 4)) == (5, 4, 5)
    assert len(cr.PartialShift.all(3)) == 8
    with pytest.raises(ValueError):
        cr.PartialShift({1}, {1, 2})
    with pytest.raises(ValueError):
        cr.PartialShift({1}, {3})
    assert s((T(0), T(0), T(0))) == (T(1, 1), T(0), T(1, 1))


@pytest.mark.parametrize("xs, n", [((T(0), T(4, 1)), 2), ((T(1, 2), T(7, 3)), 2), ((T(0), T(0), T(2, 1)), 1)])
def test_mask_matches_literal_tower(geom, xs, n):
    got = cr.half_cube_mask(xs, n, 0, 120, geom).tolist()
    assert got == literal_mask(xs, n, 120)


def test_min_enclosing_depth(geom):
    assert cr.min_enclosing_depth((T(0),), geom) == 1
    assert cr.min_enclosing_depth((T(0), T(4, 1)), geom) == 2
    assert cr.min_enclosing_depth((T(10),), geom) == 4  # 10 < L_3, so 10 is in C_4


points = st.tuples(st.integers(0, 3**6 * 50 // 9 - 1), st.integers(0, 3**6 * 50 // 9 - 1)).map(
    lambda t: (T(t[0], 6), T(t[1], 6)))


@settings(max_examples=30, deadline=None)
@given(points, st.integers(1, 3))
def test_separation_property(xs, n):
    rep = cr.verify_separation(xs, n, -5 * height(n), 5 * height(n))
    assert rep.ok, rep.witnesses


@settings(max_examples=30, deadline=None)
@given(points, st.integers(2, 3))
def test_long_crossing_property(xs, n):
    rep = cr.verify_long_crossing(xs, n, 0, 6 * height(n))
    assert rep.ok, rep.witnesses


@settings(max_examples=20, deadline=None)
@given(points)
def test_first_crossing_nesting(xs):
    rep = cr.verify_first_crossing_nesting(xs, 5)
    assert rep.ok, rep.witnesses


@settings(max_examples=20, deadline=None)
@given(points)
def test_special_depths_have_increment(xs):
    for hit in cr.find_special_depths(xs, 5):
        assert hit.pattern_ok and hit.increment_ok, hit
        assert hit.second.start > cr.first_crossing(xs, hit.n).end


def test_special_depths_of_zero(geom):
    hits = cr.find_special_depths((T(0),), 3, geometry=geom)
    assert [h.n for h in hits] == [2, 3]
    assert all(h.pattern == (1,) and h.increment_ok and h.contains_return for h in hits)


@pytest.mark.parametrize("d, n", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)])
def test_bto_sb_all_partitions(geom, d, n):
    for s in cr.PartialShift.all(d):
        rep = cr.verify_bto_sb(n, s, geometry=geom)
        assert rep.ok and rep.checked > 0, rep.to_json()


def test_bto_sb_with_centres(geom):
    rep = cr.verify_bto_sb(2, cr.PartialShift.from_g1(2, [1]), resolution=5, centres=True, geometry=geom)
    assert rep.ok and rep.details["resolution"] == 5


def test_bto_sb_brute_force(geom):
    """Direct point check for d = 2, n = 1 against T iterated h_1 + 1 times.

    Coordinates moved by S sit in subcolumn 1 and the others in subcolumn 2.
    """
    from chacon_lab.transform import product_apply

    n, k = 1, height(1) + 1
    s = cr.PartialShift.from_g1(2, [2])
    hh = half_height(n)
    checked = 0
    for a in range(0, 3 * 8, 2):
        for b in range(1, 3 * 8, 3):
            xs = (T(a, 3), T(b, 3))
            if not all(geom.in_half_tower(n, x) for x in xs):
                continue
            if [geom.subcolumn(n, x) for x in xs] != [2, 1]:
                continue
            checked += 1
            ys = product_apply(xs, k, geom)
            la = [geom.locate(n, x).level if geom.in_half_tower(n, x) else None for x in xs]
            lb = [geom.locate(n, y).level for y in ys]  # SB may reach level h_n/2 of tower n
            for B in [(i, j) for i in range(hh) for j in range(hh)]:
                SB = s.apply_levels(B)
                in_b = tuple(la) == B
                in_sb = tuple(lb) == SB
                assert in_b == in_sb, (xs, B)
    assert checked > 0


@pytest.mark.parametrize("n, ell", [(2, 2), (2, 3), (3, 3)])
def test_tn_lemma(geom, n, ell):
    rep = cr.verify_tn(n, ell, geometry=geom)
    assert rep.ok and rep.checked > 0
    rep3 = cr.verify_tn(n, ell, d=3, geometry=geom)
    assert rep3.ok


def test_crossing_bound_violation_is_loud():
    # a crossing longer than h_n/2 cannot occur; the scan stops one past the bound
    g = TowerGeometry(6)
    c = cr.crossing_at((T(0), T(0)), 4, 0, g)
    assert len(c) <= half_height(4)
