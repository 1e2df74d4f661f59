import numpy as np
import pytest

from chacon_lab import witness as wt
from chacon_lab.diagonals import ConsistentFamily
from chacon_lab.errors import PreconditionError, WindowError
from chacon_lab.measures import DiagonalMeasureParams
from chacon_lab.tower import half_height, height
from chacon_lab.transform import iterate
from chacon_lab.triadic import Triadic

T = Triadic
GRAPH0 = ConsistentFamily(1, (0, 0))
WEIRD = ConsistentFamily(1, (0, 0), ((1, 3), (1, 1)), "repeat")
DISS = ConsistentFamily(1, (0, 0), ((1, 3),), "repeat")


def test_graph_witness_is_symmetric(geom):
    a, b = wt.witness_point(wt.WitnessSpec(GRAPH0, 3), geom)
    assert a == b
    loc = geom.locate(3, a)
    assert loc.in_C and loc.offset == T(0)


def test_corner_witness_subcolumns(geom):
    f = ConsistentFamily(1, (0, 0), ((1, 3),))
    xs = wt.witness_point(wt.WitnessSpec(f, 2), geom)
    assert [geom.subcolumn(1, x) for x in xs] == [1, 3]


@pytest.mark.parametrize("family, depth", [(GRAPH0, 5), (WEIRD, 6), (ConsistentFamily(2, (0, 17), ((3, 1),)), 5)])
def test_witness_lies_in_every_chain_box(geom, family, depth):
    spec = wt.WitnessSpec(family, depth)
    xs = wt.witness_point(spec, geom)
    chain = wt.witness_chain(spec)
    params = DiagonalMeasureParams(family)
    for b in chain:
        assert b.contains_point(xs, geom)
        assert params.diagonal(b.depth).contains(b)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_graph_witness_is_a_graph_point(geom, k):
    xs = wt.witness_point(wt.WitnessSpec(ConsistentFamily(1, (0, k)), 5), geom)
    assert iterate(xs[0], k, geom) == xs[1]


def test_witness_preconditions():
    with pytest.raises(PreconditionError):
        wt.witness_chain(wt.WitnessSpec(DISS, 3))
    assert len(wt.witness_chain(wt.WitnessSpec(DISS, 3, require_consistent=False))) == 3
    with pytest.raises(PreconditionError):
        wt.witness_chain(wt.WitnessSpec(GRAPH0, 3, position=4))
    with pytest.raises(PreconditionError):
        wt.witness_chain(wt.WitnessSpec(ConsistentFamily(1, (0, 1), ((1, 3),), "none"), 4))
    with pytest.raises(ValueError):
        wt.WitnessSpec(GRAPH0, 3, central_choice=4)


def test_seen_invariance():
    rep = wt.verify_seen_invariance(wt.WitnessSpec(GRAPH0, 4), -20, 20)
    assert rep.ok and rep.details["undefined"] == 0
    assert wt.verify_seen_invariance(wt.WitnessSpec(WEIRD, 5), 0, 100).ok
    assert wt.verify_seen_invariance(wt.WitnessSpec(GRAPH0, 4), 0, 0).ok


def test_backward_window_needs_central_choice():
    # with subcolumn 1 at every step the witness is 0, whose backward orbit is undefined
    rep = wt.verify_seen_invariance(wt.WitnessSpec(GRAPH0, 4, central_choice=1), -20, 20)
    assert rep.ok and rep.details["undefined"] == 20


def test_hopf_graph_run():
    p = DiagonalMeasureParams(GRAPH0)
    start = wt.random_start(p, 4, np.random.default_rng(11))
    assert start[0] == start[1]
    table = wt.hopf_experiment(p, start, 1, 10 * height(4))
    assert table["max_deviation"] <= 0.1 and not table["support_mismatch"] and not table["truncated"]
    assert table["N"] == sum(r["n_B"] for r in table["rows"])


def test_hopf_off_support_and_degenerate():
    p = DiagonalMeasureParams(GRAPH0)
    table = wt.hopf_experiment(p, (T(0), T(4, 1)), 2, 2000)
    assert table["support_mismatch"]
    assert wt.hopf_experiment(p, (T(0), T(0)), 1, 0)["degenerate"]


def test_hopf_truncates_at_depth_budget():
    from chacon_lab.tower import TowerGeometry

    g = TowerGeometry(3)
    p = DiagonalMeasureParams(GRAPH0, max_depth=3)
    table = wt.hopf_experiment(p, (T(0), T(0)), 1, 1000, g)
    assert table["truncated"] and table["steps"] == height(3) - 1


def test_crossing_counts_one_dimensional():
    p = DiagonalMeasureParams(ConsistentFamily(1, (0,)))
    out = wt.crossing_counts(p, (T(0),), 1, 2)
    assert out["n_B"] == out["n_prime_B"]
    assert out["shift_check"].ok


def test_crossing_counts_graph_witness():
    p = DiagonalMeasureParams(GRAPH0)
    xs = wt.witness_point(wt.WitnessSpec(GRAPH0, 5, central_choice=1))
    for n in (2, 3):
        out = wt.crossing_counts(p, xs, 1, n)
        assert out["shift_check"] is not None and out["shift_check"].ok
        assert out["N"] == out["N_prime"]
    with pytest.raises(WindowError):
        wt.crossing_counts(p, xs, 1, 3, window=10)


def test_dissipative_support():
    p = DiagonalMeasureParams(DISS)
    xs = wt.witness_point(wt.WitnessSpec(DISS, 5, require_consistent=False))
    out = wt.orbit_support_check(p, xs, -height(4), height(4), [3, 4])
    assert [r["crossings"] for r in out["rows"]] == [1, 1]
    assert all(r["off_diagonal"] == 0 for r in out["rows"])
    with pytest.raises(PreconditionError):
        wt.orbit_support_check(DiagonalMeasureParams(GRAPH0), xs, -10, 10, [2])
