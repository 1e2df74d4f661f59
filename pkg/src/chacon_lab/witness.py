"""Rational points seen by a consistent family, and orbit experiments on them.

The witness for a family is the left-endpoint tuple of a box chain
``B_{n0} > B_{n0+1} > ... > B_M`` with ``B_{m+1} = B_m(tau_m)``.  It lies
in every ``B_m`` and so in every ``D_m`` for ``m <= M``; it stands in for
the (possibly irrational) point of the nested intersection.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .crossings import PartialShift, _levels, _setup, crossings_in_window, first_crossing, second_crossing
from .diagonals import BoxD, ConsistentFamily, Segment, box_refine, descend, is_central, refine_family
from .errors import DepthExhaustedError, PreconditionError, WindowError
from .measures import DiagonalMeasureParams, Kind, classify, measure_of_box, measure_of_halfcube
from .report import Report
from .tower import TowerGeometry, default_geometry, half_height, height
from .triadic import Triadic

__all__ = [
    "WitnessSpec",
    "crossing_counts",
    "hopf_experiment",
    "orbit_support_check",
    "random_start",
    "verify_seen_invariance",
    "witness_chain",
    "witness_point",
]


@dataclass(frozen=True)
class WitnessSpec:
    """Chain selector for a witness of ``family`` at depth ``depth``.

    ``position`` picks the starting box along D_{n0} (default: the first box
    inside C_{n0-1}^d, or box 0 when n0 = 1).  ``central_choice`` is the
    common subcolumn taken at central steps.
    """

    family: ConsistentFamily
    depth: int
    position: int | None = None
    central_choice: int = 2
    require_consistent: bool = True

    def __post_init__(self):
        if self.depth < self.family.n0:
            raise ValueError(f"depth must be at least n0 = {self.family.n0}")
        if self.central_choice not in (1, 2, 3):
            raise ValueError("central_choice must be 1, 2 or 3")

    def to_json(self) -> dict:
        return {"family": self.family.to_json(), "depth": self.depth, "position": self.position,
                "central_choice": self.central_choice}


def _first_box(spec: WitnessSpec) -> BoxD:
    f = spec.family
    D = f.initial
    if f.n0 == 1:
        k = spec.position or 0
        if not 0 <= k < D.box_count:
            raise PreconditionError(f"position {k} outside 0..{D.box_count - 1}")
        return D.box(k)
    segs = descend([Segment(f.n0, 0, D.box_count - 1, D.offsets)])
    if not segs:
        raise PreconditionError(f"D_{f.n0} has no box inside C_{f.n0 - 1}^d")
    if spec.position is None:
        return D.box(min(seg.lo for seg in segs))
    if not any(seg.lo <= spec.position <= seg.hi for seg in segs):
        raise PreconditionError(f"box {spec.position} of D_{f.n0} is not inside C_{f.n0 - 1}^d")
    return D.box(spec.position)


def witness_chain(spec: WitnessSpec) -> list[BoxD]:
    f = spec.family
    if not f.certifiable and spec.depth > f.n0 + len(f.taus):
        raise PreconditionError(f"truncated family is not certified to depth {spec.depth}")
    if spec.require_consistent and f.condition_tau() is False:
        raise PreconditionError("some coordinate is eventually always 3: the family sees no point")
    chain = [_first_box(spec)]
    for m in range(f.n0, spec.depth):
        tau = f.tau(m)
        if is_central(tau):
            tau = (spec.central_choice,) * f.d
        chain.append(box_refine(chain[-1], tau))
    return chain


def witness_point(spec: WitnessSpec, geometry: TowerGeometry | None = None) -> tuple:
    geometry = geometry or default_geometry()
    geometry._check_depth(spec.depth)
    return witness_chain(spec)[-1].left_endpoints(geometry)


def verify_seen_invariance(spec: WitnessSpec, j_min: int, j_max: int,
                           geometry: TowerGeometry | None = None) -> Report:
    """Shifted witnesses are outside C_n^d or inside D_n, for n0 <= n <= M - 1."""
    geometry = geometry or default_geometry()
    xs = witness_point(spec, geometry)
    diags = refine_family(spec.family, max(spec.family.n0, spec.depth - 1), geometry)
    _, g, ps = _setup(xs, geometry)
    rep = Report("seen", details={"window": [j_min, j_max], "depths": [spec.family.n0, spec.depth - 1]})
    for D in diags[: spec.depth - spec.family.n0]:
        n = D.depth
        levels = np.stack([_levels(g, n, p, j_min, j_max) for p in ps], axis=1)
        hh = half_height(n)
        inside = np.all((levels >= 0) & (levels < hh), axis=1)
        rel = levels - levels.min(axis=1, keepdims=True)
        on = np.all(rel == np.asarray(D.offsets), axis=1)
        rep.checked += len(levels)
        for j in np.flatnonzero(inside & ~on):
            rep.fail({"j": int(j) + j_min, "n": n, "levels": levels[j].tolist()})
    # times before the backward orbit of some coordinate reaches 0
    undefined = 0
    if j_min < 0:
        undefined = max(-j_min - (len(g.orbit(p, j_min)) - 1) for p in ps)
    rep.details["undefined"] = undefined
    return rep


# experiments ----------------------------------------------------------------


def random_start(p: DiagonalMeasureParams, depth: int, rng, geometry: TowerGeometry | None = None) -> tuple:
    """Left endpoints of a box of D_depth drawn uniformly with ``rng`` (a numpy Generator)."""
    D = p.diagonal(depth)
    return D.box(int(rng.integers(D.box_count))).left_endpoints(geometry)


def _forward_levels(g, n: int, p: int, steps: int) -> tuple[np.ndarray, int]:
    """Levels for j = 0..steps, truncated where the depth budget runs out."""
    try:
        return np.asarray(g.orbit_levels(n, p, steps), dtype=np.int64), steps
    except DepthExhaustedError:
        out = [g.level_of(n, p)]
        for _ in range(steps):
            try:
                p = g.step(p)
            except DepthExhaustedError:
                break
            out.append(g.level_of(n, p))
        return np.asarray(out, dtype=np.int64), len(out) - 1


def _box_counts(level_rows: np.ndarray, hh: int) -> Counter:
    inside = np.all((level_rows >= 0) & (level_rows < hh), axis=1)
    if not inside.any():
        return Counter()
    uniq, counts = np.unique(level_rows[inside], axis=0, return_counts=True)
    return Counter({tuple(int(v) for v in u): int(c) for u, c in zip(uniq, counts)})


def hopf_experiment(p: DiagonalMeasureParams, start: Sequence[Triadic], m: int, steps: int,
                    geometry: TowerGeometry | None = None) -> dict:
    """Visit frequencies of m-boxes along ``j = 0..steps`` against ``sigma(B) / sigma(C_m^d)``."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    geometry = geometry or default_geometry()
    geometry._check_depth(m)
    _, g, ps = _setup(start, geometry)
    cols, done = [], steps
    for q in ps:
        lev, got = _forward_levels(g, m, q, steps)
        cols.append(lev)
        done = min(done, got)
    levels = np.stack([c[: done + 1] for c in cols], axis=1)
    counts = _box_counts(levels, half_height(m))
    total = sum(counts.values())
    sigma_c = measure_of_halfcube(p, m)
    D = p.diagonal(max(m, p.n0))
    support = set()
    if m >= p.n0:
        support = {b.levels for b in D.boxes()}
    else:
        hh = half_height(m)
        support = {b for b in np.ndindex(*(hh,) * p.d) if measure_of_box(p, BoxD(m, b))}
    rows = []
    for b in sorted(support | set(counts)):
        s = measure_of_box(p, BoxD(m, b))
        exact = s / sigma_c if sigma_c else Fraction(0)
        emp = counts.get(b, 0) / total if total else 0.0
        rows.append({"levels": list(b), "n_B": counts.get(b, 0), "sigma": s, "exact_ratio": exact,
                     "empirical_ratio": emp, "deviation": abs(emp - float(exact))})
    off_support = sum(counts[b] for b in counts if b not in support)
    return {
        "m": m,
        "steps": done,
        "N": total,
        "rows": rows,
        "max_deviation": max((r["deviation"] for r in rows), default=0.0),
        "truncated": done < steps,
        "degenerate": total <= 1,
        "support_mismatch": off_support > 0,
        "off_support_visits": off_support,
    }


def crossing_counts(p: DiagonalMeasureParams, start: Sequence[Triadic], m: int, n: int,
                    window: int | None = None, geometry: TowerGeometry | None = None) -> dict:
    """Per m-box visit counts along the first and second n-crossings.

    When every ``t_n(x_i)`` is 1 or 2, S is T on the coordinates with
    ``t_n = 1`` and the identity elsewhere; the report checks
    ``n'_{SB} = n_B`` on every m-box B whose image SB is again an m-box.
    """
    if m > n:
        raise ValueError("needs m <= n")
    geometry = geometry or default_geometry()
    window = window if window is not None else 4 * height(n) + 4
    first = first_crossing(start, n, geometry)
    second = second_crossing(start, n, window, geometry)
    if second is None:
        raise WindowError(f"no second {n}-crossing before time {window}")
    _, g, ps = _setup(start, geometry)
    hh = half_height(m)

    def counts(c):
        levels = np.stack([_levels(g, m, q, c.start, c.end) for q in ps], axis=1)
        return _box_counts(levels, hh)

    n_b, n2_b = counts(first), counts(second)
    pattern = []
    for q in ps:
        _, off = g.locate(n, q)
        pattern.append(1 + off // (g.w[n] // 3))
    out = {
        "m": m, "n": n, "first": first, "second": second, "pattern": pattern,
        "n_B": {str(list(k)): v for k, v in sorted(n_b.items())},
        "n_prime_B": {str(list(k)): v for k, v in sorted(n2_b.items())},
        "N": sum(n_b.values()), "N_prime": sum(n2_b.values()),
    }
    if all(t in (1, 2) for t in pattern):
        S = PartialShift.from_g1(len(ps), [i + 1 for i, t in enumerate(pattern) if t == 1])
        rep = Report("counts-shift", details={"shift": S})
        for b in np.ndindex(*(hh,) * len(ps)):
            sb = S.apply_levels(b)
            if max(sb) < hh:
                rep.record(n2_b.get(sb, 0) == n_b.get(b, 0), {"B": list(b), "n_B": n_b.get(b, 0),
                                                              "n_prime_SB": n2_b.get(sb, 0)})
        out["shift_check"] = rep
    else:
        out["shift_check"] = None
    return out


def orbit_support_check(p: DiagonalMeasureParams, start: Sequence[Triadic], j_min: int, j_max: int,
                        depths: Sequence[int], geometry: TowerGeometry | None = None) -> dict:
    """n-crossings of a dissipative witness in a window, and visited boxes against D_n."""
    if classify(p).kind is not Kind.WEIRD_DISSIPATIVE:
        raise PreconditionError("orbit support check applies to weird dissipative measures only")
    geometry = geometry or default_geometry()
    _, g, ps = _setup(start, geometry)
    rows = []
    for n in depths:
        found = crossings_in_window(start, n, j_min, j_max, geometry)
        row = {"n": n, "crossings": len(found), "spans": [[c.start, c.end] for c in found]}
        if n >= p.n0:
            D = p.diagonal(n)
            levels = np.stack([_levels(g, n, q, j_min, j_max) for q in ps], axis=1)
            visited = _box_counts(levels, half_height(n))
            row["visited_boxes"] = len(visited)
            row["off_diagonal"] = sum(1 for b in visited if not D.contains(BoxD(n, b)))
        rows.append(row)
    return {"window": [j_min, j_max], "rows": rows}
