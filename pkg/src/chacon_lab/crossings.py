"""n-crossings of d-tuples and executable checks of the crossing lemmas.

An n-crossing for ``x`` is a maximal run of consecutive integers ``j`` with
``(T^{xd})^j x`` in C_n^d.  Orbits are followed with the integer kernel of
:mod:`chacon_lab.tower`; a coordinate whose backward orbit has reached 0
is undefined before that time and counts as outside every C_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DepthError, NoPreimageError, PreconditionError, WindowError
from .report import Report
from .tower import TowerGeometry, default_geometry, half_height, height
from .triadic import Triadic, from_scaled

__all__ = [
    "Crossing",
    "PartialShift",
    "SpecialDepth",
    "crossing_at",
    "crossings_in_window",
    "first_crossing",
    "find_special_depths",
    "half_cube_mask",
    "min_enclosing_depth",
    "second_crossing",
    "verify_bto_sb",
    "verify_first_crossing_nesting",
    "verify_long_crossing",
    "verify_separation",
    "verify_tn",
]

_CHUNK = 4096


@dataclass(frozen=True, order=True)
class Crossing:
    """Inclusive run ``start..end`` of orbit times spent in C_n^d."""

    depth: int
    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start + 1

    def __contains__(self, j: int) -> bool:
        return self.start <= j <= self.end

    def contains(self, other: "Crossing") -> bool:
        return self.start <= other.start and other.end <= self.end

    def to_json(self) -> dict:
        return {"depth": self.depth, "start": self.start, "end": self.end, "length": len(self)}


@dataclass(frozen=True)
class PartialShift:
    """S acting as T on the coordinates in ``G1`` and as the identity on ``G2``.

    Coordinates are numbered from 1.
    """

    G1: frozenset
    G2: frozenset

    def __post_init__(self):
        object.__setattr__(self, "G1", frozenset(self.G1))
        object.__setattr__(self, "G2", frozenset(self.G2))
        if self.G1 & self.G2:
            raise ValueError("G1 and G2 must be disjoint")
        if self.G1 | self.G2 != set(range(1, self.d + 1)):
            raise ValueError("G1 and G2 must partition {1, ..., d}")

    @property
    def d(self) -> int:
        return len(self.G1) + len(self.G2)

    @classmethod
    def from_g1(cls, d: int, g1: Iterable[int]) -> "PartialShift":
        g1 = frozenset(g1)
        return cls(g1, frozenset(range(1, d + 1)) - g1)

    @classmethod
    def all(cls, d: int) -> list["PartialShift"]:
        """All 2^d ordered partitions, including the ones with an empty side."""
        out = []
        for mask in range(2**d):
            out.append(cls.from_g1(d, (i + 1 for i in range(d) if mask >> i & 1)))
        return out

    def moves(self, i: int) -> bool:
        """True when 0-based coordinate ``i`` is shifted by T."""
        return i + 1 in self.G1

    def apply_levels(self, levels: Sequence[int]) -> tuple:
        return tuple(l + self.moves(i) for i, l in enumerate(levels))

    def __call__(self, xs: Sequence[Triadic], geometry: TowerGeometry | None = None) -> tuple:
        from .transform import apply

        return tuple(apply(x, geometry) if self.moves(i) else x for i, x in enumerate(xs))

    def to_json(self) -> dict:
        return {"G1": sorted(self.G1), "G2": sorted(self.G2)}


# orbit scanning -------------------------------------------------------------


def _setup(xs: Sequence[Triadic], geometry: TowerGeometry | None, min_scale: int = 0):
    geometry = geometry or default_geometry()
    g = geometry.grid(max([min_scale] + [x.exp for x in xs]))
    return geometry, g, [x.scaled(g.scale) for x in xs]


def _levels(g, n: int, p: int, j_min: int, j_max: int) -> np.ndarray:
    """Tower-n levels of ``T^j p`` for ``j_min <= j <= j_max`` (-1 outside or undefined)."""
    out = np.full(j_max - j_min + 1, -1, dtype=np.int64)
    if j_min < 0:
        back = g.orbit_levels(n, p, j_min)[1:]  # j = -1, -2, ...
        for k, lev in enumerate(back):
            j = -1 - k
            if j <= j_max:
                out[j - j_min] = lev
    if j_max >= 0:
        lo = max(j_min, 0)
        start = g.iterate(p, lo) if lo else p
        out[lo - j_min:] = g.orbit_levels(n, start, j_max - lo)
    return out


def _mask(g, n: int, ps: Sequence[int], j_min: int, j_max: int) -> np.ndarray:
    hh = half_height(n)
    mask = np.ones(j_max - j_min + 1, dtype=bool)
    for p in ps:
        lev = _levels(g, n, p, j_min, j_max)
        mask &= (lev >= 0) & (lev < hh)
    return mask


def half_cube_mask(xs: Sequence[Triadic], n: int, j_min: int, j_max: int,
                   geometry: TowerGeometry | None = None) -> np.ndarray:
    """Boolean array over ``j_min..j_max``: is ``(T^{xd})^j xs`` in C_n^d?"""
    if j_max < j_min:
        raise ValueError("empty window")
    geometry, g, ps = _setup(xs, geometry)
    geometry._check_depth(n)
    return _mask(g, n, ps, j_min, j_max)


def _run_length(g, n: int, ps: list, direction: int, limit: int) -> int:
    """Number of steps ``k = 1, 2, ...`` (at most ``limit``) for which T^{direction*k} stays in C_n^d."""
    hh = half_height(n)
    done = 0
    ps = list(ps)
    while done < limit:
        c = min(_CHUNK, limit - done)
        ok = np.ones(c, dtype=bool)
        for p in ps:
            lev = g.orbit_levels(n, p, direction * c)[1:]
            lev = np.asarray(lev + [-1] * (c - len(lev)), dtype=np.int64)
            ok &= (lev >= 0) & (lev < hh)
        bad = np.flatnonzero(~ok)
        if bad.size:
            return done + int(bad[0])
        ps = [g.iterate(p, direction * c) for p in ps]
        done += c
    return done


def min_enclosing_depth(xs: Sequence[Triadic], geometry: TowerGeometry | None = None) -> int:
    """Smallest ``n >= 1`` with every coordinate of ``xs`` in C_n."""
    geometry = geometry or default_geometry()
    for n in range(1, geometry.max_depth + 1):
        if geometry.in_half_cube(n, xs):
            return n
    raise DepthError(f"{[str(x) for x in xs]} is not in C_{geometry.max_depth}^d")


def crossing_at(xs: Sequence[Triadic], n: int, j0: int = 0,
                geometry: TowerGeometry | None = None) -> Crossing:
    """The maximal n-crossing containing time ``j0``.

    The scan stops one step past the length bound ``h_n / 2``; reaching it
    means the bound is violated and raises ``AssertionError``.
    """
    geometry, g, ps = _setup(xs, geometry)
    geometry._check_depth(n)
    try:
        qs = [g.iterate(p, j0) for p in ps]
    except NoPreimageError:
        raise PreconditionError(f"orbit is undefined at time {j0}") from None
    hh = half_height(n)
    if not all(0 <= g.level_of(n, q) < hh for q in qs):
        raise PreconditionError(f"time {j0} is not in C_{n}^d")
    up = _run_length(g, n, qs, 1, hh)
    down = _run_length(g, n, qs, -1, hh)
    c = Crossing(n, j0 - down, j0 + up)
    if len(c) > hh:
        raise AssertionError(f"{n}-crossing longer than h_n/2 = {hh}: {c}")
    return c


def first_crossing(xs: Sequence[Triadic], n: int, geometry: TowerGeometry | None = None) -> Crossing:
    return crossing_at(xs, n, 0, geometry)


def crossings_in_window(xs: Sequence[Triadic], n: int, j_min: int, j_max: int,
                        geometry: TowerGeometry | None = None) -> list[Crossing]:
    """All maximal n-crossings meeting ``j_min..j_max``, in order."""
    geometry = geometry or default_geometry()
    mask = half_cube_mask(xs, n, j_min, j_max, geometry)
    if not mask.any():
        return []
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1) + j_min
    ends = np.flatnonzero(edges == -1) - 1 + j_min
    out = []
    for s, e in zip(starts.tolist(), ends.tolist()):
        if s == j_min or e == j_max:
            out.append(crossing_at(xs, n, s, geometry))
        else:
            out.append(Crossing(n, s, e))
    return out


def second_crossing(xs: Sequence[Triadic], n: int, j_max: int,
                    geometry: TowerGeometry | None = None) -> Crossing | None:
    """The next n-crossing after the first one, searched up to time ``j_max``."""
    first = first_crossing(xs, n, geometry)
    if first.end + 1 > j_max:
        return None
    found = crossings_in_window(xs, n, first.end + 1, j_max, geometry)
    return found[0] if found else None


# verifiers ------------------------------------------------------------------


def verify_separation(xs: Sequence[Triadic], n: int, j_min: int, j_max: int,
                      geometry: TowerGeometry | None = None) -> Report:
    """Length bound and gap bound for all n-crossings meeting the window."""
    hh = half_height(n)
    rep = Report("separation", details={"depth": n, "window": [j_min, j_max], "bound": hh})
    crossings = crossings_in_window(xs, n, j_min, j_max, geometry)
    for c in crossings:
        rep.record(len(c) <= hh, {"kind": "length", "crossing": c})
    for a, b in zip(crossings, crossings[1:]):
        gap = b.start - a.end - 1
        rep.record(gap >= hh, {"kind": "gap", "after": a, "before": b, "gap": gap})
    rep.details["crossings"] = len(crossings)
    return rep


def verify_long_crossing(xs: Sequence[Triadic], n: int, j_min: int, j_max: int,
                         geometry: TowerGeometry | None = None) -> Report:
    """Times in C_{n-1}^d are followed by ``h_{n-1}/2`` more times inside the same n-crossing."""
    if n < 2:
        raise PreconditionError("needs n >= 2")
    geometry, g, ps = _setup(xs, geometry)
    geometry._check_depth(n)
    reach = half_height(n - 1)
    inner = _mask(g, n - 1, ps, j_min, j_max)
    outer = _mask(g, n, ps, j_min, j_max + reach)
    # runs[k] = number of consecutive True in outer starting at k
    csum = np.concatenate(([0], np.cumsum(outer)))
    rep = Report("long-crossing", details={"depth": n, "window": [j_min, j_max], "reach": reach})
    idx = np.flatnonzero(inner)
    full = csum[idx + reach + 1] - csum[idx] == reach + 1
    rep.checked = int(idx.size)
    for k in idx[~full][:20]:
        rep.witnesses.append({"j": int(k) + j_min})
    rep.failed = int((~full).sum())
    return rep


def verify_first_crossing_nesting(xs: Sequence[Triadic], n_max: int,
                                  geometry: TowerGeometry | None = None) -> Report:
    """The first n-crossing is contained in the first (n+1)-crossing."""
    geometry = geometry or default_geometry()
    n0 = min_enclosing_depth(xs, geometry)
    rep = Report("first-crossing-nesting", details={"from": n0, "to": n_max})
    prev = None
    for n in range(n0, n_max + 1):
        c = first_crossing(xs, n, geometry)
        if prev is not None:
            rep.record(c.contains(prev), {"inner": prev, "outer": c})
        prev = c
    return rep


def _subcolumn_scaled(g, n: int, q: int) -> int:
    _, off = g.locate(n, q)
    return 1 + off // (g.w[n] // 3)


@dataclass(frozen=True)
class SpecialDepth:
    n: int
    second: Crossing
    pattern: tuple
    pattern_ok: bool
    increment_ok: bool
    contains_return: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "second_crossing": self.second.to_json(),
            "pattern": list(self.pattern),
            "pattern_in_12": self.pattern_ok,
            "increment_verified": self.increment_ok,
            "return_time_in_second": self.contains_return,
        }


def find_special_depths(xs: Sequence[Triadic], n_max: int, window: int | None = None,
                        geometry: TowerGeometry | None = None) -> list[SpecialDepth]:
    """Depths ``n(x) < n <= n_max`` whose first (n+1)-crossing contains the second n-crossing.

    Each hit records the subcolumn pattern ``t_n(x_i)`` and whether the
    pattern lies in {1, 2} and shifts by +1 along the second crossing.
    ``window`` caps the forward times scanned; exceeding it raises WindowError.
    """
    geometry = geometry or default_geometry()
    if n_max + 1 > geometry.max_depth:
        raise DepthError(f"n_max + 1 = {n_max + 1} exceeds max_depth {geometry.max_depth}")
    geometry, g, ps = _setup(xs, geometry, min_scale=n_max + 2)
    out = []
    for n in range(min_enclosing_depth(xs, geometry) + 1, n_max + 1):
        big = first_crossing(xs, n + 1, geometry)
        if window is not None and big.end > window:
            raise WindowError(f"first {n + 1}-crossing ends at {big.end}, beyond window {window}")
        first = first_crossing(xs, n, geometry)
        if first.end >= big.end:
            continue
        found = crossings_in_window(xs, n, first.end + 1, big.end, geometry)
        if not found:
            continue
        second = found[0]
        pattern = tuple(_subcolumn_scaled(g, n, p) for p in ps)
        pattern_ok = all(t in (1, 2) for t in pattern)
        inc_ok = True
        for i, p in enumerate(ps):
            q = g.iterate(p, second.start)
            for j in range(second.start, second.end + 1):
                if _subcolumn_scaled(g, n, q) != pattern[i] + 1:
                    inc_ok = False
                    break
                if j < second.end:
                    q = g.step(q)
        out.append(SpecialDepth(n, second, pattern, pattern_ok, inc_ok, height(n) + 1 in second))
    return out


# shifted boxes --------------------------------------------------------------


def _subcolumn_samples(g, n: int, t: int, resolution: int, centres: bool) -> tuple[np.ndarray, list]:
    """Scaled sample points in subcolumn ``t`` of every C_n level, with their levels."""
    step = 3 ** (g.scale - resolution)
    per = 3 ** (resolution - n - 1)
    offsets = [(t - 1) * g.w[n + 1] + k * step for k in range(per)]
    if centres:
        offsets += [o + step // 3 for o in offsets]
    levels, points = [], []
    for level in range(half_height(n)):
        base = g.left(n, level)
        for o in offsets:
            levels.append(level)
            points.append(base + o)
    return np.asarray(levels, dtype=np.int64), points


def _shifted_levels(g, n: int, points: list, k: int) -> np.ndarray:
    out = np.empty(len(points), dtype=np.int64)
    for idx, p in enumerate(points):
        try:
            out[idx] = g.level_of(n, g.iterate(p, k))
        except NoPreimageError:
            out[idx] = -1
    return out


def _outer_all(arrays: list[np.ndarray]) -> np.ndarray:
    """Boolean outer AND of 1-d arrays (shape = tuple of lengths)."""
    res = np.ones((), dtype=bool)
    for a in arrays:
        res = np.logical_and.outer(res, a)
    return res


def _set_equality_failures(left: list[np.ndarray], right: list[np.ndarray]):
    """Failures of ``{box from left} == {box from right}`` over the product of samples.

    ``left[i]`` / ``right[i]`` hold, per sample of coordinate i, the level the
    box must have on that coordinate, or -1 when no box qualifies.  A set is
    empty as soon as one coordinate is -1.  Returns (failure count, one
    failing index tuple or None).
    """
    eq = [l == r for l, r in zip(left, right)]
    lne = [l >= 0 for l in left]
    rne = [r >= 0 for r in right]
    rest_eq, rest_l, rest_r = _outer_all(eq[1:]), _outer_all(lne[1:]), _outer_all(rne[1:])
    failures, example = 0, None
    cats = np.stack([eq[0], lne[0], rne[0]], axis=1)
    for cat in np.unique(cats, axis=0):
        e0, l0, r0 = (bool(c) for c in cat)
        L = rest_l & l0
        R = rest_r & r0
        ok = (~L & ~R) | (L & R & (rest_eq & e0))
        bad = int(ok.size - np.count_nonzero(ok))
        if bad:
            count0 = int(np.all(cats == cat, axis=1).sum())
            failures += bad * count0
            if example is None:
                k0 = int(np.flatnonzero(np.all(cats == cat, axis=1))[0])
                rest = np.argwhere(~ok)[0].tolist() if ok.ndim else []
                example = tuple([k0] + rest)
    return failures, example


def verify_bto_sb(n: int, shift: PartialShift, resolution: int | None = None,
                  centres: bool = False, geometry: TowerGeometry | None = None) -> Report:
    """Check ``x in B <=> (T^{xd})^{h_n+1} x in SB`` and its backward twin on a sample grid.

    Forward: coordinates in G1 are sampled in subcolumn 1, those in G2 in
    subcolumn 2.  Backward: subcolumns 2 and 3, checking
    ``x in SB <=> (T^{xd})^{-h_n-1} x in B``.  Samples are the points
    ``j * 3**-resolution`` of the required subcolumn of every C_n level
    (plus the centre of each sample cell when ``centres`` is set); every
    n-box is covered by comparing the two sets of boxes satisfying each side.
    """
    geometry = geometry or default_geometry()
    if n < 1 or n + 1 > geometry.max_depth:
        raise DepthError(f"need 1 <= n and n + 1 <= max_depth, got n = {n}")
    resolution = n + 3 if resolution is None else resolution
    if resolution < n + 1:
        raise ValueError("resolution must be at least n + 1")
    g = geometry.grid(resolution + 1 if centres else resolution)
    d, h, hh = shift.d, height(n), half_height(n)
    rep = Report("lemma22", details={
        "n": n, "shift": shift.to_json(), "resolution": resolution,
        "boxes": hh**d, "samples": {}, "failed_by_variant": {},
    })
    for variant, (t1, t2, k) in {"forward": (1, 2, h + 1), "backward": (2, 3, -(h + 1))}.items():
        left, right, sizes = [], [], []
        cache = {}
        for i in range(d):
            moves = shift.moves(i)
            t = t1 if moves else t2
            if (t, moves) not in cache:
                lx, pts = _subcolumn_samples(g, n, t, resolution, centres)
                ly = _shifted_levels(g, n, pts, k)
                if variant == "forward":
                    # box B with y in SB: undo S on the level of y
                    b = ly - moves
                    b[(ly < 0) | (b < 0) | (b >= hh)] = -1
                    cache[(t, moves)] = (lx, b)
                else:
                    # box B with x in SB, and box B containing z
                    a = lx - moves
                    a[a < 0] = -1
                    b = ly.copy()
                    b[(b < 0) | (b >= hh)] = -1
                    cache[(t, moves)] = (a, b)
            a, b = cache[(t, moves)]
            left.append(a)
            right.append(b)
            sizes.append(len(a))
        total = int(np.prod(sizes))
        failures, example = _set_equality_failures(left, right)
        rep.checked += total
        rep.details["samples"][variant] = total
        rep.details["failed_by_variant"][variant] = failures
        if failures:
            rep.fail({"variant": variant, "sample_index": list(example)}, failures)
    return rep


def verify_tn(n: int, ell: int, d: int = 2, resolution: int | None = None,
              geometry: TowerGeometry | None = None) -> Report:
    """Check ``(T^{xd})^{h_l+1} x in C_n^d`` for ``x`` in C_{n-1}^d with every ``t_l(x_i)`` in {1, 2}.

    Both the hypothesis and the conclusion are products over coordinates, so
    the check runs per coordinate on the grid ``j * 3**-resolution`` of
    C_{n-1} and the d-tuple counts follow exactly from those.
    """
    geometry = geometry or default_geometry()
    if n < 2 or ell < n:
        raise PreconditionError("needs n >= 2 and l >= n")
    if ell + 1 > geometry.max_depth:
        raise DepthError(f"l + 1 = {ell + 1} exceeds max_depth {geometry.max_depth}")
    resolution = ell + 2 if resolution is None else resolution
    if resolution < ell + 1:
        raise ValueError("resolution must be at least l + 1")
    g = geometry.grid(resolution)
    step = 3 ** (g.scale - resolution)
    bound = g.L[n - 2]  # C_{n-1} is all of tower n-2
    hh, k = half_height(n), height(ell) + 1
    ok = bad = 0
    rep = Report("lemma23", details={"n": n, "l": ell, "d": d, "resolution": resolution})
    for p in range(0, bound, step):
        if _subcolumn_scaled(g, ell, p) == 3:
            continue
        lev = g.level_of(n, g.iterate(p, k))
        if 0 <= lev < hh:
            ok += 1
        else:
            bad += 1
            if len(rep.witnesses) < 20:
                rep.witnesses.append({"coordinate": str(from_scaled(p, g.scale)), "level_after": lev})
    total = ok + bad
    rep.checked = total**d
    rep.failed = total**d - ok**d
    rep.details["coordinate_samples"] = total
    return rep

