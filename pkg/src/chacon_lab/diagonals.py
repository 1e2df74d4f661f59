"""n-boxes, n-diagonals, tau-refinement and consistent families.

An n-box is a product of d levels of C_n (levels ``< h_n / 2``).  An
n-diagonal is a maximal run ``B, T B, ..., T^l B`` of n-boxes, stored as the
offset vector ``levels - min(levels)``; its boxes are ``offsets + k`` for
``0 <= k < h_n/2 - max(offsets)``.

Descending a diagonal to depth n-1 is exact and cheap: along the diagonal
each coordinate's parent level is piecewise ``k + const`` with at most three
pieces, so the set of parent diagonals is found from O(3^d) segments
instead of from the (possibly huge) list of boxes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    DepthError,
    InadmissibleTauError,
    InconsistentFamilyError,
    TailExhaustedError,
)
from .tower import TowerGeometry, child_level, default_geometry, half_height, height
from .triadic import Triadic

__all__ = [
    "BoxD",
    "ConsistentFamily",
    "DiagonalD",
    "Segment",
    "admissible_taus",
    "box_chain",
    "box_refine",
    "canonical_tau",
    "descend",
    "diagonal_of_box",
    "diagonal_refine",
    "forbidden_witness",
    "is_admissible",
    "is_central",
    "is_initial",
    "initial_report",
    "parent_diagonals",
    "refine_family",
]


@dataclass(frozen=True, order=True)
class BoxD:
    depth: int
    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(l) for l in self.levels))
        if self.depth < 1:
            raise DepthError("boxes live at depth >= 1")
        hh = half_height(self.depth)
        for l in self.levels:
            if not 0 <= l < hh:
                raise ValueError(f"level {l} is not a level of C_{self.depth} (height {hh})")

    @property
    def d(self) -> int:
        return len(self.levels)

    def intervals(self, geometry: TowerGeometry | None = None) -> tuple:
        geometry = geometry or default_geometry()
        return tuple(geometry.level_interval(self.depth, l) for l in self.levels)

    def left_endpoints(self, geometry: TowerGeometry | None = None) -> tuple:
        return tuple(a for a, _ in self.intervals(geometry))

    def contains_point(self, xs: Sequence[Triadic], geometry: TowerGeometry | None = None) -> bool:
        geometry = geometry or default_geometry()
        for x, l in zip(xs, self.levels):
            if not geometry.in_half_tower(self.depth, x) or geometry.locate(self.depth, x).level != l:
                return False
        return True

    def to_json(self) -> dict:
        return {"depth": self.depth, "levels": list(self.levels)}


@dataclass(frozen=True, order=True)
class DiagonalD:
    depth: int
    offsets: tuple

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(o) for o in self.offsets))
        if self.depth < 1:
            raise DepthError("diagonals live at depth >= 1")
        if not self.offsets:
            raise ValueError("a diagonal needs at least one coordinate")
        if min(self.offsets) != 0:
            raise ValueError(f"offsets must have minimum 0, got {self.offsets}")
        if max(self.offsets) >= half_height(self.depth):
            raise ValueError(f"spread {max(self.offsets)} too large for C_{self.depth}")

    @property
    def d(self) -> int:
        return len(self.offsets)

    @property
    def spread(self) -> int:
        return max(self.offsets)

    @property
    def box_count(self) -> int:
        return half_height(self.depth) - self.spread

    def box(self, k: int) -> BoxD:
        if not 0 <= k < self.box_count:
            raise IndexError(f"position {k} outside 0..{self.box_count - 1}")
        return BoxD(self.depth, tuple(o + k for o in self.offsets))

    def boxes(self) -> Iterator[BoxD]:
        for k in range(self.box_count):
            yield self.box(k)

    def position(self, b: BoxD) -> int | None:
        """Index of ``b`` along the diagonal, or None when ``b`` is not on it."""
        if b.depth != self.depth or b.d != self.d:
            return None
        k = min(b.levels)
        if tuple(l - k for l in b.levels) != self.offsets:
            return None
        return k

    def contains(self, b: BoxD) -> bool:
        return self.position(b) is not None

    def to_json(self) -> dict:
        return {"depth": self.depth, "offsets": list(self.offsets), "box_count": self.box_count}


def diagonal_of_box(b: BoxD) -> tuple[DiagonalD, int]:
    """The diagonal through ``b`` and the position of ``b`` on it."""
    k = min(b.levels)
    return DiagonalD(b.depth, tuple(l - k for l in b.levels)), k


# tau tuples -----------------------------------------------------------------


def is_central(tau: Sequence[int]) -> bool:
    return len(set(tau)) == 1


def is_admissible(tau: Sequence[int]) -> bool:
    if any(t not in (1, 2, 3) for t in tau):
        return False
    return is_central(tau) or {1, 3} <= set(tau)


def canonical_tau(tau: Sequence[int]) -> tuple:
    """Central tuples are represented by (1, ..., 1)."""
    tau = tuple(int(t) for t in tau)
    return (1,) * len(tau) if is_central(tau) else tau


def admissible_taus(d: int) -> list[tuple]:
    """The canonical central tuple followed by every corner tuple, in lexicographic order."""
    if d < 1:
        raise ValueError("d must be at least 1")
    corners = [t for t in itertools.product((1, 2, 3), repeat=d) if {1, 3} <= set(t)]
    return [(1,) * d] + corners


def _check_tau(tau: Sequence[int], d: int) -> tuple:
    tau = tuple(int(t) for t in tau)
    if len(tau) != d:
        raise InadmissibleTauError(f"tau {tau} has length {len(tau)}, expected {d}")
    if not is_admissible(tau):
        raise InadmissibleTauError(f"tau {tau} is neither central nor corner")
    return tau


# refinement ------------------------------------------------------------------


def box_refine(b: BoxD, tau: Sequence[int]) -> BoxD:
    """B(tau): the (n+1)-box of points of ``b`` in subcolumns ``tau``."""
    if len(tau) != b.d:
        raise ValueError("tau length must match the box dimension")
    return BoxD(b.depth + 1, tuple(child_level(b.depth, l, t) for l, t in zip(b.levels, tau)))


def box_chain(b: BoxD, taus: Sequence[Sequence[int]]) -> list[BoxD]:
    """``[b, b(tau_0), b(tau_0)(tau_1), ...]``."""
    out = [b]
    for tau in taus:
        out.append(box_refine(out[-1], tau))
    return out


def diagonal_refine(D: DiagonalD, tau: Sequence[int], allow_forbidden: bool = False) -> DiagonalD:
    """D(tau), the (n+1)-diagonal containing B(tau) for the boxes B of ``D``."""
    if allow_forbidden:
        tau = tuple(int(t) for t in tau)
        if len(tau) != D.d or any(t not in (1, 2, 3) for t in tau):
            raise InadmissibleTauError(f"tau {tau} is not in {{1,2,3}}^{D.d}")
    else:
        tau = _check_tau(tau, D.d)
    return diagonal_of_box(box_refine(D.box(0), tau))[0]


# descent ---------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """Positions ``lo <= k <= hi`` of a diagonal whose boxes have levels ``k + shift_i`` at ``depth``."""

    depth: int
    lo: int
    hi: int
    shift: tuple

    def diagonal(self) -> DiagonalD:
        m = min(self.shift)
        return DiagonalD(self.depth, tuple(s - m for s in self.shift))

    def box(self, k: int) -> BoxD:
        return BoxD(self.depth, tuple(k + s for s in self.shift))


def _parent_pieces(n: int):
    """Level ranges ``[a, b)`` of C_n whose parent lies in C_{n-1}, with the parent offset."""
    if n < 2:
        return []  # C_0 is empty
    hp = height(n - 1)
    half = half_height(n - 1)
    return [(0, half, 0), (hp, hp + half, hp), (2 * hp + 1, 2 * hp + 1 + half, 2 * hp + 1)]


def descend(segments: Sequence[Segment]) -> list[Segment]:
    """Restrict segments to C_{n-1}^d and express them at depth n-1."""
    out = []
    for seg in segments:
        pieces = _parent_pieces(seg.depth)
        for choice in itertools.product(pieces, repeat=len(seg.shift)):
            lo, hi = seg.lo, seg.hi
            shift = []
            for s, (a, b, sub) in zip(seg.shift, choice):
                lo = max(lo, a - s)
                hi = min(hi, b - 1 - s)
                shift.append(s - sub)
            if lo <= hi:
                out.append(Segment(seg.depth - 1, lo, hi, tuple(shift)))
    out.sort(key=lambda s: s.lo)
    return out


def _segments(D: DiagonalD) -> list[Segment]:
    return [Segment(D.depth, 0, D.box_count - 1, D.offsets)]


def parent_diagonals(D: DiagonalD) -> list[DiagonalD]:
    """Distinct (n-1)-diagonals meeting ``D``, in order of first contact along ``D``."""
    seen = []
    for seg in descend(_segments(D)):
        p = seg.diagonal()
        if p not in seen:
            seen.append(p)
    return seen


def meets_half_cube(D: DiagonalD, m: int) -> bool:
    """Does ``D`` meet C_m^d (``1 <= m <= depth``; C_0^d is empty)?"""
    if m > D.depth:
        raise ValueError("m must not exceed the diagonal's depth")
    segs = _segments(D)
    for _ in range(D.depth - m):
        segs = descend(segs)
    return bool(segs) if m >= 1 else False


def initial_report(D: DiagonalD) -> dict:
    """Evidence for :func:`is_initial`: parents, C_{n-2}^d contact, and the verdict."""
    n = D.depth
    if n == 1:
        return {"depth": 1, "initial": True, "rule": "depth 1 (C_0^d is empty)", "flag_low_depth": True}
    parents = parent_diagonals(D)
    meets_lower = meets_half_cube(D, n - 2) if n >= 3 else False
    if len(parents) >= 2:
        verdict, rule = True, "meets at least two (n-1)-diagonals"
    elif len(parents) == 1 and not meets_lower:
        verdict, rule = True, "meets one (n-1)-diagonal and misses C_{n-2}^d"
    else:
        verdict, rule = False, "no clause applies"
    return {
        "depth": n,
        "initial": verdict,
        "rule": rule,
        "parents": [list(p.offsets) for p in parents],
        "meets_C_n_minus_2": meets_lower,
        "flag_low_depth": n <= 2,
    }


def is_initial(D: DiagonalD) -> bool:
    return initial_report(D)["initial"]


def forbidden_witness(D: DiagonalD, tau: Sequence[int]) -> DiagonalD | None:
    """For any tau, an n-diagonal other than ``D`` that D(tau) also meets, if there is one.

    Admissible tuples never produce one; the {1,2} and {2,3} patterns do.
    """
    refined = diagonal_refine(D, tau, allow_forbidden=True)
    for p in parent_diagonals(refined):
        if p != D:
            return p
    return None


# consistent families -------------------------------------------------------

_TAILS = {"central": "AllCentral", "repeat": "RepeatPrefix", "none": "Truncated"}


@dataclass(frozen=True)
class ConsistentFamily:
    """Initial diagonal at depth ``n0`` plus transition tuples and a tail policy.

    ``tail`` is ``"central"`` (the prefix ``taus`` is followed by central
    steps forever), ``"repeat"`` (``taus`` is a block repeated forever) or
    ``"none"`` (only the prefix is known).
    """

    n0: int
    offsets: tuple
    taus: tuple = ()
    tail: str = "central"

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(o) for o in self.offsets))
        if self.tail not in _TAILS:
            raise ValueError(f"tail must be one of {sorted(_TAILS)}, got {self.tail!r}")
        d = len(self.offsets)
        taus = tuple(canonical_tau(_check_tau(t, d)) for t in self.taus)
        object.__setattr__(self, "taus", taus)
        if self.tail == "repeat" and not taus:
            raise ValueError("a repeated tail needs a nonempty block")
        DiagonalD(self.n0, self.offsets)  # validates

    @property
    def d(self) -> int:
        return len(self.offsets)

    @property
    def tail_policy(self) -> str:
        return _TAILS[self.tail]

    @property
    def initial(self) -> DiagonalD:
        return DiagonalD(self.n0, self.offsets)

    @property
    def certifiable(self) -> bool:
        return self.tail != "none"

    def tau(self, n: int) -> tuple:
        """tau_n, the tuple used to go from D_n to D_{n+1}."""
        m = n - self.n0
        if m < 0:
            raise ValueError(f"no transition below n0 = {self.n0}")
        if self.tail == "repeat":
            return self.taus[m % len(self.taus)]
        if m < len(self.taus):
            return self.taus[m]
        if self.tail == "central":
            return (1,) * self.d
        raise TailExhaustedError(f"truncated family has no transition at depth {n}")

    def is_central_step(self, n: int) -> bool:
        return is_central(self.tau(n))

    def condition_tau(self) -> bool | None:
        """Every coordinate takes a value in {1, 2} infinitely often (None: cannot tell)."""
        if self.tail == "central":
            return True
        if self.tail == "none":
            return None
        return all(any(t[i] in (1, 2) for t in self.taus) for i in range(self.d))

    def tail_kinds(self) -> set:
        """Step kinds ('central', 'corner') occurring infinitely often."""
        if self.tail == "central":
            return {"central"}
        if self.tail == "none":
            raise TailExhaustedError("a truncated family has no certified tail")
        return {"central" if is_central(t) else "corner" for t in self.taus}

    def last_corner(self) -> int | None:
        """Depth of the last corner transition before an all-central tail (None if none)."""
        if self.tail != "central":
            raise ValueError("only defined for an all-central tail")
        last = None
        for m, t in enumerate(self.taus):
            if not is_central(t):
                last = self.n0 + m
        return last

    def to_json(self) -> dict:
        return {"n0": self.n0, "offsets": list(self.offsets), "taus": [list(t) for t in self.taus], "tail": self.tail}

    @classmethod
    def from_json(cls, obj: dict) -> "ConsistentFamily":
        return cls(int(obj["n0"]), tuple(obj["offsets"]), tuple(tuple(t) for t in obj.get("taus", [])),
                   obj.get("tail", "central"))


def refine_family(f: ConsistentFamily, up_to: int, geometry: TowerGeometry | None = None,
                  verify: bool = True) -> list[DiagonalD]:
    """D_{n0}, ..., D_{up_to}; with ``verify``, checks D_{n+1} inside C_n^d lies in D_n."""
    max_depth = (geometry or default_geometry()).max_depth
    if up_to > max_depth:
        raise DepthError(f"up_to = {up_to} exceeds max_depth {max_depth}")
    if up_to < f.n0:
        raise ValueError(f"up_to must be at least n0 = {f.n0}")
    out = [f.initial]
    for n in range(f.n0, up_to):
        nxt = diagonal_refine(out[-1], f.tau(n))
        if verify:
            stray = [p for p in parent_diagonals(nxt) if p != out[-1]]
            if stray:
                raise InconsistentFamilyError(
                    f"D_{n + 1} meets C_{n}^d outside D_{n}: also meets {stray[0].offsets}")
        out.append(nxt)
    return out
