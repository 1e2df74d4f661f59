"""Cutting-and-stacking geometry of the infinite Chacon transformation.

Tower 0 is the single level [0, 1).  Tower n+1 is obtained by cutting tower
n into three subcolumns, putting one spacer above the middle one and
``3 h_n + 1`` spacers above the right one, and stacking left under right.
Spacers are taken from the leftmost unused part of the half-line, so tower
n always occupies exactly [0, L_n) with ``L_n = h_n / 3**n``.

Level layout of tower n+1 (``h = h_n``)::

    0 .. h-1        subcolumn 1 (left thirds of tower-n levels)
    h .. 2h-1       subcolumn 2
    2h              spacer placed at L_n
    2h+1 .. 3h      subcolumn 3
    3h+1 .. 6h+1    spacers placed at L_n + (l - 3h) / 3**(n+1)

The bottom half C_{n+1} (levels < 3h+1) is therefore all of tower n.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from . import kernels
from .errors import DepthError, OutsideTowerError
from .triadic import Triadic, from_scaled

__all__ = [
    "DEFAULT_MAX_DEPTH",
    "LevelAddress",
    "TowerGeometry",
    "default_geometry",
    "half_height",
    "height",
    "parent_level",
    "child_level",
]

DEFAULT_MAX_DEPTH = 12


@lru_cache(maxsize=None)
def height(n: int) -> int:
    """Number of levels h_n of tower n (h_0 = 1, h_{n+1} = 2(3 h_n + 1))."""
    if n < 0:
        raise DepthError(f"negative depth {n}")
    h = 1
    for _ in range(n):
        h = 2 * (3 * h + 1)
    return h


def half_height(n: int) -> int:
    """Number of levels of C_n (0 for n = 0, where C_0 is empty)."""
    return height(n) // 2 if n >= 1 else 0


def child_level(n: int, level: int, subcolumn: int) -> int:
    """Tower-(n+1) level holding the given third of tower-n ``level``."""
    h = height(n)
    if subcolumn == 1:
        return level
    if subcolumn == 2:
        return h + level
    if subcolumn == 3:
        return 2 * h + 1 + level
    raise ValueError(f"subcolumn must be 1, 2 or 3, got {subcolumn}")


def parent_level(n: int, level: int):
    """Inverse of :func:`child_level`: ``(tower-(n-1) level, subcolumn)`` or ``None``.

    ``None`` means the tower-n level is an n-spacer and has no parent.
    """
    h = height(n - 1)
    if level < h:
        return level, 1
    if level < 2 * h:
        return level - h, 2
    if level == 2 * h:
        return None
    if level <= 3 * h:
        return level - 2 * h - 1, 3
    return None


@dataclass(frozen=True)
class LevelAddress:
    depth: int
    level: int
    offset: Triadic

    @property
    def in_C(self) -> bool:
        return self.depth >= 1 and self.level < half_height(self.depth)


class TowerGeometry:
    """Immutable tower data up to ``max_depth``.

    All operations reject depths above ``max_depth`` instead of extending
    the construction lazily.
    """

    def __init__(self, max_depth: int = DEFAULT_MAX_DEPTH, backend: str | None = None):
        if max_depth < 1:
            raise DepthError("max_depth must be at least 1")
        self.max_depth = max_depth
        self.backend = backend
        self.heights = tuple(height(n) for n in range(max_depth + 1))
        self.support_lengths = tuple(Triadic(h, n) for n, h in enumerate(self.heights))
        self._grids = {}

    def __repr__(self):
        return f"TowerGeometry(max_depth={self.max_depth})"

    def _check_depth(self, n: int) -> None:
        if not 0 <= n <= self.max_depth:
            raise DepthError(f"depth {n} outside 0..{self.max_depth}")

    def grid(self, scale: int | None = None):
        """Orbit kernel at scale ``3**scale`` (at least ``max_depth``)."""
        scale = self.max_depth if scale is None else max(scale, self.max_depth)
        g = self._grids.get(scale)
        if g is None:
            g = self._grids[scale] = kernels.make_grid(self.heights, scale, self.backend)
        return g

    def height(self, n: int) -> int:
        self._check_depth(n)
        return self.heights[n]

    def half_height(self, n: int) -> int:
        self._check_depth(n)
        return half_height(n)

    def support_length(self, n: int) -> Triadic:
        self._check_depth(n)
        return self.support_lengths[n]

    def level_interval(self, n: int, level: int) -> tuple[Triadic, Triadic]:
        """Half-open interval ``[left, left + 3**-n)`` of ``level`` in tower n."""
        self._check_depth(n)
        if not 0 <= level < self.heights[n]:
            raise OutsideTowerError(f"level {level} outside tower {n} (height {self.heights[n]})")
        g = self.grid()
        left = g.left(n, level)
        return from_scaled(left, g.scale), from_scaled(left + g.w[n], g.scale)

    def locate(self, n: int, x: Triadic) -> LevelAddress:
        self._check_depth(n)
        g = self.grid(x.exp)
        p = x.scaled(g.scale)
        if p >= g.L[n]:
            raise OutsideTowerError(f"{x} outside tower {n} = [0, {self.support_lengths[n]})")
        level, off = g.locate(n, p)
        return LevelAddress(n, level, from_scaled(off, g.scale))

    def subcolumn(self, n: int, x: Triadic) -> int:
        """t_n(x): which third (1, 2, 3) of its tower-n level ``x`` lies in."""
        self._check_depth(n)
        g = self.grid(max(x.exp, n + 1))
        p = x.scaled(g.scale)
        if p >= g.L[n]:
            raise OutsideTowerError(f"{x} outside tower {n}")
        _, off = g.locate(n, p)
        return 1 + off // (g.w[n] // 3)

    def in_half_tower(self, n: int, x: Triadic) -> bool:
        """Membership of ``x`` in C_n."""
        self._check_depth(n)
        if n == 0:
            return False
        g = self.grid(x.exp)
        p = x.scaled(g.scale)
        if p >= g.L[n]:
            return False
        return g.locate(n, p)[0] < half_height(n)

    def in_half_cube(self, n: int, xs) -> bool:
        """Membership of the tuple ``xs`` in C_n^d."""
        return all(self.in_half_tower(n, x) for x in xs)

    def level_table(self, n: int):
        """Rows ``(level, left, right)`` of tower n."""
        return [(level, *self.level_interval(n, level)) for level in range(self.height(n))]

    def height_table(self, depth: int | None = None):
        depth = self.max_depth if depth is None else depth
        self._check_depth(depth)
        return [(n, self.heights[n], self.support_lengths[n]) for n in range(depth + 1)]


@lru_cache(maxsize=None)
def _default(max_depth: int) -> TowerGeometry:
    return TowerGeometry(max_depth)


def default_geometry() -> TowerGeometry:
    """Shared geometry; ``CHACON_MAX_DEPTH`` overrides the default depth."""
    return _default(int(os.environ.get("CHACON_MAX_DEPTH", DEFAULT_MAX_DEPTH)))
