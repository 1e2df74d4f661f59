"""Exact action of T, T^{-1}, T^k and the Cartesian power T^{xd}.

T sends a point to the point directly above it in the first tower where it
is not on the top level.  Nothing is tabulated: each step is O(depth)
address arithmetic in the orbit kernel, at the scale ``3**max(max_depth,
exponent)`` so that every point involved is an integer.
"""
from __future__ import annotations

from typing import Iterator, Sequence

from .errors import NoPreimageError
from .tower import TowerGeometry, default_geometry
from .triadic import Triadic, from_scaled

__all__ = [
    "apply",
    "apply_inverse",
    "iterate",
    "orbit",
    "product_apply",
    "scaled_orbit",
]


def _setup(x: Triadic, geometry: TowerGeometry | None):
    geometry = geometry or default_geometry()
    g = geometry.grid(x.exp)
    return g, x.scaled(g.scale)


def apply(x: Triadic, geometry: TowerGeometry | None = None) -> Triadic:
    """T(x).  Raises DepthExhaustedError on the top level of the deepest tower."""
    g, p = _setup(x, geometry)
    return from_scaled(g.step(p), g.scale)


def apply_inverse(x: Triadic, geometry: TowerGeometry | None = None) -> Triadic:
    """T^{-1}(x).  Raises NoPreimageError for x = 0."""
    g, p = _setup(x, geometry)
    return from_scaled(g.step_back(p), g.scale)


def iterate(x: Triadic, k: int, geometry: TowerGeometry | None = None) -> Triadic:
    g, p = _setup(x, geometry)
    return from_scaled(g.iterate(p, k), g.scale)


def product_apply(xs: Sequence[Triadic], k: int, geometry: TowerGeometry | None = None) -> tuple:
    """(T^{xd})^k applied coordinate-wise."""
    return tuple(iterate(x, k, geometry) for x in xs)


def orbit(x: Triadic, geometry: TowerGeometry | None = None, inverse: bool = False) -> Iterator[Triadic]:
    """Lazy orbit ``x, Tx, T^2 x, ...`` (or the backward orbit).

    The generator may be abandoned between steps.  A backward orbit ends at 0.
    """
    g, p = _setup(x, geometry)
    step = g.step_back if inverse else g.step
    while True:
        yield from_scaled(p, g.scale)
        try:
            p = step(p)
        except NoPreimageError:
            return


def scaled_orbit(xs: Sequence[Triadic], j_min: int, j_max: int, geometry: TowerGeometry | None = None):
    """Scaled coordinates of ``(T^{xd})^j xs`` for ``j_min <= j <= j_max``.

    Returns ``(grid, rows)`` where ``rows[i][j - j_min]`` is the scaled i-th
    coordinate, or ``None`` where the backward orbit does not exist.  The
    window must contain 0.
    """
    if not j_min <= 0 <= j_max:
        raise ValueError("window must contain 0")
    geometry = geometry or default_geometry()
    g = geometry.grid(max(x.exp for x in xs))
    rows = []
    for x in xs:
        p = x.scaled(g.scale)
        back = g.orbit(p, j_min)[1:] if j_min < 0 else []
        fwd = g.orbit(p, j_max)
        missing = -j_min - len(back)
        rows.append([None] * missing + back[::-1] + fwd)
    return g, rows
