"""Pure-Python orbit kernel.

Points are integers ``p`` standing for ``p / 3**scale``.  At that scale a
level of tower ``k`` has integer width ``w[k] = 3**(scale - k)`` and tower
``k`` occupies ``[0, L[k])`` with ``L[k] = h[k] * w[k]``.  The compiled
kernel in ``_ckernel.pyx`` implements the same class on int64.
"""
from __future__ import annotations

from .errors import DepthExhaustedError, NoPreimageError, OutsideTowerError

BACKEND = "python"


class Grid:
    """Tower addressing and orbit stepping at a fixed scale ``3**scale``."""

    def __init__(self, heights, scale):
        depth = len(heights) - 1
        if scale < depth:
            raise ValueError("scale must be at least the tower depth")
        self.depth = depth
        self.scale = scale
        self.h = [int(x) for x in heights]
        self.w = [3 ** (scale - k) for k in range(depth + 1)]
        self.L = [h * w for h, w in zip(self.h, self.w)]

    def left(self, n, level):
        """Scaled left endpoint of ``level`` in tower ``n``."""
        h, w, L = self.h, self.w, self.L
        if not 0 <= level < h[n]:
            raise OutsideTowerError(f"level {level} outside tower {n}")
        acc = 0
        while n > 0:
            hp = h[n - 1]
            if level < hp:
                pass
            elif level < 2 * hp:
                level -= hp
                acc += w[n]
            elif level == 2 * hp:
                return acc + L[n - 1]
            elif level <= 3 * hp:
                level -= 2 * hp + 1
                acc += 2 * w[n]
            else:
                return acc + L[n - 1] + (level - 3 * hp) * w[n]
            n -= 1
        return acc

    def _entry(self, p):
        # smallest tower containing p, with its level and offset there
        L = self.L
        if p < 0:
            raise OutsideTowerError(f"negative point {p}")
        m = 0
        while p >= L[m]:
            m += 1
            if m > self.depth:
                raise OutsideTowerError(f"point {p}/3^{self.scale} outside tower {self.depth}")
        if m == 0:
            return 0, 0, p
        hp = self.h[m - 1]
        s = (p - L[m - 1]) // self.w[m]
        level = 2 * hp if s == 0 else 3 * hp + s
        return m, level, p - L[m - 1] - s * self.w[m]

    def locate(self, n, p):
        """Return ``(level, offset)`` of ``p`` in tower ``n``."""
        if p >= self.L[n]:
            raise OutsideTowerError(f"point {p}/3^{self.scale} outside tower {n}")
        m, level, off = self._entry(p)
        h, w = self.h, self.w
        for k in range(m, n):
            c = off // w[k + 1]
            level += c * h[k] + (c == 2)
            off -= c * w[k + 1]
        return level, off

    def level_of(self, n, p):
        """Level of ``p`` in tower ``n``, or -1 when ``p`` is outside it."""
        if p >= self.L[n]:
            return -1
        return self.locate(n, p)[0]

    def step(self, p):
        """Apply T once."""
        k, level, off = self._entry(p)
        h, w = self.h, self.w
        while level == h[k] - 1:
            if k == self.depth:
                raise DepthExhaustedError(f"T needs a tower deeper than {self.depth}")
            c = off // w[k + 1]
            level += c * h[k] + (c == 2)
            off -= c * w[k + 1]
            k += 1
        return self.left(k, level + 1) + off

    def step_back(self, p):
        """Apply T^{-1} once."""
        if p == 0:
            raise NoPreimageError("0 is not in the image of T")
        k, level, off = self._entry(p)
        h, w = self.h, self.w
        while level == 0:
            if k == self.depth:
                raise DepthExhaustedError(f"T^-1 needs a tower deeper than {self.depth}")
            c = off // w[k + 1]
            level += c * h[k] + (c == 2)
            off -= c * w[k + 1]
            k += 1
        return self.left(k, level - 1) + off

    def iterate(self, p, k):
        if k >= 0:
            for _ in range(k):
                p = self.step(p)
        else:
            for _ in range(-k):
                p = self.step_back(p)
        return p

    def orbit(self, p, steps):
        """Points ``T^j p`` for ``j = 0..steps`` (or ``0..steps`` backward when negative).

        A backward orbit stops early at 0, which has no preimage.
        """
        out = [p]
        if steps >= 0:
            for _ in range(steps):
                p = self.step(p)
                out.append(p)
        else:
            for _ in range(-steps):
                if p == 0:
                    break
                p = self.step_back(p)
                out.append(p)
        return out

    def orbit_levels(self, n, p, steps):
        """Tower-``n`` levels (-1 outside) along the forward or backward orbit of ``p``."""
        return [self.level_of(n, q) for q in self.orbit(p, steps)]
