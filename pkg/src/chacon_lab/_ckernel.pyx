# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernel (int64), mirroring ``_pykernel.Grid``.

Only valid while the scaled support ``L[depth]`` fits in a signed 64-bit
integer; ``kernels.make_grid`` checks that before choosing this backend.
"""
from .errors import DepthExhaustedError, NoPreimageError, OutsideTowerError

BACKEND = "cython"

cdef enum:
    MAXD = 40


cdef class Grid:
    cdef public int depth
    cdef public int scale
    cdef long long hh[MAXD + 1]
    cdef long long ww[MAXD + 1]
    cdef long long LL[MAXD + 1]

    def __init__(self, heights, scale):
        cdef int k
        depth = len(heights) - 1
        if depth > MAXD:
            raise ValueError("compiled kernel supports depth <= 40")
        if scale < depth:
            raise ValueError("scale must be at least the tower depth")
        self.depth = depth
        self.scale = scale
        widths = [3 ** (int(scale) - j) for j in range(depth + 1)]
        for k in range(depth + 1):
            self.hh[k] = heights[k]
            self.ww[k] = widths[k]
            self.LL[k] = self.hh[k] * self.ww[k]

    @property
    def h(self):
        return [self.hh[k] for k in range(self.depth + 1)]

    @property
    def w(self):
        return [self.ww[k] for k in range(self.depth + 1)]

    @property
    def L(self):
        return [self.LL[k] for k in range(self.depth + 1)]

    cdef long long _left(self, int n, long long level) noexcept nogil:
        cdef long long acc = 0, hp
        while n > 0:
            hp = self.hh[n - 1]
            if level < hp:
                pass
            elif level < 2 * hp:
                level -= hp
                acc += self.ww[n]
            elif level == 2 * hp:
                return acc + self.LL[n - 1]
            elif level <= 3 * hp:
                level -= 2 * hp + 1
                acc += 2 * self.ww[n]
            else:
                return acc + self.LL[n - 1] + (level - 3 * hp) * self.ww[n]
            n -= 1
        return acc

    cdef int _entry(self, long long p, long long *level, long long *off) noexcept nogil:
        # returns the smallest tower index containing p, or -1
        cdef int m = 0
        cdef long long hp, s
        if p < 0:
            return -1
        while p >= self.LL[m]:
            m += 1
            if m > self.depth:
                return -1
        if m == 0:
            level[0] = 0
            off[0] = p
            return 0
        hp = self.hh[m - 1]
        s = (p - self.LL[m - 1]) // self.ww[m]
        level[0] = 2 * hp if s == 0 else 3 * hp + s
        off[0] = p - self.LL[m - 1] - s * self.ww[m]
        return m

    cdef inline void _ascend(self, int k, long long *level, long long *off) noexcept nogil:
        cdef long long c = off[0] // self.ww[k + 1]
        level[0] += c * self.hh[k] + (1 if c == 2 else 0)
        off[0] -= c * self.ww[k + 1]

    cdef long long _step(self, long long p) noexcept nogil:
        # -1: outside, -2: depth exhausted
        cdef long long level, off
        cdef int k = self._entry(p, &level, &off)
        if k < 0:
            return -1
        while level == self.hh[k] - 1:
            if k == self.depth:
                return -2
            self._ascend(k, &level, &off)
            k += 1
        return self._left(k, level + 1) + off

    cdef long long _step_back(self, long long p) noexcept nogil:
        # -1: outside, -2: depth exhausted, -3: no preimage
        cdef long long level, off
        cdef int k
        if p == 0:
            return -3
        k = self._entry(p, &level, &off)
        if k < 0:
            return -1
        while level == 0:
            if k == self.depth:
                return -2
            self._ascend(k, &level, &off)
            k += 1
        return self._left(k, level - 1) + off

    cdef long long _level_of(self, int n, long long p) noexcept nogil:
        cdef long long level, off
        cdef int k
        if p < 0 or p >= self.LL[n]:
            return -1
        k = self._entry(p, &level, &off)
        while k < n:
            self._ascend(k, &level, &off)
            k += 1
        return level

    cdef _raise(self, long long code):
        if code == -1:
            raise OutsideTowerError(f"point outside tower {self.depth}")
        if code == -2:
            raise DepthExhaustedError(f"orbit needs a tower deeper than {self.depth}")
        raise NoPreimageError("0 is not in the image of T")

    def left(self, int n, long long level):
        if level < 0 or level >= self.hh[n]:
            raise OutsideTowerError(f"level {level} outside tower {n}")
        return self._left(n, level)

    def locate(self, int n, long long p):
        cdef long long level, off
        cdef int k
        if p < 0 or p >= self.LL[n]:
            raise OutsideTowerError(f"point {p}/3^{self.scale} outside tower {n}")
        k = self._entry(p, &level, &off)
        while k < n:
            self._ascend(k, &level, &off)
            k += 1
        return level, off

    def level_of(self, int n, long long p):
        return self._level_of(n, p)

    def step(self, long long p):
        cdef long long q = self._step(p)
        if q < 0:
            self._raise(q)
        return q

    def step_back(self, long long p):
        cdef long long q = self._step_back(p)
        if q < 0:
            self._raise(q)
        return q

    def iterate(self, long long p, long long k):
        cdef long long i, q = p
        if k >= 0:
            for i in range(k):
                q = self._step(q)
                if q < 0:
                    self._raise(q)
        else:
            for i in range(-k):
                q = self._step_back(q)
                if q < 0:
                    self._raise(q)
        return q

    def orbit(self, long long p, long long steps):
        cdef long long i, q = p
        out = [p]
        if steps >= 0:
            for i in range(steps):
                q = self._step(q)
                if q < 0:
                    self._raise(q)
                out.append(q)
        else:
            for i in range(-steps):
                if q == 0:
                    break
                q = self._step_back(q)
                if q < 0:
                    self._raise(q)
                out.append(q)
        return out

    def orbit_levels(self, int n, long long p, long long steps):
        cdef long long i, q = p
        out = [self._level_of(n, p)]
        if steps >= 0:
            for i in range(steps):
                q = self._step(q)
                if q < 0:
                    self._raise(q)
                out.append(self._level_of(n, q))
        else:
            for i in range(-steps):
                if q == 0:
                    break
                q = self._step_back(q)
                if q < 0:
                    self._raise(q)
                out.append(self._level_of(n, q))
        return out
