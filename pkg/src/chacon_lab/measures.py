"""Diagonal measures evaluated exactly from their parameters.

A parameter ``(n0, D, tau)`` with scale ``lam`` determines the diagonals
D_n for ``n >= n0`` and a box weight ``alpha_n``: ``alpha_{n0} = lam /
#boxes(D_{n0})``, divided by 3 at each central step and unchanged at each
corner step.  An n-box has measure ``alpha_n`` when it lies on D_n and 0
otherwise.  Measure values are exact ``Fraction`` objects (they are not
triadic in general, e.g. 1/4).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .diagonals import (
    BoxD,
    ConsistentFamily,
    DiagonalD,
    Segment,
    descend,
    diagonal_refine,
    initial_report,
    parent_diagonals,
)
from .errors import DepthError, InconsistentFamilyError, PreconditionError
from .report import Report
from .tower import TowerGeometry, child_level, default_geometry, half_height, height
from .triadic import Triadic, parse_triadic

__all__ = [
    "Classification",
    "DiagonalMeasureParams",
    "FactorizeResult",
    "Kind",
    "ProductParams",
    "alpha",
    "classify",
    "compatible_level_count",
    "diagonal_at",
    "diagonal_mask",
    "factorize",
    "halfcube_table",
    "marginal",
    "measure_of_box",
    "measure_of_halfcube",
    "parse_rational",
    "product_measure_of_box",
    "verify_additivity",
    "verify_graph_identity",
]


def parse_rational(value) -> Fraction:
    """Accept ints, Fractions, Triadic values and strings ``p/q`` or ``num/3^exp``."""
    if isinstance(value, Triadic):
        return value.to_fraction()
    if isinstance(value, str) and "^" in value:
        return parse_triadic(value).to_fraction()
    return Fraction(value)


@dataclass(frozen=True)
class DiagonalMeasureParams:
    family: ConsistentFamily
    scale: Fraction = Fraction(1)
    max_depth: int | None = None
    require_initial: bool = True
    _diagonals: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "scale", parse_rational(self.scale))
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.max_depth is None:
            object.__setattr__(self, "max_depth", default_geometry().max_depth)
        if self.require_initial and not initial_report(self.family.initial)["initial"]:
            raise PreconditionError(f"{self.family.offsets} is not an initial {self.family.n0}-diagonal")
        self._diagonals[self.family.n0] = self.family.initial

    @property
    def n0(self) -> int:
        return self.family.n0

    @property
    def d(self) -> int:
        return self.family.d

    def diagonal(self, n: int) -> DiagonalD:
        """D_n, refined on demand and checked for consistency at every step."""
        if n < self.n0:
            raise ValueError(f"D_n is a parameter only for n >= n0 = {self.n0}")
        if n > self.max_depth:
            raise DepthError(f"depth {n} exceeds max_depth {self.max_depth}")
        m = max(k for k in self._diagonals if k <= n)
        while m < n:
            D = self._diagonals[m]
            nxt = diagonal_refine(D, self.family.tau(m))
            if any(p != D for p in parent_diagonals(nxt)):
                raise InconsistentFamilyError(f"D_{m + 1} meets C_{m}^d outside D_{m}")
            m += 1
            self._diagonals[m] = nxt
        return self._diagonals[n]

    def alpha(self, n: int) -> Fraction:
        a = self.scale / self.family.initial.box_count
        for m in range(self.n0, n):
            if self.family.is_central_step(m):
                a /= 3
        if n > self.n0:
            self.diagonal(n)  # surfaces tail/depth errors consistently
        return a

    def to_json(self) -> dict:
        return {**self.family.to_json(), "scale": str(self.scale)}

    @classmethod
    def from_json(cls, obj: dict, **kw) -> "DiagonalMeasureParams":
        return cls(ConsistentFamily.from_json(obj), parse_rational(obj.get("scale", 1)), **kw)


def alpha(p: DiagonalMeasureParams, n: int) -> Fraction:
    if n < p.n0:
        raise ValueError(f"alpha_n is defined for n >= n0 = {p.n0}")
    return p.alpha(n)


def diagonal_at(p: DiagonalMeasureParams, n: int) -> DiagonalD:
    return p.diagonal(n)


def _count_boxes_below(p: DiagonalMeasureParams, b: BoxD) -> int:
    """Number of boxes of D_{n0} inside the lower-depth box ``b``."""
    segs = [Segment(p.n0, 0, p.family.initial.box_count - 1, p.family.offsets)]
    for _ in range(p.n0 - b.depth):
        segs = descend(segs)
    count = 0
    for s in segs:
        ks = {l - sh for l, sh in zip(b.levels, s.shift)}
        if len(ks) == 1:
            k = ks.pop()
            count += s.lo <= k <= s.hi
    return count


def measure_of_box(p: DiagonalMeasureParams, b: BoxD) -> Fraction:
    """sigma(b).  Below n0 the value is the sum over the n0-boxes of D_{n0} inside ``b``."""
    if b.d != p.d:
        raise ValueError("box dimension does not match the measure")
    if b.depth >= p.n0:
        return p.alpha(b.depth) if p.diagonal(b.depth).contains(b) else Fraction(0)
    return p.alpha(p.n0) * _count_boxes_below(p, b)


def diagonal_mask(p: DiagonalMeasureParams, n: int, levels: np.ndarray) -> np.ndarray:
    """Vectorised membership in D_n for an ``(N, d)`` array of box levels at depth ``n >= n0``."""
    levels = np.asarray(levels, dtype=np.int64)
    D = p.diagonal(n)
    rel = levels - levels.min(axis=1, keepdims=True)
    return np.all(rel == np.asarray(D.offsets, dtype=np.int64), axis=1)


def measure_of_halfcube(p: DiagonalMeasureParams, n: int) -> Fraction:
    """sigma(C_n^d), with the doubling step and the universal bound asserted."""
    if n < 1:
        return Fraction(0)
    if n < p.n0:
        segs = [Segment(p.n0, 0, p.family.initial.box_count - 1, p.family.offsets)]
        for _ in range(p.n0 - n):
            segs = descend(segs)
        return p.alpha(p.n0) * sum(s.hi - s.lo + 1 for s in segs)
    value = p.alpha(n) * p.diagonal(n).box_count
    bound = p.scale * half_height(n) ** p.d
    if value > bound:
        raise AssertionError(f"sigma(C_{n}^d) = {value} exceeds the universal bound {bound}")
    if n > p.n0:
        prev = p.alpha(n - 1) * p.diagonal(n - 1).box_count
        if value < 2 * prev:
            raise AssertionError(f"doubling fails at depth {n}: {value} < 2 * {prev}")
    return value


def halfcube_table(p: DiagonalMeasureParams, n_max: int) -> list[dict]:
    rows = []
    for n in range(p.n0, n_max + 1):
        D = p.diagonal(n)
        rows.append({
            "n": n,
            "offsets": list(D.offsets),
            "box_count": D.box_count,
            "alpha": p.alpha(n),
            "sigma_C": measure_of_halfcube(p, n),
            "bound": p.scale * half_height(n) ** p.d,
            "step": None if n == n_max else ("central" if p.family.is_central_step(n) else "corner"),
        })
    return rows


# classification ---------------------------------------------------------------


class Kind(str, enum.Enum):
    GRAPH_JOINING = "GraphJoining"
    WEIRD_CONSERVATIVE = "WeirdConservative"
    WEIRD_DISSIPATIVE = "WeirdDissipative"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    k: tuple | None = None
    alpha: Fraction | None = None
    n1: int | None = None
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "evidence": self.evidence}
        if self.kind is Kind.GRAPH_JOINING:
            out.update({"k": list(self.k), "alpha": str(self.alpha), "n1": self.n1})
        return out


def classify(p: DiagonalMeasureParams) -> Classification:
    """Graph joining iff the tail is eventually central; otherwise weird.

    A weird measure is conservative when central steps recur and totally
    dissipative when the tail has corner steps only.
    """
    f = p.family
    if not f.certifiable:
        raise PreconditionError("a truncated family cannot be classified")
    cond = f.condition_tau()
    evidence = {"tail": f.tail_policy, "condition_tau": cond}
    if not cond:
        evidence["note"] = "some coordinate is eventually always 3; the nested boxes have empty intersection"
    kinds = f.tail_kinds()
    if kinds == {"central"}:
        last = f.last_corner() if f.tail == "central" else None
        n1 = p.n0 if last is None else last + 1
        D = p.diagonal(n1)
        k = tuple(o - D.offsets[0] for o in D.offsets[1:])
        a = p.alpha(n1) * 3**n1
        evidence["depth_range"] = [p.n0, n1]
        return Classification(Kind.GRAPH_JOINING, k, a, n1, evidence)
    evidence["depth_range"] = [p.n0, p.n0 + len(f.taus)]
    evidence["block"] = [list(t) for t in f.taus]
    kind = Kind.WEIRD_CONSERVATIVE if "central" in kinds else Kind.WEIRD_DISSIPATIVE
    return Classification(kind, evidence=evidence)


def _graph_images(n: int, k_rel: Sequence[int], geometry: TowerGeometry) -> list[np.ndarray]:
    """For each C_n level l and third t, the tower-n level of ``T^e`` applied to that third.

    ``k_rel`` are nonnegative exponents below ``h_n``.  Each third of a C_n
    level is a tower-(n+1) level that ``T^e`` moves rigidly inside tower n+1,
    so its left endpoint decides where the whole third goes.
    """
    g = geometry.grid()
    hh = half_height(n)
    out = []
    for e in k_rel:
        img = np.full((hh, 3), -1, dtype=np.int64)
        for l in range(hh):
            for t in (1, 2, 3):
                a = g.left(n + 1, child_level(n, l, t))
                img[l, t - 1] = g.level_of(n, g.iterate(a, e))
        out.append(img)
    return out


def verify_graph_identity(p: DiagonalMeasureParams, n: int, geometry: TowerGeometry | None = None) -> Report:
    """Compare sigma(A_1 x ... x A_d) with alpha * mu(A_1 & T^-k_2 A_2 & ...) on every n-box.

    The right side is computed from orbits of T, independently of the
    diagonal bookkeeping: the box is re-based on the coordinate with the
    smallest k so that only forward iterates are needed.
    """
    geometry = geometry or default_geometry()
    c = classify(p)
    if c.kind is not Kind.GRAPH_JOINING:
        raise PreconditionError(f"measure is {c.kind.value}, not a graph joining")
    ks = (0,) + c.k
    hh = half_height(n)
    if n < c.n1 or max(abs(k) for k in ks) >= hh:
        raise PreconditionError(f"need n >= n1 = {c.n1} and h_n/2 > max|k_i|")
    if n + 1 > geometry.max_depth:
        raise DepthError(f"n + 1 = {n + 1} exceeds max_depth {geometry.max_depth}")
    d = len(ks)
    base = int(np.argmin(ks))
    others = [i for i in range(d) if i != base]
    images = _graph_images(n, [ks[i] - ks[base] for i in others], geometry)
    a_n = p.alpha(n)
    third = c.alpha / 3 ** (n + 1)
    rep = Report("graph-identity", details={"n": n, "k": list(c.k), "alpha": c.alpha, "boxes": hh**d})
    axes = np.arange(hh)
    for lb in range(hh):
        # count[t] over the grid of the other coordinates
        hits = np.zeros((hh,) * (d - 1), dtype=np.int64)
        for t in range(3):
            ok = np.ones((), dtype=bool)
            for img in images:
                ok = np.logical_and.outer(ok, axes == img[lb, t])
            hits += ok
        grid = np.stack(np.meshgrid(*([axes] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
        levels = np.insert(grid, base, lb, axis=1)
        on = diagonal_mask(p, n, levels).reshape(hits.shape)
        for on_v, hit_v in {(bool(o), int(h)) for o, h in zip(on.ravel(), hits.ravel())}:
            lhs = a_n if on_v else Fraction(0)
            rhs = third * hit_v
            sel = (on == on_v) & (hits == hit_v)
            cnt = int(sel.sum())
            rep.checked += cnt
            if lhs != rhs:
                idx = np.argwhere(sel)[0].tolist()
                box = idx[:base] + [lb] + idx[base:]
                rep.fail({"box": box, "sigma": lhs, "graph": rhs}, cnt)
    return rep


def _diagonal_levels(D: DiagonalD) -> np.ndarray:
    return np.arange(D.box_count, dtype=np.int64)[:, None] + np.asarray(D.offsets, dtype=np.int64)


def _parent_levels(n: int, levels: np.ndarray) -> np.ndarray:
    """Tower-n level of each tower-(n+1) level, -1 on spacers."""
    h = height(n)
    out = np.full(levels.shape, -1, dtype=np.int64)
    for lo, hi, base in ((0, h, 0), (h, 2 * h, h), (2 * h + 1, 3 * h + 1, 2 * h + 1)):
        sel = (levels >= lo) & (levels < hi)
        out[sel] = levels[sel] - base
    return out


def verify_additivity(p: DiagonalMeasureParams, n: int) -> Report:
    """sigma(B) equals the sum of sigma(B(tau)) over all 3^d tuples, for every n-box B.

    Only boxes of D_n carry mass, so they are checked child by child.  Every
    other n-box has sigma zero, and its children carry none exactly when no
    box of D_{n+1} inside C_n^d has its parent off D_n; that second
    condition is checked over the boxes of D_{n+1}.  Together the two cover
    all (h_n/2)^d boxes.
    """
    d, hh, h = p.d, half_height(n), height(n)
    D, D1 = p.diagonal(n), p.diagonal(n + 1)
    a_n, a_next = p.alpha(n), p.alpha(n + 1)
    rep = Report("additivity", details={"n": n, "boxes": hh**d, "diagonal_boxes": D.box_count})

    on = _diagonal_levels(D)
    hits = np.zeros(len(on), dtype=np.int64)
    shift = {1: 0, 2: h, 3: 2 * h + 1}
    for tau in itertools.product((1, 2, 3), repeat=d):
        hits += diagonal_mask(p, n + 1, on + np.array([shift[t] for t in tau], dtype=np.int64))
    for hit_v in np.unique(hits).tolist():
        sel = hits == hit_v
        cnt = int(sel.sum())
        rep.checked += cnt
        if a_n != a_next * hit_v:
            rep.fail({"box": on[np.flatnonzero(sel)[0]].tolist(), "sigma": a_n, "children": a_next * hit_v}, cnt)

    parents = _parent_levels(n, _diagonal_levels(D1))
    inside = np.all((parents >= 0) & (parents < hh), axis=1)
    stray = parents[inside][~diagonal_mask(p, n, parents[inside])] if inside.any() else parents[:0]
    stray_boxes = {tuple(row) for row in stray.tolist()}
    rep.checked += hh**d - D.box_count
    for box in sorted(stray_boxes):
        rep.fail({"box": list(box), "sigma": Fraction(0), "children": "positive"})
    return rep


def compatible_level_count(p: DiagonalMeasureParams, n: int) -> tuple[int, Fraction]:
    """Distinct first-coordinate levels among the boxes of D_n, and their share of C_n."""
    if n < p.n0:
        raise ValueError(f"needs n >= n0 = {p.n0}")
    count = p.diagonal(n).box_count
    return count, Fraction(count, half_height(n))


def marginal(p: DiagonalMeasureParams, n: int, coordinate: int = 1) -> dict:
    """First-coordinate (or any coordinate) marginal of sigma restricted to C_n^d."""
    D = p.diagonal(n)
    lo = D.offsets[coordinate - 1]
    a = p.alpha(n)
    return {
        "n": n,
        "coordinate": coordinate,
        "levels": [lo, lo + D.box_count - 1],
        "value_per_level": a,
        "density_vs_lebesgue": a * 3**n,
        "support_fraction": Fraction(D.box_count, half_height(n)),
    }


# products and factorization -------------------------------------------------


@dataclass(frozen=True)
class ProductParams:
    partition: tuple
    factors: tuple

    def __post_init__(self):
        parts = tuple(tuple(sorted(int(i) for i in part)) for part in self.partition)
        object.__setattr__(self, "partition", parts)
        object.__setattr__(self, "factors", tuple(self.factors))
        flat = sorted(i for part in parts for i in part)
        if not parts or any(not part for part in parts) or flat != list(range(1, len(flat) + 1)):
            raise ValueError("partition must split {1, ..., d} into nonempty disjoint parts")
        if len(parts) != len(self.factors):
            raise ValueError("one factor per part is required")
        for part, fac in zip(parts, self.factors):
            if fac.d != len(part):
                raise ValueError(f"factor for part {part} has dimension {fac.d}")

    @property
    def d(self) -> int:
        return sum(len(part) for part in self.partition)


def product_measure_of_box(pp: ProductParams, b: BoxD) -> Fraction:
    if b.d != pp.d:
        raise ValueError("box dimension does not match the product")
    value = Fraction(1)
    for part, fac in zip(pp.partition, pp.factors):
        value *= measure_of_box(fac, BoxD(b.depth, tuple(b.levels[i - 1] for i in part)))
    return value


@dataclass(frozen=True)
class FactorizeResult:
    partition: tuple
    factors: tuple
    scale: Fraction
    exact: bool

    def to_json(self) -> dict:
        return {
            "partition": [list(p) for p in self.partition],
            "scale": str(self.scale),
            "factors": [
                [{"levels": list(k), "value": str(v)} for k, v in sorted(f.items())] for f in self.factors
            ],
            "exact": self.exact,
        }


def _rank_one(mat: np.ndarray, tolerance: Fraction) -> bool:
    """Rank <= 1 test; exact on integer object arrays when ``tolerance`` is 0."""
    flat = np.abs(mat.astype(float)) if tolerance else None
    if tolerance:
        r0, c0 = np.unravel_index(np.argmax(flat), flat.shape)
    else:
        nz = np.argwhere(mat != 0)
        if nz.size == 0:
            return True
        r0, c0 = nz[0]
    piv = mat[r0, c0]
    if tolerance:
        m = mat.astype(float)
        err = np.abs(m * m[r0, c0] - np.outer(m[:, c0], m[r0, :]))
        return bool(err.max() <= float(tolerance) * float(m[r0, c0]) ** 2)
    return bool(np.all(mat * piv == np.outer(mat[:, c0], mat[r0, :])))


def factorize(tensor: Mapping[tuple, Fraction], tolerance: Fraction = Fraction(0)) -> FactorizeResult:
    """Finest partition of the coordinates over which ``tensor`` is an outer product.

    ``tensor`` maps level tuples (or BoxD) to nonnegative rationals.  Every
    bipartition whose unfolding has rank one is found; the finest common
    refinement of those is the answer.  Factors are normalised to unit mass
    and ``scale`` carries the total mass.
    """
    items = {}
    for key, v in tensor.items():
        levels = key.levels if isinstance(key, BoxD) else tuple(key)
        items[levels] = parse_rational(v)
    if not items or all(v == 0 for v in items.values()):
        raise PreconditionError("tensor is identically zero")
    if any(v < 0 for v in items.values()):
        raise PreconditionError("tensor entries must be nonnegative")
    tolerance = parse_rational(tolerance)
    d = len(next(iter(items)))
    axes = [sorted({k[i] for k in items}) for i in range(d)]
    index = [{l: j for j, l in enumerate(ax)} for ax in axes]
    den = 1
    for v in items.values():
        den = den * v.denominator // np.gcd(den, v.denominator)
    dense = np.zeros([len(ax) for ax in axes], dtype=object)
    for k, v in items.items():
        dense[tuple(index[i][l] for i, l in enumerate(k))] = int(v * den)

    # block[i] = label of the part containing coordinate i in the common refinement
    labels = [0] * d
    for mask in range(1, 2 ** (d - 1)):
        side = [i for i in range(d) if mask >> i & 1]
        rest = [i for i in range(d) if not mask >> i & 1]
        unfolded = dense.transpose(side + rest).reshape(
            int(np.prod([dense.shape[i] for i in side])), -1)
        if _rank_one(unfolded, tolerance):
            labels = [2 * lab + (i in side) for i, lab in enumerate(labels)]
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    parts = sorted(groups.values())

    total = sum(items.values())
    factors = []
    for part in parts:
        marg = {}
        for k, v in items.items():
            key = tuple(k[i] for i in part)
            marg[key] = marg.get(key, Fraction(0)) + v
        factors.append({k: v / total for k, v in marg.items() if v})
    exact = tolerance == 0
    if exact:
        for k, v in items.items():
            prod = total
            for part, fac in zip(parts, factors):
                prod *= fac.get(tuple(k[i] for i in part), Fraction(0))
            if prod != v:  # cannot happen for a correct rank test
                raise AssertionError("reconstruction from factors failed")
    return FactorizeResult(tuple(tuple(i + 1 for i in part) for part in parts), tuple(factors), total, exact)
