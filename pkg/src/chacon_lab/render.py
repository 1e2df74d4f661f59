"""Static SVG figures: the stacking diagram of one construction step and the
3x3 transition grid for pairs of subcolumn indices.

Coordinates are exact: every interval endpoint ``num / 3^exp`` is mapped
to SVG units by one scale factor, and printed with enough digits to be
reproducible byte for byte.
"""
from __future__ import annotations

from fractions import Fraction

from .diagonals import DiagonalD, diagonal_refine, is_admissible, is_central
from .tower import TowerGeometry, default_geometry, parent_level

__all__ = ["figure1", "figure2"]

_COLOURS = {1: "#4e79a7", 2: "#59a14f", 3: "#f28e2b", 0: "#bab0ac"}
_NAMES = {1: "subcolumn 1", 2: "subcolumn 2", 3: "subcolumn 3", 0: "spacer"}


def _num(v) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{float(v):.6f}".rstrip("0").rstrip(".")


def _svg(width, height, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
            f'viewBox="0 0 {_num(width)} {_num(height)}" font-family="sans-serif" font-size="11">')
    return "\n".join([head, *body, "</svg>", ""])


def figure1(step: int, geometry: TowerGeometry | None = None, width: int = 900) -> str:
    """Tower ``step`` drawn as stacked levels above the unit axis.

    Each level sits at its true horizontal position in [0, L_step); colour
    records where it came from in the previous tower (one of the three
    subcolumns, or a new spacer).  The dashed line marks the top of C_step.
    """
    geometry = geometry or default_geometry()
    if step < 1:
        raise ValueError("step must be at least 1")
    geometry._check_depth(step)
    h = geometry.height(step)
    L = geometry.support_length(step).to_fraction()
    bar = max(2, min(14, 600 // h))
    margin, axis_h = 40, 40
    scale = Fraction(width - 2 * margin) / L
    height = 2 * margin + h * bar + axis_h + 30
    base = margin + h * bar
    body = [f'<text x="{margin}" y="{margin - 18}" font-size="14">tower {step}: {h} levels of width 1/{3**step}, '
            f'support [0, {L})</text>']
    for level in range(h):
        left, right = (e.to_fraction() for e in geometry.level_interval(step, level))
        origin = parent_level(step, level)
        kind = 0 if origin is None else origin[1]
        y = base - (level + 1) * bar
        body.append(f'<rect x="{_num(margin + left * scale)}" y="{y}" width="{_num((right - left) * scale)}" '
                    f'height="{bar - 1}" fill="{_COLOURS[kind]}"><title>level {level}: [{left}, {right})'
                    f'</title></rect>')
    top_c = base - (h // 2) * bar
    body.append(f'<line x1="{margin - 10}" y1="{top_c}" x2="{width - margin + 10}" y2="{top_c}" '
                f'stroke="black" stroke-dasharray="4 3"/>')
    body.append(f'<text x="{width - margin + 12}" y="{top_c + 4}">C_{step}</text>')
    body.append(f'<line x1="{margin}" y1="{base + 10}" x2="{_num(margin + L * scale)}" y2="{base + 10}" stroke="black"/>')
    k = 0
    while k <= L:
        x = margin + k * scale
        body.append(f'<line x1="{_num(x)}" y1="{base + 6}" x2="{_num(x)}" y2="{base + 14}" stroke="black"/>')
        body.append(f'<text x="{_num(x)}" y="{base + 28}" text-anchor="middle">{k}</text>')
        k += 1
    lx = margin
    for kind in (1, 2, 3, 0):
        body.append(f'<rect x="{lx}" y="{height - 22}" width="12" height="12" fill="{_COLOURS[kind]}"/>')
        body.append(f'<text x="{lx + 16}" y="{height - 12}">{_NAMES[kind]}</text>')
        lx += 120
    return _svg(width, height, body)


def figure2(d: int = 2, example: DiagonalD | None = None) -> str:
    """3x3 grid of transitions tau = (tau_1, tau_2) applied to ``example``.

    Forbidden cells get a star; central cells show the common refined
    diagonal and corner cells the new offset vector.
    """
    if d != 2:
        raise ValueError("the transition grid is drawn for d = 2 only")
    example = example or DiagonalD(1, (0, 0))
    if example.d != 2:
        raise ValueError("example diagonal must have d = 2")
    cell, margin = 110, 60
    size = 2 * margin + 3 * cell
    body = [f'<text x="{margin}" y="{margin - 30}" font-size="14">refinements of D = {example.depth}-diagonal '
            f'{list(example.offsets)}</text>',
            f'<text x="{margin + 3 * cell // 2}" y="{margin - 10}" text-anchor="middle">tau_2</text>',
            f'<text x="{margin - 35}" y="{margin + 3 * cell // 2}" text-anchor="middle">tau_1</text>']
    for i in range(3):
        body.append(f'<text x="{margin + i * cell + cell // 2}" y="{margin + 3 * cell + 16}" '
                    f'text-anchor="middle">{i + 1}</text>')
        body.append(f'<text x="{margin - 12}" y="{margin + i * cell + cell // 2 + 4}" '
                    f'text-anchor="middle">{i + 1}</text>')
    for t1 in (1, 2, 3):
        for t2 in (1, 2, 3):
            tau = (t1, t2)
            x = margin + (t2 - 1) * cell
            y = margin + (t1 - 1) * cell
            cx, cy = x + cell // 2, y + cell // 2
            if is_central(tau):
                kind, fill = "central", "#e8f0fa"
                label = str(list(diagonal_refine(example, tau).offsets))
            elif is_admissible(tau):
                kind, fill = "corner", "#fdf0e0"
                label = str(list(diagonal_refine(example, tau).offsets))
            else:
                kind, fill, label = "forbidden", "#f4f4f4", None
            body.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="black" '
                        f'data-tau="{t1},{t2}" data-kind="{kind}"/>')
            if label is None:
                body.append(f'<text x="{cx}" y="{cy + 10}" text-anchor="middle" font-size="32">*</text>')
            else:
                body.append(f'<text x="{cx}" y="{cy - 6}" text-anchor="middle">{kind}</text>')
                body.append(f'<text x="{cx}" y="{cy + 12}" text-anchor="middle">{label}</text>')
    return _svg(size, size + 10, body)
