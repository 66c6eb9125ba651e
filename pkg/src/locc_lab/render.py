"""Slice diagrams of product-state sets.

Each state |a>|b>|c> occupies the cells (i, j, k) of the product of its
factors' computational supports. The figure shows one dA x dB grid per C
level k. Cell classes: a superposition factor whose +/- partner is also in
the set is a `pm-pair` (outlined), a superposition without a partner is
`plus` (filled), and a state of basis kets is `basis` (plain).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from xml.sax.saxutils import escape

import numpy as np

from .families import StateSet

logger = logging.getLogger(__name__)

MAX_RENDER_DIM = 16
SUPPORT_EPS = 1e-12
CELL = 18
GAP = 24
MARGIN = 20

CLASS_STYLE = {
    "plus": 'fill="#222222" stroke="#222222"',
    "pm-pair": 'fill="none" stroke="#1f5fbf" stroke-width="2"',
    "basis": 'fill="#d9d9d9" stroke="#888888"',
}
ASCII_MARK = {"plus": "#", "pm-pair": "o", "basis": "."}
PRIORITY = {"basis": 0, "pm-pair": 1, "plus": 2}


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    label: str
    kind: str
    ijk: tuple


@dataclass
class FigureSpec:
    dims: tuple
    cells: list
    footprints: dict

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def slice(self, k: int) -> list:
        return [c for c in self.cells if c.ijk[2] == k]


def _support(v) -> list:
    return [int(i) for i in np.flatnonzero(np.abs(np.asarray(v)) > SUPPORT_EPS)]


def _flip_sign(sig: str) -> str:
    if "+" in sig:
        return sig.replace("+", "-", 1)
    return sig.replace("-", "+", 1)


def classify(states: StateSet) -> dict:
    sigs = {s.signature for s in states}
    out = {}
    for s in states:
        if all(len(_support(f)) == 1 for f in s.factors):
            out[s.label] = "basis"
        elif _flip_sign(s.signature) in sigs and _flip_sign(s.signature) != s.signature:
            out[s.label] = "pm-pair"
        else:
            out[s.label] = "plus"
    return out


def figure_spec(states: StateSet) -> FigureSpec:
    if any(d > MAX_RENDER_DIM for d in states.dims):
        raise RenderError("cannot render dims %s: each local dimension must be <= %d"
                          % (states.dims, MAX_RENDER_DIM))
    if len(states) == 0:
        logger.warning("empty state set: rendering a blank grid")
    kinds = classify(states)
    cells, foot = [], {}
    for s in states:
        cs = [Cell(s.label, kinds[s.label], ijk) for ijk in product(*(_support(f) for f in s.factors))]
        foot[s.label] = len(cs)
        cells.extend(cs)
    return FigureSpec(tuple(states.dims), cells, foot)


def render_ascii(spec: FigureSpec) -> str:
    dA, dB, dC = spec.dims
    lines = []
    for k in range(dC):
        grid = [[" "] * dB for _ in range(dA)]
        rank = [[-1] * dB for _ in range(dA)]
        for c in spec.slice(k):
            i, j, _ = c.ijk
            if PRIORITY[c.kind] > rank[i][j]:
                grid[i][j] = ASCII_MARK[c.kind]
                rank[i][j] = PRIORITY[c.kind]
        lines.append("k=%d" % k)
        lines.append("   " + "".join("%2d" % j for j in range(dB)))
        for i in range(dA):
            lines.append("%2d " % i + "".join(" " + ch for ch in grid[i]))
        lines.append("")
    return "\n".join(lines)


def render_svg(spec: FigureSpec) -> str:
    """One <rect class="cell ..."> per (state, cell); pm pairs also get a
    single outline around their run (class "run", not a cell)."""
    dA, dB, dC = spec.dims
    w_slice = dB * CELL
    width = 2 * MARGIN + dC * w_slice + max(dC - 1, 0) * GAP
    height = 2 * MARGIN + dA * CELL + 16
    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" data-cells="%d">'
           % (width, height, spec.n_cells)]
    for k in range(dC):
        x0 = MARGIN + k * (w_slice + GAP)
        y0 = MARGIN + 16
        out.append('<g class="slice" data-k="%d">' % k)
        out.append('<text x="%d" y="%d" font-size="12">k=%d</text>' % (x0, MARGIN + 10, k))
        for i in range(dA):
            for j in range(dB):
                out.append('<rect class="grid" x="%d" y="%d" width="%d" height="%d" fill="white" stroke="#cccccc"/>'
                           % (x0 + j * CELL, y0 + i * CELL, CELL, CELL))
        runs = {}
        for c in spec.slice(k):
            i, j, _ = c.ijk
            out.append('<rect class="cell %s" data-state="%s" x="%d" y="%d" width="%d" height="%d" %s/>'
                       % (c.kind, escape(c.label), x0 + j * CELL + 2, y0 + i * CELL + 2,
                          CELL - 4, CELL - 4, CLASS_STYLE[c.kind]))
            if c.kind == "pm-pair":
                runs.setdefault(c.label, []).append((i, j))
        seen = set()
        for label in sorted(runs):
            ij = tuple(sorted(runs[label]))
            if ij in seen:
                continue
            seen.add(ij)
            i0, i1 = min(p[0] for p in ij), max(p[0] for p in ij)
            j0, j1 = min(p[1] for p in ij), max(p[1] for p in ij)
            out.append('<rect class="run" x="%d" y="%d" width="%d" height="%d" fill="none" '
                       'stroke="#1f5fbf" stroke-width="1"/>'
                       % (x0 + j0 * CELL, y0 + i0 * CELL, (j1 - j0 + 1) * CELL, (i1 - i0 + 1) * CELL))
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_cell_count(svg: str) -> int:
    return svg.count('<rect class="cell ')
