"""Gantt views of a schedule: qubits down the y-axis, layers along x."""
from __future__ import annotations

import colorsys
import string
from typing import Mapping
from xml.sax.saxutils import escape

from circpack.model import Circuit, DeviceTopology, Schedule

GLYPHS = string.digits + string.ascii_lowercase + string.ascii_uppercase
IDLE = "."

LAYER_PX = 4
QUBIT_PX = 14
MARGIN_LEFT = 48
MARGIN_TOP = 24
MARGIN_BOTTOM = 28
MARGIN_RIGHT = 16


def circuit_color(circuit_id: int) -> str:
    hue = (circuit_id * 0.6180339887498949) % 1.0
    r, g, b = colorsys.hls_to_rgb(hue, 0.62, 0.55)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def glyph(circuit_id: int) -> str:
    return GLYPHS[circuit_id % len(GLYPHS)]


def gantt_svg(schedule: Schedule, circuits: Mapping[int, Circuit], topology: DeviceTopology,
              layer_px: int = LAYER_PX, qubit_px: int = QUBIT_PX) -> str:
    total_q = topology.total_qubits
    span = schedule.total_makespan
    plot_w = span * layer_px
    plot_h = total_q * qubit_px
    width = MARGIN_LEFT + plot_w + MARGIN_RIGHT
    height = MARGIN_TOP + plot_h + MARGIN_BOTTOM
    x0, y0 = MARGIN_LEFT, MARGIN_TOP

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">',
        f'<title>{escape(schedule.algorithm)} schedule: {span} layers, {len(schedule.batches)} batch(es)</title>',
    ]
    for p, offset in _placements_with_offsets(schedule):
        c = circuits.get(p.circuit_id)
        label = escape(c.name if c is not None else str(p.circuit_id))
        x = x0 + (offset + p.layer_start) * layer_px
        y = y0 + p.physical_qubit_start * qubit_px
        w, h = p.depth * layer_px, p.width * qubit_px
        out.append(
            f'<g><rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{circuit_color(p.circuit_id)}" '
            f'stroke="#333333" stroke-width="0.5"><title>#{p.circuit_id} {label}</title></rect>'
            f'<text x="{x + 2}" y="{y + min(h, qubit_px) - 4}">{p.circuit_id}</text></g>'
        )
    # trap boundaries
    base = 0
    for cap in topology.traps[:-1]:
        base += cap
        y = y0 + base * qubit_px
        out.append(f'<line x1="{x0}" y1="{y}" x2="{x0 + plot_w}" y2="{y}" stroke="#000000" stroke-dasharray="4 2"/>')
    # batch boundaries
    for offset in schedule.batch_offsets()[1:]:
        x = x0 + offset * layer_px
        out.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y0 + plot_h}" stroke="#c00000" stroke-width="1.5"/>')
    # axes
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y0 + plot_h}" stroke="#000000"/>')
    out.append(f'<line x1="{x0}" y1="{y0 + plot_h}" x2="{x0 + plot_w}" y2="{y0 + plot_h}" stroke="#000000"/>')
    for q in range(total_q):
        out.append(f'<text x="{x0 - 4}" y="{y0 + (q + 1) * qubit_px - 4}" text-anchor="end">q{q}</text>')
    out.append(f'<text x="{x0}" y="{y0 + plot_h + 16}">0</text>')
    out.append(f'<text x="{x0 + plot_w}" y="{y0 + plot_h + 16}" text-anchor="end">{span} layers</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _placements_with_offsets(schedule: Schedule):
    for offset, batch in zip(schedule.batch_offsets(), schedule.batches):
        for p in batch.placements:
            yield p, offset


def gantt_text(schedule: Schedule, circuits: Mapping[int, Circuit], topology: DeviceTopology) -> str:
    """One row per physical qubit, one column per layer.

    Busy cells show the glyph of the circuit id (ids wrap modulo 62), idle
    cells show ``.``; ``|`` marks batch boundaries and dashed rows mark trap
    boundaries.
    """
    total_q = topology.total_qubits
    rows = []
    for batch in schedule.batches:
        cells = [[IDLE] * batch.makespan for _ in range(total_q)]
        for p in batch.placements:
            g = glyph(p.circuit_id)
            for q in p.physical_qubits:
                cells[q][p.layer_start:p.layer_end] = [g] * p.depth
        rows.append(cells)
    lines = []
    label_w = len(f"q{total_q - 1}") + 1
    base = 0
    for k, cap in enumerate(topology.traps):
        if k:
            width = sum(b.makespan for b in schedule.batches) + max(len(schedule.batches) - 1, 0)
            lines.append(" " * label_w + "-" * width)
        for q in range(base, base + cap):
            grid = "|".join("".join(cells[q]) for cells in rows)
            lines.append(f"q{q}".ljust(label_w) + grid)
        base += cap
    return "\n".join(lines) + "\n"
