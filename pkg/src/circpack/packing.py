"""Skyline packers for circuit rectangles (qubits x layers).

``pack_circpack`` packs every trap as its own strip and seals a batch once the
running two-qubit gate count reaches the topology's ``alpha``.  The other
packers are comparison baselines: ``pack_serial`` runs circuits one at a time,
``pack_fifo`` and ``pack_generic_skyline`` pack onto the whole device and may
straddle trap boundaries.
"""
from __future__ import annotations

from typing import Callable, Sequence

from circpack.model import (
    Batch,
    Circuit,
    DeviceTopology,
    OversizedCircuitError,
    Placement,
    Schedule,
)


class SkylineGrid:
    """Per-trap vectors holding the next free layer of every qubit."""

    def __init__(self, capacities: Sequence[int]):
        self.capacities = tuple(capacities)
        self.reset()

    def reset(self) -> None:
        self.traps = [[0] * cap for cap in self.capacities]

    def place(self, trap: int, qubit_start: int, width: int, layer_end: int) -> None:
        row = self.traps[trap]
        row[qubit_start:qubit_start + width] = [layer_end] * width

    def height(self) -> int:
        return max((max(row) for row in self.traps), default=0)


def skyline_minimax(skyline: Sequence[int], q: int) -> tuple[int, int] | None:
    """Best window of ``q`` adjacent qubits on a frontier.

    Returns ``(layer_start, qubit_start)`` for the window whose highest
    frontier entry is lowest (lowest ``qubit_start`` on ties), or ``None``
    when the frontier is narrower than ``q``.
    """
    if q < 1:
        raise ValueError("window width must be >= 1")
    n = len(skyline)
    if q > n:
        return None
    best_layer, best_start = None, 0
    for start in range(n - q + 1):
        top = max(skyline[start:start + q])
        if best_layer is None or top < best_layer:
            best_layer, best_start = top, start
            if top == 0:
                break
    return best_layer, best_start


def _width_order(circuits: Sequence[Circuit]) -> list[Circuit]:
    return sorted(circuits, key=lambda c: (-c.width, c.id))


def _check_widths(circuits: Sequence[Circuit], limit: int, what: str) -> None:
    for c in circuits:
        if c.width > limit:
            raise OversizedCircuitError(c, limit, what)


def pack_circpack(circuits: Sequence[Circuit], topology: DeviceTopology) -> Schedule:
    """Trap-confined skyline packing with the two-qubit gate cutoff."""
    _check_widths(circuits, topology.max_trap, "qubits in a single trap")
    grid = SkylineGrid(topology.traps)
    batches: list[Batch] = []
    current: list[Placement] = []
    running = 0

    def seal():
        nonlocal current, running
        batches.append(Batch(len(batches), tuple(current), running))
        current, running = [], 0
        grid.reset()

    for circ in _width_order(circuits):
        best = None  # (layer, trap, qubit_start)
        for k, row in enumerate(grid.traps):
            fit = skyline_minimax(row, circ.width)
            if fit is not None and (best is None or fit[0] < best[0]):
                best = (fit[0], k, fit[1])
        layer, trap, qs = best
        grid.place(trap, qs, circ.width, layer + circ.depth)
        base = topology.trap_base(trap)
        current.append(Placement(circ.id, trap, qs, layer, circ.width, circ.depth, base))
        running += circ.two_qubit_count
        if running >= topology.alpha:
            seal()
    if current:
        seal()
    return Schedule("circpack", topology, tuple(batches))


def _pack_global(circuits: Sequence[Circuit], topology: DeviceTopology, algorithm: str) -> Schedule:
    _check_widths(circuits, topology.total_qubits, "qubits on the device")
    frontier = [0] * topology.total_qubits
    placements = []
    for circ in circuits:
        layer, start = skyline_minimax(frontier, circ.width)
        frontier[start:start + circ.width] = [layer + circ.depth] * circ.width
        placements.append(Placement.at(topology, circ, start, layer))
    if not placements:
        return Schedule(algorithm, topology, ())
    total_2q = sum(c.two_qubit_count for c in circuits)
    return Schedule(algorithm, topology, (Batch(0, tuple(placements), total_2q),))


def pack_fifo(circuits: Sequence[Circuit], topology: DeviceTopology) -> Schedule:
    """Queue order, earliest layer on the whole device, no cutoffs."""
    return _pack_global(list(circuits), topology, "fifo")


def pack_generic_skyline(circuits: Sequence[Circuit], topology: DeviceTopology) -> Schedule:
    """Widest first, earliest layer on the whole device, no cutoffs."""
    return _pack_global(_width_order(circuits), topology, "skyline")


def pack_serial(circuits: Sequence[Circuit], topology: DeviceTopology) -> Schedule:
    """One circuit per batch, in queue order."""
    _check_widths(circuits, topology.total_qubits, "qubits on the device")
    batches = []
    for i, circ in enumerate(circuits):
        trap = next((k for k, cap in enumerate(topology.traps) if cap >= circ.width), None)
        start = topology.trap_base(trap) if trap is not None else 0
        p = Placement.at(topology, circ, start, 0)
        batches.append(Batch(i, (p,), circ.two_qubit_count))
    return Schedule("serial", topology, tuple(batches))


PACKERS: dict[str, Callable[[Sequence[Circuit], DeviceTopology], Schedule]] = {
    "circpack": pack_circpack,
    "fifo": pack_fifo,
    "skyline": pack_generic_skyline,
    "serial": pack_serial,
}


def get_packer(name: str):
    try:
        return PACKERS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(PACKERS)}") from None
