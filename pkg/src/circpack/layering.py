"""ASAP layering of gate lists."""
from __future__ import annotations

from typing import Iterable, Sequence

from circpack.model import Gate, GateKind, MalformedCircuitError


def asap_layers(gates: Sequence[Gate], width: int) -> tuple[int, list[int]]:
    """Greedy as-soon-as-possible layering.

    Returns ``(depth, layer_of)``.  A gate lands one layer after the latest
    layer used on any of its operands.  Barriers take no layer: they lift all
    of their operands to the furthest frontier among them, and ``layer_of``
    records that frontier for them.  Measure and reset each take a layer.
    """
    frontier = [0] * width  # next free layer per qubit
    layer_of = []
    depth = 0
    for i, gate in enumerate(gates):
        for q in gate.qubits:
            if q >= width:
                raise MalformedCircuitError(
                    f"gate {i} ({gate.name}) uses qubit {q} but circuit width is {width}"
                )
        start = max(frontier[q] for q in gate.qubits)
        if gate.kind is GateKind.BARRIER:
            for q in gate.qubits:
                frontier[q] = start
            layer_of.append(start)
            continue
        for q in gate.qubits:
            frontier[q] = start + 1
        layer_of.append(start)
        depth = max(depth, start + 1)
    return depth, layer_of


def two_qubit_count(gates: Iterable[Gate]) -> int:
    return sum(1 for g in gates if g.kind is GateKind.TWO_QUBIT)
