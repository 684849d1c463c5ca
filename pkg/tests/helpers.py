"""Independent oracles used across the test-suite."""
from __future__ import annotations

import bisect
import itertools
from collections import Counter
from functools import lru_cache

import numpy as np

from circpack.model import GateKind


def occupancy(schedule, topology):
    """Per-batch (qubit x layer) count grids built cell by cell."""
    grids = []
    for batch in schedule.batches:
        grid = np.zeros((topology.total_qubits, max(batch.makespan, 1)), dtype=np.int32)
        for p in batch.placements:
            lo = p.physical_qubit_start
            assert 0 <= lo and lo + p.width <= topology.total_qubits, p
            grid[lo:lo + p.width, p.layer_start:p.layer_end] += 1
        grids.append(grid)
    return grids


def assert_feasible(schedule, circuits, topology, trap_confined=False):
    """Non-overlap, capacity, completeness and rectangle consistency."""
    by_id = {c.id: c for c in circuits}
    for grid in occupancy(schedule, topology):
        assert grid.max(initial=0) <= 1, "two circuits share a qubit-layer cell"
    ids = schedule.circuit_ids()
    assert Counter(ids) == Counter(c.id for c in circuits), "scheduled ids differ from the queue"
    bounds = list(itertools.accumulate(topology.traps))
    for p in schedule.placements:
        c = by_id[p.circuit_id]
        assert (p.width, p.depth) == (c.width, c.depth)
        assert p.layer_start >= 0
        assert p.trap_base == ([0] + bounds)[p.trap_index]
        assert 0 <= p.qubit_start < topology.traps[p.trap_index]
        if trap_confined:
            assert p.qubit_start + p.width <= topology.traps[p.trap_index]
            first = bisect.bisect_right(bounds, p.physical_qubit_start)
            last = bisect.bisect_right(bounds, p.physical_qubit_start + p.width - 1)
            assert first == last == p.trap_index


def dag_depth(gates, width):
    """Depth as the longest path through the per-qubit dependency DAG.

    Every non-barrier gate weighs one layer; barriers weigh nothing.
    """
    preds = []
    last_on = {}
    for i, g in enumerate(gates):
        preds.append({last_on[q] for q in g.qubits if q in last_on})
        for q in g.qubits:
            last_on[q] = i

    @lru_cache(maxsize=None)
    def finish(i):
        w = 0 if gates[i].kind is GateKind.BARRIER else 1
        return w + max((finish(j) for j in preds[i]), default=0)

    return max((finish(i) for i in range(len(gates))), default=0)


def gate_key(g, qubit_shift=0, clbit_shift=0):
    return (g.kind, g.name, tuple(q - qubit_shift for q in g.qubits), g.params,
            None if g.clbit is None else g.clbit - clbit_shift)


def split_combined(combined, batch, circuits, layout):
    """Attribute every gate of a parsed combined program to its circuit.

    Placements sharing a physical qubit are disjoint in time, so the gates on
    one qubit are the concatenation of each circuit's gates on it, in start
    order.  Resets are skipped.
    """
    segments = {}
    for p in sorted(batch.placements, key=lambda p: p.layer_start):
        c = circuits[p.circuit_id]
        for k in range(c.width):
            n = sum(1 for g in c.gates if k in g.qubits and g.kind is not GateKind.RESET)
            if n:
                segments.setdefault(p.physical_qubit_start + k, []).append([p, n])
    clbit_base, off = {}, 0
    for r in layout:
        clbit_base[r.circuit_id] = off
        off += r.bits
    out = {p.circuit_id: Counter() for p in batch.placements}
    for g in combined.gates:
        if g.kind is GateKind.RESET:
            continue
        owners = set()
        for q in g.qubits:
            seg = segments[q][0]
            owners.add(seg[0])
            seg[1] -= 1
            if seg[1] == 0:
                segments[q].pop(0)
        assert len(owners) == 1, f"gate {g} spans circuits"
        p = owners.pop()
        out[p.circuit_id][gate_key(g, p.physical_qubit_start, clbit_base.get(p.circuit_id, 0))] += 1
    return out


ACCEPTANCE = []


def verdict(number, ok, detail):
    """Record and print one acceptance line, then fail the test if needed."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line
