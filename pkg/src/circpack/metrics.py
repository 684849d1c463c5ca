"""Schedule quality metrics.

Utilization uses the area reading: a placed circuit keeps its whole
qubit x layer rectangle busy, so the time average of the per-layer busy
fraction equals the packing efficiency of the schedule.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from circpack.model import (
    Circuit,
    ConsistencyError,
    DeviceTopology,
    GateKind,
    Schedule,
    UndefinedMetricError,
)


def avg_utilization(schedule: Schedule, total_qubits: int) -> float:
    makespan = schedule.total_makespan
    if makespan <= 0:
        raise UndefinedMetricError("utilization of an empty schedule is undefined")
    busy = sum(p.area for p in schedule.placements)
    return busy / (total_qubits * makespan)


def instantaneous_utilization(schedule: Schedule, total_qubits: int, t: int) -> float:
    """Busy fraction of the device at global layer ``t`` (batches back to back)."""
    if not 0 <= t < schedule.total_makespan:
        raise ValueError(f"layer {t} outside [0, {schedule.total_makespan})")
    for offset, batch in zip(schedule.batch_offsets(), schedule.batches):
        if offset <= t < offset + batch.makespan:
            local = t - offset
            busy = sum(p.width for p in batch.placements if p.layer_start <= local < p.layer_end)
            return busy / total_qubits
    raise AssertionError("unreachable")


def utilization_profile(schedule: Schedule, total_qubits: int) -> list[float]:
    """Per-layer utilization over the whole schedule, via a difference array."""
    out: list[float] = []
    for batch in schedule.batches:
        delta = [0] * (batch.makespan + 1)
        for p in batch.placements:
            delta[p.layer_start] += p.width
            delta[p.layer_end] -= p.width
        busy = 0
        for t in range(batch.makespan):
            busy += delta[t]
            out.append(busy / total_qubits)
    return out


def lrf(serial_layers: int, makespan: int) -> float:
    """Layer reduction factor, in percent."""
    if serial_layers <= 0:
        raise UndefinedMetricError("serial layer count must be positive")
    return 100.0 * (serial_layers - makespan) / serial_layers


def estimate_shuttles(schedule: Schedule, circuits: Mapping[int, Circuit], topology: DeviceTopology) -> int:
    """Count two-qubit gates whose operands land in different traps.

    A stand-in for a shuttling compiler: logical qubit k of a placement maps to
    physical qubit ``physical_qubit_start + k`` with no further permutation.
    """
    trap_of = [topology.trap_of(q) for q in range(topology.total_qubits)]
    count = 0
    for p in schedule.placements:
        if p.physical_qubit_start + p.width > topology.total_qubits:
            raise ConsistencyError(f"circuit {p.circuit_id} placed beyond the device")
        first, last = trap_of[p.physical_qubit_start], trap_of[p.physical_qubit_start + p.width - 1]
        if first == last:
            continue
        base = p.physical_qubit_start
        for g in circuits[p.circuit_id].gates:
            if g.kind is GateKind.TWO_QUBIT and trap_of[base + g.qubits[0]] != trap_of[base + g.qubits[1]]:
                count += 1
    return count


@dataclass(frozen=True)
class ScheduleReport:
    algorithm: str
    circuits: int
    makespan: int
    cutoffs: int
    shuttles: int
    avg_utilization: float | None
    lrf: float
    seconds: float | None = None

    def row(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "circuits": self.circuits,
            "makespan": self.makespan,
            "cutoffs": self.cutoffs,
            "shuttles_est": self.shuttles,
            "avg_util_pct": None if self.avg_utilization is None else 100.0 * self.avg_utilization,
            "lrf_pct": self.lrf,
            "seconds": self.seconds,
        }


def schedule_report(schedule: Schedule, circuits: Mapping[int, Circuit], topology: DeviceTopology,
                    serial_reference: int | Schedule, seconds: float | None = None) -> ScheduleReport:
    serial_layers = (serial_reference.total_makespan if isinstance(serial_reference, Schedule)
                     else int(serial_reference))
    makespan = schedule.total_makespan
    return ScheduleReport(
        algorithm=schedule.algorithm,
        circuits=len(schedule.placements),
        makespan=makespan,
        cutoffs=schedule.cutoff_count,
        shuttles=estimate_shuttles(schedule, circuits, topology),
        avg_utilization=avg_utilization(schedule, topology.total_qubits) if makespan else None,
        lrf=lrf(serial_layers, makespan) if serial_layers else 0.0,
        seconds=seconds,
    )


def timed_pack(packer: Callable[[Sequence[Circuit], DeviceTopology], Schedule],
               circuits: Sequence[Circuit], topology: DeviceTopology) -> tuple[Schedule, float]:
    t0 = time.perf_counter()
    schedule = packer(circuits, topology)
    return schedule, time.perf_counter() - t0
