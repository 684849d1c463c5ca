"""Two-level scheduling over several independent devices.

Circuits are first spread over workers by a greedy least-loaded rule on
circuit area; each worker's share is then packed on its own.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from circpack.model import (
    CircpackError,
    Circuit,
    ConfigurationError,
    DeviceTopology,
    OversizedCircuitError,
    Schedule,
    WorkerAssignment,
)
from circpack.packing import get_packer


class WorkerError(CircpackError):
    def __init__(self, worker: int, cause: Exception):
        super().__init__(worker, cause)  # keeps the exception picklable
        self.worker = worker
        self.cause = cause

    def __str__(self):
        return f"worker {self.worker}: {self.cause}"


def balanced_assign(circuits: Sequence[Circuit], worker_count: int,
                    max_widths: Sequence[int] | None = None) -> WorkerAssignment:
    """Give each circuit, in queue order, to the lowest-index least-loaded worker.

    With ``max_widths`` a circuit that is too wide for the chosen worker goes
    to the next least-loaded worker that can hold it.
    """
    if worker_count < 1:
        raise ConfigurationError("need at least one worker")
    if max_widths is not None and len(max_widths) != worker_count:
        raise ConfigurationError("one width limit per worker is required")
    loads = [0] * worker_count
    lists: list[list[int]] = [[] for _ in range(worker_count)]
    for c in circuits:
        if max_widths is None:
            w = loads.index(min(loads))
        else:
            fits = [j for j in range(worker_count) if c.width <= max_widths[j]]
            if not fits:
                raise OversizedCircuitError(c, max(max_widths), "qubits on any worker")
            w = min(fits, key=lambda j: (loads[j], j))
        loads[w] += c.area
        lists[w].append(c.id)
    return WorkerAssignment(tuple(tuple(ids) for ids in lists), tuple(loads))


def _width_limit(topology: DeviceTopology, algorithm: str) -> int:
    return topology.max_trap if algorithm == "circpack" else topology.total_qubits


@dataclass(frozen=True)
class ClusterResult:
    assignment: WorkerAssignment
    schedules: tuple[Schedule, ...]
    seconds: tuple[float, ...]  # packing wall time per worker


def _pack_one(args):
    worker, algorithm, circuits, topology = args
    t0 = time.perf_counter()
    try:
        schedule = get_packer(algorithm)(circuits, topology)
    except CircpackError as exc:
        raise WorkerError(worker, exc) from exc
    return schedule, time.perf_counter() - t0


def schedule_cluster(circuits: Sequence[Circuit], topologies: Sequence[DeviceTopology],
                     algorithm: str = "circpack", jobs: int = 1) -> ClusterResult:
    """Assign then pack; per-worker results come back in worker order."""
    get_packer(algorithm)
    if not topologies:
        raise ConfigurationError("need at least one worker")
    limits = [_width_limit(t, algorithm) for t in topologies]
    heterogeneous = len(set(limits)) > 1
    assignment = balanced_assign(circuits, len(topologies), limits if heterogeneous else None)
    by_id = {c.id: c for c in circuits}
    tasks = [(w, algorithm, [by_id[i] for i in ids], topologies[w])
             for w, ids in enumerate(assignment.circuits)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pack_one, tasks))
    else:
        results = [_pack_one(t) for t in tasks]
    return ClusterResult(
        assignment,
        tuple(s for s, _ in results),
        tuple(t for _, t in results),
    )
