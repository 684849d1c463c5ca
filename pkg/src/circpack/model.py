"""Domain types shared across the scheduler.

Qubit, trap, layer and classical-bit indices are 0-based everywhere.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEFAULT_ALPHA = 170


class CircpackError(Exception):
    """Base class for every error raised by this package."""


class MalformedCircuitError(CircpackError, ValueError):
    pass


class OversizedCircuitError(CircpackError, ValueError):
    def __init__(self, circuit: "Circuit", limit: int, what: str = "qubits"):
        super().__init__(circuit, limit, what)
        self.circuit = circuit
        self.limit = limit
        self.what = what

    def __str__(self):
        c = self.circuit
        return (f"circuit {c.id} ({c.name!r}) needs {c.width} qubits "
                f"but at most {self.limit} {self.what} are available")


class ConsistencyError(CircpackError, ValueError):
    pass


class ConfigurationError(CircpackError, ValueError):
    pass


class UndefinedMetricError(CircpackError, ValueError):
    pass


class GateKind(enum.Enum):
    ONE_QUBIT = "one-qubit"
    TWO_QUBIT = "two-qubit"
    MEASURE = "measure"
    RESET = "reset"
    BARRIER = "barrier"


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    name: str
    qubits: tuple[int, ...]
    params: str | None = None  # verbatim parameter text, never evaluated
    clbit: int | None = None  # measure only

    def __post_init__(self):
        n = len(self.qubits)
        if self.kind is GateKind.TWO_QUBIT:
            if n != 2:
                raise MalformedCircuitError(f"{self.name} needs 2 qubits, got {n}")
            if self.qubits[0] == self.qubits[1]:
                raise MalformedCircuitError(f"{self.name} operands must be distinct")
        elif self.kind is GateKind.BARRIER:
            if n < 1:
                raise MalformedCircuitError("barrier needs at least one qubit")
        elif n != 1:
            raise MalformedCircuitError(f"{self.name} needs 1 qubit, got {n}")
        if (self.clbit is not None) != (self.kind is GateKind.MEASURE):
            raise MalformedCircuitError("only measure gates carry a classical target")
        if any(q < 0 for q in self.qubits):
            raise MalformedCircuitError(f"negative qubit index in {self.name}")

    def shifted(self, offset: int, clbit_offset: int = 0) -> "Gate":
        return Gate(
            self.kind,
            self.name,
            tuple(q + offset for q in self.qubits),
            self.params,
            None if self.clbit is None else self.clbit + clbit_offset,
        )


@dataclass(frozen=True)
class Circuit:
    """A queued job: a gate list plus the rectangle it occupies.

    ``depth`` and ``two_qubit_count`` are derived by ASAP layering unless an
    explicit override is supplied (e.g. post-compilation metrics recorded in a
    queue manifest).  ``layer_of`` always reflects the actual gate list.
    """

    id: int
    name: str
    width: int
    gates: tuple[Gate, ...]
    ideal_outcome: str | None = None
    num_clbits: int = 0
    depth_override: int | None = None
    two_qubit_override: int | None = None
    natural_depth: int = field(init=False, repr=False, compare=False)
    layer_of: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        from circpack.layering import asap_layers

        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 1:
            raise MalformedCircuitError(f"circuit {self.name!r}: width must be >= 1")
        if not self.gates:
            raise MalformedCircuitError(f"circuit {self.name!r} has no gates")
        depth, layer_of = asap_layers(self.gates, self.width)
        object.__setattr__(self, "natural_depth", depth)
        object.__setattr__(self, "layer_of", tuple(layer_of))
        if self.depth_override is not None and self.depth_override < 1:
            raise MalformedCircuitError(f"circuit {self.name!r}: depth override must be >= 1")
        measured = [g.clbit for g in self.gates if g.kind is GateKind.MEASURE]
        if measured and max(measured) >= self.num_clbits:
            object.__setattr__(self, "num_clbits", max(measured) + 1)

    @property
    def depth(self) -> int:
        if self.depth_override is not None:
            return self.depth_override
        return self.natural_depth

    @property
    def two_qubit_count(self) -> int:
        if self.two_qubit_override is not None:
            return self.two_qubit_override
        return sum(1 for g in self.gates if g.kind is GateKind.TWO_QUBIT)

    @property
    def area(self) -> int:
        return self.width * self.depth

    def with_id(self, new_id: int) -> "Circuit":
        return Circuit(
            new_id,
            self.name,
            self.width,
            self.gates,
            self.ideal_outcome,
            self.num_clbits,
            self.depth_override,
            self.two_qubit_override,
        )


@dataclass(frozen=True)
class DeviceTopology:
    """A linear chain of traps; ``traps`` holds the ion capacity of each."""

    traps: tuple[int, ...]
    alpha: int = DEFAULT_ALPHA
    layout: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "traps", tuple(int(t) for t in self.traps))
        if not self.traps:
            raise ConfigurationError("topology needs at least one trap")
        if any(t < 1 for t in self.traps):
            raise ConfigurationError(f"trap capacities must be >= 1: {self.traps}")
        if self.alpha < 1:
            raise ConfigurationError(f"alpha must be >= 1, got {self.alpha}")
        if self.layout != "linear":
            raise ConfigurationError(f"unsupported layout {self.layout!r}")

    @property
    def total_qubits(self) -> int:
        return sum(self.traps)

    @property
    def max_trap(self) -> int:
        return max(self.traps)

    def trap_base(self, trap_index: int) -> int:
        return sum(self.traps[:trap_index])

    def trap_of(self, physical_qubit: int) -> int:
        if not 0 <= physical_qubit < self.total_qubits:
            raise ConsistencyError(f"physical qubit {physical_qubit} out of range")
        base = 0
        for k, cap in enumerate(self.traps):
            if physical_qubit < base + cap:
                return k
            base += cap
        raise AssertionError("unreachable")

    def with_alpha(self, alpha: int) -> "DeviceTopology":
        return DeviceTopology(self.traps, alpha, self.layout)


@dataclass(frozen=True)
class Placement:
    """Position of one circuit rectangle inside a batch.

    ``trap_base`` is the global index of the first qubit of ``trap_index``;
    build placements with :meth:`at` so it always agrees with the topology.
    """

    circuit_id: int
    trap_index: int
    qubit_start: int
    layer_start: int
    width: int
    depth: int
    trap_base: int = 0

    @classmethod
    def at(cls, topology: DeviceTopology, circuit: Circuit, physical_start: int, layer_start: int) -> "Placement":
        trap = topology.trap_of(physical_start)
        base = topology.trap_base(trap)
        return cls(circuit.id, trap, physical_start - base, layer_start, circuit.width, circuit.depth, base)

    @property
    def layer_end(self) -> int:
        return self.layer_start + self.depth

    @property
    def physical_qubit_start(self) -> int:
        return self.trap_base + self.qubit_start

    @property
    def physical_qubits(self) -> range:
        return range(self.physical_qubit_start, self.physical_qubit_start + self.width)

    @property
    def area(self) -> int:
        return self.width * self.depth


@dataclass(frozen=True)
class Batch:
    index: int
    placements: tuple[Placement, ...]
    two_qubit_total: int = 0

    @property
    def makespan(self) -> int:
        return max((p.layer_end for p in self.placements), default=0)


@dataclass(frozen=True)
class Schedule:
    algorithm: str
    topology: DeviceTopology
    batches: tuple[Batch, ...] = ()

    @property
    def total_makespan(self) -> int:
        return sum(b.makespan for b in self.batches)

    @property
    def cutoff_count(self) -> int:
        # serial counts one cutoff per circuit, the others count batch boundaries
        if self.algorithm == "serial":
            return len(self.batches)
        return max(len(self.batches) - 1, 0)

    @property
    def placements(self) -> list[Placement]:
        return [p for b in self.batches for p in b.placements]

    def circuit_ids(self) -> list[int]:
        return [p.circuit_id for p in self.placements]

    def batch_offsets(self) -> list[int]:
        offsets, t = [], 0
        for b in self.batches:
            offsets.append(t)
            t += b.makespan
        return offsets

    @property
    def avg_utilization(self) -> float:
        from circpack.metrics import avg_utilization

        return avg_utilization(self, self.topology.total_qubits)


@dataclass(frozen=True)
class WorkerAssignment:
    circuits: tuple[tuple[int, ...], ...]
    loads: tuple[int, ...]

    @property
    def worker_count(self) -> int:
        return len(self.circuits)


def index_circuits(circuits: Iterable[Circuit]) -> dict[int, Circuit]:
    by_id: dict[int, Circuit] = {}
    for c in circuits:
        if c.id in by_id:
            raise ConsistencyError(f"duplicate circuit id {c.id}")
        by_id[c.id] = c
    return by_id


def renumber(circuits: Sequence[Circuit], start: int = 0) -> list[Circuit]:
    """Give circuits consecutive ids in queue order."""
    return [c.with_id(start + i) for i, c in enumerate(circuits)]
