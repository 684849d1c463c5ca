"""Trap-aware multi-programming of quantum circuits on QCCD trapped-ion devices."""
from circpack.cluster import balanced_assign, schedule_cluster
from circpack.layering import asap_layers, two_qubit_count
from circpack.metrics import (
    avg_utilization,
    estimate_shuttles,
    instantaneous_utilization,
    lrf,
    schedule_report,
)
from circpack.model import (
    Batch,
    Circuit,
    DeviceTopology,
    Gate,
    GateKind,
    Placement,
    Schedule,
    WorkerAssignment,
)
from circpack.packing import (
    pack_circpack,
    pack_fifo,
    pack_generic_skyline,
    pack_serial,
    skyline_minimax,
)
from circpack.qasm import emit_combined, parse_program, pst, unbundle

__all__ = [
    "Batch",
    "Circuit",
    "DeviceTopology",
    "Gate",
    "GateKind",
    "Placement",
    "Schedule",
    "WorkerAssignment",
    "asap_layers",
    "two_qubit_count",
    "parse_program",
    "emit_combined",
    "unbundle",
    "pst",
    "skyline_minimax",
    "pack_circpack",
    "pack_fifo",
    "pack_generic_skyline",
    "pack_serial",
    "avg_utilization",
    "instantaneous_utilization",
    "lrf",
    "estimate_shuttles",
    "schedule_report",
    "balanced_assign",
    "schedule_cluster",
]

__version__ = "0.1.0"
