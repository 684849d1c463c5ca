"""File formats: topology text, queue manifests, schedule JSON, sampling.

Topology file (``key = value`` lines, ``#`` comments)::

    traps = 10,10
    alpha = 170
    layout = linear

Queue manifest (JSON)::

    {"circuits": [{"path": "a.qasm", "name": "a", "ideal": "01",
                   "override": {"depth": 16, "two_qubit_count": 2}}]}

``path`` is resolved relative to the manifest.  ``name`` defaults to the file
stem; ``ideal`` and ``override`` are optional.  Any other keys are ignored.

Schedule file (JSON)::

    {"format": "circpack-schedule/1",
     "algorithm": "circpack",
     "topology": {"traps": [10, 10], "alpha": 170, "layout": "linear"},
     "circuits": [{"id": 0, "name": ..., "width": ..,
                   "depth": .., "two_qubit_count": .., "ideal": ..}],
     "batches": [{"index": 0, "makespan": .., "two_qubit_total": ..,
                  "placements": [{"circuit_id": .., "trap": .., "qubit_start": ..,
                                  "layer_start": .., "depth": .., "width": ..}]}],
     "metrics": {...}}

Indices are 0-based; ``qubit_start`` is relative to ``trap``, whose first
qubit is the sum of the capacities of the traps before it.
"""
from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Iterable, Sequence

from circpack.model import (
    Batch,
    Circuit,
    ConfigurationError,
    ConsistencyError,
    DEFAULT_ALPHA,
    DeviceTopology,
    Placement,
    Schedule,
)
from circpack.qasm import parse_program

SCHEDULE_FORMAT = "circpack-schedule/1"


def parse_topology(text: str) -> DeviceTopology:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"topology line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in ("traps", "alpha", "layout"):
            raise ConfigurationError(f"topology line {lineno}: unknown key {key!r}")
        values[key] = value
    if "traps" not in values:
        raise ConfigurationError("topology needs a 'traps' entry")
    try:
        traps = tuple(int(t) for t in values["traps"].split(",") if t.strip())
        alpha = int(values.get("alpha", DEFAULT_ALPHA))
    except ValueError as exc:
        raise ConfigurationError(f"topology: {exc}") from None
    return DeviceTopology(traps, alpha, values.get("layout", "linear"))


def format_topology(topology: DeviceTopology) -> str:
    return (f"traps = {','.join(map(str, topology.traps))}\n"
            f"alpha = {topology.alpha}\nlayout = {topology.layout}\n")


def load_topology(path) -> DeviceTopology:
    return parse_topology(Path(path).read_text())


def _load_qasm(path: Path, circuit_id: int, name: str, ideal=None, override=None) -> Circuit:
    circ = parse_program(path.read_text(encoding="utf-8"), circuit_id, name, ideal)
    if override:
        circ = Circuit(circ.id, circ.name, circ.width, circ.gates, circ.ideal_outcome, circ.num_clbits,
                       override.get("depth"), override.get("two_qubit_count"))
    return circ


def load_manifest_queue(path) -> list[Circuit]:
    path = Path(path)
    entries = json.loads(path.read_text())["circuits"]
    circuits = []
    for i, e in enumerate(entries):
        src = path.parent / e["path"]
        circuits.append(_load_qasm(src, i, e.get("name") or src.stem, e.get("ideal"), e.get("override")))
    return circuits


def load_queue(path) -> list[Circuit]:
    """A directory of ``*.qasm`` files (lexicographic order) or a manifest."""
    path = Path(path)
    if path.is_dir():
        manifest = path / "manifest.json"
        if manifest.exists():
            return load_manifest_queue(manifest)
        files = sorted(path.glob("*.qasm"))
        if not files:
            raise ConfigurationError(f"no .qasm files in {path}")
        return [_load_qasm(f, i, f.stem) for i, f in enumerate(files)]
    if path.suffix == ".json":
        return load_manifest_queue(path)
    return [_load_qasm(path, 0, path.stem)]


def sample_queue(pool: Sequence[Circuit], n: int, seed: int) -> list[Circuit]:
    """Draw ``n`` circuits uniformly with replacement; ids become 0..n-1.

    Uses ``random.Random(seed).choices``: Mersenne Twister, one
    ``floor(random() * len(pool))`` draw per element.  Draws for a smaller
    ``n`` are a prefix of draws for a larger one.
    """
    if not pool:
        raise ConfigurationError("cannot sample from an empty queue")
    picks = random.Random(seed).choices(range(len(pool)), k=n)
    return [pool[k].with_id(i) for i, k in enumerate(picks)]


def schedule_to_dict(schedule: Schedule, circuits: Iterable[Circuit] = (), metrics: dict | None = None) -> dict:
    t = schedule.topology
    placed = set(schedule.circuit_ids())
    return {
        "format": SCHEDULE_FORMAT,
        "algorithm": schedule.algorithm,
        "topology": {"traps": list(t.traps), "alpha": t.alpha, "layout": t.layout},
        "circuits": [
            {"id": c.id, "name": c.name, "width": c.width, "depth": c.depth,
             "two_qubit_count": c.two_qubit_count, "ideal": c.ideal_outcome}
            for c in sorted(circuits, key=lambda c: c.id) if c.id in placed
        ],
        "batches": [
            {
                "index": b.index,
                "makespan": b.makespan,
                "two_qubit_total": b.two_qubit_total,
                "placements": [
                    {"circuit_id": p.circuit_id, "trap": p.trap_index, "qubit_start": p.qubit_start,
                     "layer_start": p.layer_start, "depth": p.depth, "width": p.width}
                    for p in b.placements
                ],
            }
            for b in schedule.batches
        ],
        "metrics": metrics or {},
    }


def schedule_from_dict(data: dict) -> Schedule:
    if data.get("format") != SCHEDULE_FORMAT:
        raise ConsistencyError(f"not a schedule file (format {data.get('format')!r})")
    td = data["topology"]
    topology = DeviceTopology(tuple(td["traps"]), td["alpha"], td.get("layout", "linear"))
    batches = []
    for b in data["batches"]:
        placements = []
        for p in b["placements"]:
            if not 0 <= p["trap"] < len(topology.traps):
                raise ConsistencyError(f"placement of circuit {p['circuit_id']} names trap {p['trap']}")
            placements.append(Placement(p["circuit_id"], p["trap"], p["qubit_start"], p["layer_start"],
                                        p["width"], p["depth"], topology.trap_base(p["trap"])))
        batch = Batch(b["index"], tuple(placements), b["two_qubit_total"])
        if batch.makespan != b["makespan"]:
            raise ConsistencyError(f"batch {b['index']} makespan {b['makespan']} disagrees with its placements")
        batches.append(batch)
    return Schedule(data["algorithm"], topology, tuple(batches))


def dump_schedule(schedule: Schedule, circuits: Iterable[Circuit] = (), metrics: dict | None = None) -> str:
    return json.dumps(schedule_to_dict(schedule, circuits, metrics), indent=1) + "\n"


def load_schedule(path) -> tuple[Schedule, dict]:
    data = json.loads(Path(path).read_text())
    return schedule_from_dict(data), data
