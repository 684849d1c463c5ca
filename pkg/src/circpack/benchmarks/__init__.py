"""Bundled benchmark queue.

The files here are pre-decomposed stand-ins for the 14 benchmark circuits:
each has exactly the width, layer depth and two-qubit gate count recorded
under ``table`` in ``manifest.json`` (measurement counts as a layer).  Gates are drawn from
X, CX, CZ and diagonal phase gates, so every circuit has a single noiseless
outcome, recorded as ``ideal``.

Regenerate with ``python -m circpack.benchmarks``.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from circpack.model import Circuit, Gate, GateKind, MalformedCircuitError

HERE = Path(__file__).parent
MANIFEST = HERE / "manifest.json"

# (id, name, width, depth, two-qubit gates)
TABLE = [
    (1, "grover_n2", 2, 16, 2),
    (2, "fredkin_n3", 3, 19, 8),
    (3, "toffoli_n3", 3, 18, 6),
    (4, "3_17_13", 3, 23, 17),
    (5, "adder_n4", 4, 23, 10),
    (6, "4mod5-v1_22", 5, 13, 11),
    (7, "4gt13_92", 5, 39, 30),
    (8, "mod5mils_65", 5, 22, 16),
    (9, "adder_n10", 10, 142, 65),
    (10, "multiply_n13", 13, 98, 40),
    (11, "bv_n14", 14, 41, 13),
    (12, "multiplier_n15", 15, 574, 246),
    (13, "qec9xz_n17", 17, 53, 32),
    (14, "bigadder_n18", 18, 284, 130),
]
SMALL = tuple(name for i, name, *_ in TABLE if i <= 8)
MEDIUM = tuple(name for i, name, *_ in TABLE if i > 8)

_SPINE_GATES = [("x", None), ("t", None), ("s", None), ("z", None), ("rz", "pi/4"),
                ("tdg", None), ("sdg", None), ("x", None)]


def synthesize_gates(width: int, depth: int, two_qubit: int, seed: str | int = 0) -> list[Gate]:
    """Gate list whose ASAP layering has exactly the requested shape.

    Qubit 0 carries a gate in every layer but the last; the two-qubit gates all
    touch qubit 0 at distinct layers, so no other qubit can run ahead of it.
    The last layer measures every qubit (qubit j into bit j).
    """
    if width < 1 or depth < 1:
        raise MalformedCircuitError("width and depth must be >= 1")
    if two_qubit and width < 2:
        raise MalformedCircuitError("two-qubit gates need width >= 2")
    body = depth - 1  # layers before the measurement layer
    if two_qubit > body:
        raise MalformedCircuitError(f"cannot fit {two_qubit} two-qubit gates in {body} layers")
    rng = random.Random(seed)
    preset = width > 1 and two_qubit <= body - 1
    first = 1 if preset else 0
    slots = body - first
    tq_layers = {first + (i * slots) // two_qubit for i in range(two_qubit)} if two_qubit else set()
    gates: list[Gate] = []
    if preset:
        for j in range(1, width):
            if rng.random() < 0.5:
                gates.append(Gate(GateKind.ONE_QUBIT, "x", (j,)))
    partner = 0
    for layer in range(body):
        if layer in tq_layers:
            j = 1 + partner % (width - 1)
            partner += 1
            kind = rng.choice(("cx", "xc", "cz"))
            ops = (j, 0) if kind == "xc" else (0, j)
            gates.append(Gate(GateKind.TWO_QUBIT, "cz" if kind == "cz" else "cx", ops))
        else:
            name, params = _SPINE_GATES[rng.randrange(len(_SPINE_GATES))]
            gates.append(Gate(GateKind.ONE_QUBIT, name, (0,), params))
    gates.extend(Gate(GateKind.MEASURE, "measure", (j,), None, j) for j in range(width))
    return gates


def classical_outcome(gates, width: int, num_clbits: int | None = None) -> str:
    """Noiseless outcome of a circuit built from X/CX/SWAP and diagonal gates.

    Returned most-significant bit first (``c[n-1] ... c[0]``).
    """
    state = [0] * width
    bits = [0] * (num_clbits if num_clbits is not None else width)
    for g in gates:
        if g.kind is GateKind.MEASURE:
            bits[g.clbit] = state[g.qubits[0]]
        elif g.kind is GateKind.RESET:
            state[g.qubits[0]] = 0
        elif g.name == "x":
            state[g.qubits[0]] ^= 1
        elif g.name in ("cx", "CX"):
            state[g.qubits[1]] ^= state[g.qubits[0]]
        elif g.name == "swap":
            a, b = g.qubits
            state[a], state[b] = state[b], state[a]
        elif g.name not in ("cz", "z", "s", "sdg", "t", "tdg", "rz", "u1", "p", "id", "barrier"):
            raise ValueError(f"{g.name} is not a classical or diagonal gate")
    return "".join(str(b) for b in reversed(bits))


def block_circuit(circuit_id: int, width: int, depth: int, two_qubit: int = 0, name: str | None = None) -> Circuit:
    """A synthetic circuit with the given rectangle and two-qubit gate count."""
    gates = synthesize_gates(width, depth, two_qubit, seed=f"block-{width}-{depth}-{two_qubit}")
    return Circuit(circuit_id, name or f"block_{width}x{depth}", width, tuple(gates), num_clbits=width)


def load_manifest() -> list[dict]:
    return json.loads(MANIFEST.read_text())["circuits"]


def load(names=None) -> list[Circuit]:
    """Parse bundled benchmarks (all, or the given names) with ids 0..n-1."""
    from circpack.files import load_manifest_queue

    circuits = load_manifest_queue(MANIFEST)
    if names is not None:
        wanted = list(names)
        by_name = {c.name: c for c in circuits}
        circuits = [by_name[n].with_id(i) for i, n in enumerate(wanted)]
    return circuits


def load_small() -> list[Circuit]:
    return load(SMALL)


def write_fixtures(directory: Path = HERE) -> None:
    from circpack.qasm import emit_program

    entries = []
    for bid, name, width, depth, tq in TABLE:
        gates = synthesize_gates(width, depth, tq, seed=name)
        circ = Circuit(bid, name, width, tuple(gates), num_clbits=width)
        assert (circ.depth, circ.two_qubit_count) == (depth, tq), name
        fname = f"{bid:02d}_{name}.qasm"
        (directory / fname).write_text(emit_program(circ))
        entries.append({
            "path": fname,
            "name": name,
            "benchmark_id": bid,
            "ideal": classical_outcome(gates, width),
            "table": {"width": width, "depth": depth, "two_qubit_count": tq},
        })
    (directory / "manifest.json").write_text(json.dumps({"circuits": entries}, indent=2) + "\n")
