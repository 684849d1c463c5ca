"""OpenQASM 2.0 subset: parsing, combined-program emission, result unbundling.

Result bitstrings use one fixed convention: the register of the first entry in
the register layout is the leftmost field, and within a register bits are
written most-significant first (``c[n-1] ... c[0]``).
"""
from __future__ import annotations

import bisect
import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from circpack.model import (
    Batch,
    Circuit,
    CircpackError,
    ConsistencyError,
    DeviceTopology,
    Gate,
    GateKind,
    MalformedCircuitError,
)

ONE_QUBIT_GATES = frozenset(
    "u0 u1 u2 u3 u U p rx ry rz h x y z s sdg t tdg id sx sxdg".split()
)
TWO_QUBIT_GATES = frozenset(
    "cx CX cy cz ch swap rzz rxx ryy crx cry crz cu1 cp cu3 cu csx".split()
)
MULTI_QUBIT_GATES = frozenset("ccx cswap c3x c4x rccx rc3x c3sqrtx mcx".split())


class QasmError(CircpackError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class QasmSyntaxError(QasmError):
    pass


class UnsupportedGateError(QasmError):
    pass


class UnsupportedStructureError(QasmError):
    pass


class MalformedResultsError(CircpackError, ValueError):
    pass


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_ARG = re.compile(rf"^({_IDENT})\s*(?:\[\s*(\d+)\s*\])?$")
_GATE_CALL = re.compile(rf"^({_IDENT})\s*(?:\((.*)\))?\s*(.*)$", re.DOTALL)
_REG_DECL = re.compile(rf"^(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_INCLUDE = re.compile(r'^include\s+"[^"]*"$')
_HEADER = re.compile(r"^OPENQASM\s+(\S+)$")


def _statements(text: str):
    """Yield ``(statement, offset)`` with comments removed; offset is the
    index of the statement's first non-blank character."""
    buf: list[str] = []
    start = None
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "/" and text.startswith("//", i):
            nl = text.find("\n", i)
            i = n if nl < 0 else nl
            continue
        if ch == ";":
            yield "".join(buf).strip(), start if start is not None else i
            buf, start = [], None
        elif ch == "{":
            # gate bodies are rejected, but report them at their start
            yield "".join(buf).strip() + " {", start if start is not None else i
            return
        else:
            if start is None and not ch.isspace():
                start = i
            buf.append(ch)
        i += 1
    rest = "".join(buf).strip()
    if rest:
        yield rest, -1 - (start or 0)  # unterminated


class _Locator:
    def __init__(self, text: str):
        self.starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def __call__(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.starts, offset) - 1
        return line + 1, offset - self.starts[line] + 1


def parse_program(text: str, circuit_id: int = 0, name: str = "",
                  ideal_outcome: str | None = None) -> Circuit:
    """Parse an OpenQASM 2.0 program with one quantum register into a Circuit."""
    locate = _Locator(text)
    qreg: tuple[str, int] | None = None
    cregs: dict[str, tuple[int, int]] = {}  # name -> (flat offset, size)
    n_clbits = 0
    gates: list[Gate] = []
    seen_header = False

    for stmt, offset in _statements(text):
        line, col = locate(abs(offset) if offset >= 0 else -1 - offset)
        if offset < 0:
            raise QasmSyntaxError("missing ';' at end of statement", line, col)
        if not stmt:
            continue

        def fail(cls, msg):
            raise cls(msg, line, col)

        if not seen_header:
            m = _HEADER.match(stmt)
            if not m:
                fail(QasmSyntaxError, 'program must start with "OPENQASM 2.0;"')
            if m.group(1) not in ("2.0", "2"):
                fail(UnsupportedStructureError, f"only OpenQASM 2.0 is supported, got {m.group(1)}")
            seen_header = True
            continue
        if _INCLUDE.match(stmt):
            continue
        head = stmt.split(None, 1)[0].split("(", 1)[0]
        if head in ("gate", "opaque"):
            fail(UnsupportedStructureError, "custom gate definitions are not supported; inline them upstream")
        if head == "if" or stmt.startswith("if("):
            fail(UnsupportedStructureError, "classically controlled operations are not supported")
        m = _REG_DECL.match(stmt)
        if m:
            kind, reg, size = m.group(1), m.group(2), int(m.group(3))
            if size < 1:
                fail(QasmSyntaxError, f"register {reg} must have size >= 1")
            if reg == (qreg[0] if qreg else None) or reg in cregs:
                fail(QasmSyntaxError, f"register {reg} declared twice")
            if kind == "qreg":
                if qreg is not None:
                    fail(UnsupportedStructureError, "only a single qreg is supported; flatten registers upstream")
                qreg = (reg, size)
            else:
                cregs[reg] = (n_clbits, size)
                n_clbits += size
            continue

        if head == "measure":
            body = stmt[len("measure"):]
            if "->" not in body:
                fail(QasmSyntaxError, "measure needs '-> creg'")
            src, dst = (s.strip() for s in body.split("->", 1))
            qs = _qubit_arg(src, qreg, fail)
            cs = _clbit_arg(dst, cregs, fail)
            if len(qs) != len(cs):
                fail(QasmSyntaxError, "measure register sizes differ")
            gates.extend(Gate(GateKind.MEASURE, "measure", (q,), None, c) for q, c in zip(qs, cs))
            continue

        m = _GATE_CALL.match(stmt)
        if not m:
            fail(QasmSyntaxError, f"cannot parse statement {stmt!r}")
        gname, params, argtext = m.group(1), m.group(2), m.group(3).strip()
        if params is not None:
            params = " ".join(params.split())
        if not argtext:
            fail(QasmSyntaxError, f"{gname} has no operands")
        args = [_qubit_arg(a.strip(), qreg, fail) for a in argtext.split(",")]

        if gname == "barrier":
            qs = sorted({q for a in args for q in a})
            gates.append(Gate(GateKind.BARRIER, "barrier", tuple(qs)))
            continue
        if gname == "reset":
            kind, arity = GateKind.RESET, 1
        elif gname in ONE_QUBIT_GATES:
            kind, arity = GateKind.ONE_QUBIT, 1
        elif gname in TWO_QUBIT_GATES:
            kind, arity = GateKind.TWO_QUBIT, 2
        elif gname in MULTI_QUBIT_GATES or len(args) >= 3:
            fail(UnsupportedGateError,
                 f"gate {gname!r} acts on {len(args)} qubits; pre-decompose the circuit "
                 "into one- and two-qubit gates")
        else:
            fail(UnsupportedGateError, f"unknown gate {gname!r}")
        if len(args) != arity:
            fail(QasmSyntaxError, f"{gname} takes {arity} operand(s), got {len(args)}")
        for operands in _broadcast(args, fail):
            try:
                gates.append(Gate(kind, gname, operands, params))
            except MalformedCircuitError as exc:
                fail(QasmSyntaxError, str(exc))

    if not seen_header:
        raise QasmSyntaxError('program must start with "OPENQASM 2.0;"', 1, 1)
    if qreg is None:
        raise UnsupportedStructureError("program declares no qreg")
    if not gates:
        raise MalformedCircuitError(f"program {name!r} contains no operations")
    return Circuit(circuit_id, name, qreg[1], tuple(gates), ideal_outcome, n_clbits)


def _qubit_arg(arg: str, qreg, fail) -> list[int]:
    m = _ARG.match(arg)
    if not m:
        fail(QasmSyntaxError, f"bad operand {arg!r}")
    if qreg is None or m.group(1) != qreg[0]:
        fail(QasmSyntaxError, f"unknown quantum register {m.group(1)!r}")
    if m.group(2) is None:
        return list(range(qreg[1]))
    idx = int(m.group(2))
    if idx >= qreg[1]:
        fail(QasmSyntaxError, f"index {idx} out of range for {qreg[0]}[{qreg[1]}]")
    return [idx]


def _clbit_arg(arg: str, cregs, fail) -> list[int]:
    m = _ARG.match(arg)
    if not m or m.group(1) not in cregs:
        fail(QasmSyntaxError, f"unknown classical register in {arg!r}")
    base, size = cregs[m.group(1)]
    if m.group(2) is None:
        return [base + i for i in range(size)]
    idx = int(m.group(2))
    if idx >= size:
        fail(QasmSyntaxError, f"index {idx} out of range for {m.group(1)}[{size}]")
    return [base + idx]


def _broadcast(args: list[list[int]], fail):
    sizes = {len(a) for a in args if len(a) > 1}
    if len(sizes) > 1:
        fail(QasmSyntaxError, "register operands have different sizes")
    n = sizes.pop() if sizes else 1
    for i in range(n):
        yield tuple(a[i] if len(a) > 1 else a[0] for a in args)


def format_gate(gate: Gate, reg: str = "q", creg: str = "c") -> str:
    if gate.kind is GateKind.MEASURE:
        return f"measure {reg}[{gate.qubits[0]}] -> {creg}[{gate.clbit}];"
    ops = ",".join(f"{reg}[{q}]" for q in gate.qubits)
    head = gate.name if gate.params is None else f"{gate.name}({gate.params})"
    return f"{head} {ops};"


def emit_program(circuit: Circuit) -> str:
    """Standalone QASM text for one circuit (single creg ``c``)."""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.width}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    lines.extend(format_gate(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RegisterSlot:
    circuit_id: int
    name: str
    bits: int


@dataclass(frozen=True)
class CombinedProgram:
    text: str
    register_layout: tuple[RegisterSlot, ...]
    batch_index: int

    @property
    def total_bits(self) -> int:
        return sum(r.bits for r in self.register_layout)


def emit_combined(batch: Batch, circuits: Mapping[int, Circuit], topology: DeviceTopology) -> CombinedProgram:
    """Merge every placement of ``batch`` into one program.

    Gates go out in global layer order (ties: circuit id, then source order).
    Logical qubit k of a placed circuit becomes physical qubit
    ``physical_qubit_start + k``; each circuit measures into its own register
    ``c<id>``, and every measure is followed by a reset of the same qubit.
    """
    items = []
    layout = []
    for p in sorted(batch.placements, key=lambda p: p.circuit_id):
        circ = circuits.get(p.circuit_id)
        if circ is None:
            raise ConsistencyError(f"batch {batch.index} references unknown circuit {p.circuit_id}")
        lo, hi = p.physical_qubit_start, p.physical_qubit_start + circ.width
        if lo < 0 or hi > topology.total_qubits:
            raise ConsistencyError(
                f"circuit {circ.id} placed on qubits [{lo}, {hi}) outside device of {topology.total_qubits}"
            )
        if circ.natural_depth > p.depth:
            raise ConsistencyError(
                f"circuit {circ.id} needs {circ.natural_depth} layers but was placed for {p.depth}"
            )
        if circ.num_clbits:
            layout.append(RegisterSlot(circ.id, f"c{circ.id}", circ.num_clbits))
        for src, (gate, layer) in enumerate(zip(circ.gates, circ.layer_of)):
            items.append((p.layer_start + layer, circ.id, src, gate.shifted(lo)))
    items.sort(key=lambda it: it[:3])

    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{topology.total_qubits}];"]
    lines.extend(f"creg {r.name}[{r.bits}];" for r in layout)
    for _, cid, _, gate in items:
        lines.append(format_gate(gate, creg=f"c{cid}"))
        if gate.kind is GateKind.MEASURE:
            lines.append(f"reset q[{gate.qubits[0]}];")
    return CombinedProgram("\n".join(lines) + "\n", tuple(layout), batch.index)


def unbundle(counts: Mapping[str, int], layout: Sequence[RegisterSlot]) -> dict[int, dict[str, int]]:
    """Split combined-result counts into per-circuit marginal counts."""
    total = sum(r.bits for r in layout)
    out: dict[int, Counter] = {r.circuit_id: Counter() for r in layout}
    for key, n in counts.items():
        bits = "".join(key.split())
        if len(bits) != total:
            raise MalformedResultsError(
                f"result key {key!r} has {len(bits)} bits, layout expects {total}"
            )
        if set(bits) - {"0", "1"}:
            raise MalformedResultsError(f"result key {key!r} is not a bitstring")
        pos = 0
        for r in layout:
            out[r.circuit_id][bits[pos:pos + r.bits]] += n
            pos += r.bits
    return {cid: dict(c) for cid, c in out.items()}


def pst(counts: Mapping[str, int], ideal: str) -> float:
    """Percentage of shots that returned ``ideal``."""
    shots = sum(counts.values())
    if shots <= 0:
        raise MalformedResultsError("no shots recorded")
    return 100.0 * counts.get(ideal, 0) / shots


def read_counts(text: str) -> dict[str, int]:
    """Counts file: a JSON object, or lines of ``<bitstring> <count>``."""
    stripped = text.strip()
    if stripped.startswith("{"):
        raw = json.loads(stripped)
        return {str(k): int(v) for k, v in raw.items()}
    counts: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedResultsError(f"line {lineno}: expected '<bitstring> <count>'")
        try:
            counts[parts[0]] = counts.get(parts[0], 0) + int(parts[1])
        except ValueError:
            raise MalformedResultsError(f"line {lineno}: bad count {parts[1]!r}") from None
    return counts


def format_counts(counts: Mapping[str, int]) -> str:
    return "".join(f"{k} {counts[k]}\n" for k in sorted(counts))
