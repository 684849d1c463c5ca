"""Command-line entry point: ``circpack <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from circpack import benchmarks
from circpack.cluster import schedule_cluster
from circpack.files import (
    dump_schedule,
    load_queue,
    load_schedule,
    load_topology,
    sample_queue,
)
from circpack.metrics import schedule_report, timed_pack
from circpack.model import (
    CircpackError,
    ConfigurationError,
    ConsistencyError,
    DeviceTopology,
    index_circuits,
)
from circpack.packing import PACKERS, get_packer
from circpack.qasm import RegisterSlot, emit_combined, format_counts, pst, read_counts, unbundle
from circpack.render import gantt_svg, gantt_text

BIT_ORDER = "first register leftmost; within a register c[n-1] ... c[0]"
ALGORITHMS = ("serial", "fifo", "skyline", "circpack")


def _topology(args) -> DeviceTopology:
    topo = load_topology(args.topology) if args.topology else DeviceTopology((10, 10))
    if getattr(args, "alpha", None) is not None:
        topo = topo.with_alpha(args.alpha)
    return topo


def _queue(spec: str):
    if spec in ("builtin", "builtin:small"):
        return benchmarks.load_small()
    if spec == "builtin:all":
        return benchmarks.load()
    return load_queue(spec)


def _add_common(p, sample=True):
    p.add_argument("--topology", help="topology file (default: two traps of 10 ions, alpha 170)")
    p.add_argument("--queue", default="builtin:small",
                   help="directory of .qasm files, a manifest .json, or builtin:small / builtin:all")
    p.add_argument("--alpha", type=int, help="override the two-qubit gate cutoff")
    p.add_argument("--seed", type=int, default=0, help="seed for queue sampling")
    if sample:
        p.add_argument("--sample", type=int, metavar="N",
                       help="draw N circuits from the queue uniformly with replacement")


def _fmt_pct(x):
    return "---" if x is None else f"{x:.2f}%"


def cmd_schedule(args) -> int:
    topo = _topology(args)
    circuits = _queue(args.queue)
    if args.sample is not None:
        circuits = sample_queue(circuits, args.sample, args.seed)
    by_id = index_circuits(circuits)
    schedule, seconds = timed_pack(get_packer(args.algo), circuits, topo)
    serial = sum(c.depth for c in circuits)
    report = schedule_report(schedule, by_id, topo, serial, seconds)
    metrics = report.row()
    metrics.pop("seconds")
    if args.out:
        Path(args.out).write_text(dump_schedule(schedule, circuits, metrics))
    if args.svg:
        Path(args.svg).write_text(gantt_svg(schedule, by_id, topo))
    if args.text:
        Path(args.text).write_text(gantt_text(schedule, by_id, topo))
    util = None if report.avg_utilization is None else 100 * report.avg_utilization
    print(f"{report.algorithm}: circuits={report.circuits} makespan={report.makespan} "
          f"batches={len(schedule.batches)} cutoffs={report.cutoffs} shuttles_est={report.shuttles} "
          f"util={_fmt_pct(util)} lrf={report.lrf:.2f}% time={seconds:.4f}s")
    return 0


BENCH_FIELDS = ["size", "algorithm", "makespan", "cutoffs", "shuttles_est", "avg_util_pct", "lrf_pct"]


def bench_rows(pool, topo: DeviceTopology, sizes, seed: int):
    """One report per (size, algorithm); the serial schedule is the LRF reference."""
    rows = []
    for n in sizes:
        queue = sample_queue(pool, n, seed)
        by_id = index_circuits(queue)
        serial_layers = sum(c.depth for c in queue)
        for name in ALGORITHMS:
            schedule, seconds = timed_pack(PACKERS[name], queue, topo)
            rows.append((n, schedule_report(schedule, by_id, topo, serial_layers, seconds)))
    return rows


def cmd_bench(args) -> int:
    topo = _topology(args)
    pool = _queue(args.queue)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench_rows(pool, topo, sizes, args.seed)

    fields = BENCH_FIELDS + (["seconds"] if args.timing else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    table = [["Size", "Algorithm", "Makespan", "Cutoffs", "Shuttles*", "Avg. Util.", "LRF", "Time"]]
    for n, r in rows:
        serial = r.algorithm == "serial"
        lrf_cell = "---" if serial else f"{r.lrf:.2f}"
        util = 100 * r.avg_utilization if r.avg_utilization is not None else None
        record = [n, r.algorithm, r.makespan, r.cutoffs, r.shuttles,
                  "" if util is None else f"{util:.2f}", lrf_cell]
        if args.timing:
            record.append("" if serial else f"{r.seconds:.4f}")
        writer.writerow(record)
        table.append([str(n), r.algorithm, str(r.makespan), str(r.cutoffs), str(r.shuttles),
                      _fmt_pct(util), "---" if serial else f"{r.lrf:.2f}%",
                      "N/A" if serial else f"{r.seconds:.4f} s"])
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    for row in table:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    print("* shuttles estimated as two-qubit gates whose operands sit in different traps")
    if args.csv:
        Path(args.csv).write_text(buf.getvalue())
    return 0


def cmd_cluster(args) -> int:
    if args.workers < 1:
        raise ConfigurationError("--workers must be >= 1")
    topo = _topology(args)
    circuits = sample_queue(_queue(args.queue), args.size, args.seed)
    result = schedule_cluster(circuits, [topo] * args.workers, args.algo, jobs=args.jobs)
    rows = []
    for w, (ids, sched, secs) in enumerate(zip(result.assignment.circuits, result.schedules, result.seconds)):
        util = sched.avg_utilization if sched.total_makespan else None
        rows.append({"worker": w + 1, "circuits": len(ids), "load": result.assignment.loads[w],
                     "makespan": sched.total_makespan, "cutoffs": sched.cutoff_count,
                     "avg_util_pct": None if util is None else 100 * util, "seconds": secs})
    print(f"{'Worker':>6} {'Circuits':>8} {'Load':>8} {'Makespan':>8} {'Cutoffs':>7} {'Avg. Util.':>10} {'Time':>10}")
    for r in rows:
        print(f"{r['worker']:>6} {r['circuits']:>8} {r['load']:>8} {r['makespan']:>8} {r['cutoffs']:>7} "
              f"{_fmt_pct(r['avg_util_pct']):>10} {r['seconds']:>9.4f}s")
    spans = [r["makespan"] for r in rows]
    utils = [r["avg_util_pct"] for r in rows if r["avg_util_pct"] is not None]
    if max(spans) > 0:
        print(f"makespan spread (max-min)/max: {100 * (max(spans) - min(spans)) / max(spans):.2f}%")
    if utils:
        print(f"utilization spread max-min: {max(utils) - min(utils):.2f} percentage points")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    return 0


def _scheduled_circuits(data: dict, queue):
    by_name = {c.name: c for c in queue}
    circuits = {}
    for entry in data["circuits"]:
        src = by_name.get(entry["name"])
        if src is None:
            raise ConsistencyError(f"circuit {entry['name']!r} from the schedule is not in the queue")
        circ = src.with_id(entry["id"])
        if (circ.width, circ.depth) != (entry["width"], entry["depth"]):
            raise ConsistencyError(f"circuit {entry['name']!r} no longer matches the scheduled rectangle")
        circuits[circ.id] = circ
    return circuits


def cmd_combine(args) -> int:
    schedule, data = load_schedule(args.schedule)
    circuits = _scheduled_circuits(data, _queue(args.queue))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    batches = schedule.batches
    if args.batch is not None:
        if not 0 <= args.batch < len(batches):
            raise ConfigurationError(f"batch {args.batch} does not exist ({len(batches)} batches)")
        batches = (batches[args.batch],)
    for batch in batches:
        program = emit_combined(batch, circuits, schedule.topology)
        (out_dir / f"batch_{batch.index}.qasm").write_text(program.text)
        sidecar = {
            "batch_index": batch.index,
            "bit_order": BIT_ORDER,
            "registers": [
                {"circuit_id": r.circuit_id, "creg": r.name, "bits": r.bits,
                 "name": circuits[r.circuit_id].name, "ideal": circuits[r.circuit_id].ideal_outcome}
                for r in program.register_layout
            ],
        }
        (out_dir / f"batch_{batch.index}.layout.json").write_text(json.dumps(sidecar, indent=1) + "\n")
        print(f"batch {batch.index}: {len(batch.placements)} circuits -> {out_dir / f'batch_{batch.index}.qasm'}")
    return 0


def cmd_unbundle(args) -> int:
    counts = read_counts(Path(args.counts).read_text())
    sidecar = json.loads(Path(args.layout).read_text())
    layout = [RegisterSlot(r["circuit_id"], r["creg"], r["bits"]) for r in sidecar["registers"]]
    per_circuit = unbundle(counts, layout)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    print(f"{'Circuit':>7} {'Name':<16} {'Shots':>7} {'PST':>9}")
    for r in sidecar["registers"]:
        cid = r["circuit_id"]
        c = per_circuit[cid]
        if out_dir:
            (out_dir / f"c{cid}.counts").write_text(format_counts(c))
        score = f"{pst(c, r['ideal']):.2f}%" if r.get("ideal") else "-"
        print(f"{cid:>7} {r.get('name', ''):<16} {sum(c.values()):>7} {score:>9}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circpack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="pack a queue onto one device")
    _add_common(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="circpack")
    p.add_argument("--out", help="write the schedule JSON here")
    p.add_argument("--svg", help="write a Gantt chart (SVG) here")
    p.add_argument("--text", help="write a text Gantt grid here")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("bench", help="compare all packers on sampled queues")
    _add_common(p, sample=False)
    p.add_argument("--sizes", default="20,100,150,200")
    p.add_argument("--csv", help="write machine-readable rows here")
    p.add_argument("--timing", action="store_true", help="include wall time in the CSV (not reproducible)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("cluster", help="balance a sampled queue over identical workers")
    _add_common(p, sample=False)
    p.add_argument("--workers", type=int, default=5)
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--algo", choices=ALGORITHMS, default="circpack")
    p.add_argument("--jobs", type=int, default=1, help="pack workers in this many processes")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("combine", help="emit one combined QASM program per batch")
    p.add_argument("--schedule", required=True)
    p.add_argument("--queue", default="builtin:small")
    p.add_argument("--batch", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("unbundle", help="split combined result counts per circuit")
    p.add_argument("--counts", required=True, help="'<bitstring> <count>' lines or a JSON object")
    p.add_argument("--layout", required=True, help="layout sidecar written by combine")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_unbundle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CircpackError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
