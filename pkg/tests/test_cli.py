import json
import subprocess
import sys

from circpack.cli import main
from circpack.files import load_schedule
from circpack.qasm import parse_program, read_counts


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_schedule_small_fixtures(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, text, _ = run(capsys, "schedule", "--out", str(out), "--svg", str(tmp_path / "g.svg"),
                        "--text", str(tmp_path / "g.txt"))
    assert code == 0
    sched, data = load_schedule(out)
    assert len(sched.batches) == 1 and sched.cutoff_count == 0
    assert data["metrics"]["shuttles_est"] == 0
    assert len(sched.placements) == 8
    assert "cutoffs=0" in text and "shuttles_est=0" in text
    assert (tmp_path / "g.svg").read_text().count("<rect") == 8
    assert (tmp_path / "g.txt").read_text().startswith("q0")


def test_serial_cutoffs_equal_queue_length(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run(capsys, "schedule", "--algo", "serial", "--sample", "30", "--out", str(out))[0] == 0
    sched, _ = load_schedule(out)
    assert sched.cutoff_count == 30


def test_alpha_one_separates_entangling_circuits(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run(capsys, "schedule", "--alpha", "1", "--out", str(out))[0] == 0
    sched, data = load_schedule(out)
    assert data["topology"]["alpha"] == 1
    assert len(sched.batches) == 8


def test_topology_file(tmp_path, capsys):
    topo = tmp_path / "t.txt"
    topo.write_text("traps = 5,5,5,5\nalpha = 170\n")
    out = tmp_path / "s.json"
    assert run(capsys, "schedule", "--topology", str(topo), "--out", str(out))[0] == 0
    sched, _ = load_schedule(out)
    assert sched.topology.traps == (5, 5, 5, 5)


def test_bench_csv_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "bench", "--sizes", "20,60", "--csv", str(a))[0] == 0
    code, text, _ = run(capsys, "bench", "--sizes", "20,60", "--csv", str(b))
    assert code == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "size,algorithm,makespan,cutoffs,shuttles_est,avg_util_pct,lrf_pct"
    assert len(lines) == 1 + 2 * 4
    serial = [line for line in lines if ",serial," in line]
    assert all(line.endswith(",---") for line in serial)
    assert "Shuttles*" in text


def test_bench_timing_column(tmp_path, capsys):
    path = tmp_path / "t.csv"
    assert run(capsys, "bench", "--sizes", "20", "--csv", str(path), "--timing")[0] == 0
    assert path.read_text().splitlines()[0].endswith(",seconds")


def test_cluster_summary(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, text, _ = run(capsys, "cluster", "--workers", "3", "--size", "150", "--csv", str(path))
    assert code == 0
    assert "makespan spread" in text
    rows = path.read_text().splitlines()
    assert len(rows) == 4
    assert sum(int(r.split(",")[1]) for r in rows[1:]) == 150


def test_combine_and_unbundle_end_to_end(tmp_path, capsys):
    sched_path = tmp_path / "s.json"
    assert run(capsys, "schedule", "--alpha", "40", "--out", str(sched_path))[0] == 0
    sched, data = load_schedule(sched_path)
    assert len(sched.batches) > 1
    out_dir = tmp_path / "combined"
    assert run(capsys, "combine", "--schedule", str(sched_path), "--out-dir", str(out_dir))[0] == 0
    ideals = {c["id"]: c["ideal"] for c in data["circuits"]}
    for batch in sched.batches:
        program = parse_program((out_dir / f"batch_{batch.index}.qasm").read_text())
        sidecar = json.loads((out_dir / f"batch_{batch.index}.layout.json").read_text())
        regs = sidecar["registers"]
        assert program.num_clbits == sum(r["bits"] for r in regs)
        assert [r["circuit_id"] for r in regs] == sorted(r["circuit_id"] for r in regs)
        # A noiseless run returns every circuit's ideal outcome, concatenated.
        perfect = "".join(ideals[r["circuit_id"]] for r in regs)
        noisy = perfect[:-1] + ("1" if perfect[-1] == "0" else "0")
        counts = tmp_path / f"counts_{batch.index}.txt"
        counts.write_text(f"{perfect} 900\n{noisy} 124\n")
        per = tmp_path / f"per_{batch.index}"
        code, text, _ = run(capsys, "unbundle", "--counts", str(counts),
                            "--layout", str(out_dir / f"batch_{batch.index}.layout.json"), "--out-dir", str(per))
        assert code == 0
        for r in regs:
            got = read_counts((per / f"c{r['circuit_id']}.counts").read_text())
            assert sum(got.values()) == 1024
        assert "87.89%" in text


def test_combine_single_batch_and_bad_index(tmp_path, capsys):
    sched_path = tmp_path / "s.json"
    run(capsys, "schedule", "--out", str(sched_path))
    assert run(capsys, "combine", "--schedule", str(sched_path), "--batch", "0", "--out-dir", str(tmp_path / "o"))[0] == 0
    code, _, err = run(capsys, "combine", "--schedule", str(sched_path), "--batch", "4", "--out-dir", str(tmp_path / "o"))
    assert code == 1 and "batch 4" in err


def test_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text('OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n')
    code, _, err = run(capsys, "schedule", "--queue", str(bad))
    assert code == 1 and "ccx" in err
    code, _, err = run(capsys, "schedule", "--queue", str(tmp_path / "missing"))
    assert code == 1
    wide = tmp_path / "wide.qasm"
    wide.write_text('OPENQASM 2.0;\nqreg q[12];\nh q[11];\n')
    code, _, err = run(capsys, "schedule", "--queue", str(wide))
    assert code == 1 and "12" in err
    assert run(capsys, "schedule", "--queue", str(wide), "--algo", "fifo")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "circpack", "schedule", "--sample", "10"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("circpack:")
