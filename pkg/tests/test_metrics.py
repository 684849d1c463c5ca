from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circpack.benchmarks import block_circuit
from circpack.files import sample_queue
from circpack.metrics import (
    avg_utilization,
    estimate_shuttles,
    instantaneous_utilization,
    lrf,
    schedule_report,
    timed_pack,
    utilization_profile,
)
from circpack.model import Batch, DeviceTopology, Placement, Schedule, UndefinedMetricError
from circpack.packing import PACKERS, pack_circpack, pack_fifo, pack_generic_skyline, pack_serial
from circpack.qasm import parse_program

from helpers import occupancy


def test_serial_utilization_of_small_fixtures(small_pool, two_by_ten):
    # Rows 1-8: widths x depths sum to 674 cells over 173 serial layers.
    s = pack_serial(small_pool, two_by_ten)
    assert sum(c.area for c in small_pool) == 674
    assert s.total_makespan == 173
    assert avg_utilization(s, 20) == pytest.approx(674 / 3460, abs=1e-12)
    assert avg_utilization(s, 20) == pytest.approx(0.19480, abs=1e-5)


def test_empty_schedule_utilization_is_undefined():
    with pytest.raises(UndefinedMetricError):
        avg_utilization(Schedule("fifo", DeviceTopology((2,))), 2)


@pytest.mark.parametrize("serial,makespan,expected", [
    (395, 120, 69.62), (395, 91, 76.96), (395, 97, 75.44), (1757, 405, 76.95), (3762, 852, 77.35),
])
def test_lrf_reported_values(serial, makespan, expected):
    assert lrf(serial, makespan) == pytest.approx(expected, abs=0.01)


def test_lrf_edges():
    assert lrf(100, 100) == 0.0
    assert lrf(100, 0) == 100.0
    with pytest.raises(UndefinedMetricError):
        lrf(0, 5)


@pytest.mark.parametrize("name", sorted(PACKERS))
def test_time_average_equals_area_ratio(name, small_pool, two_by_ten):
    q = sample_queue(small_pool, 60, 5)
    s = PACKERS[name](q, two_by_ten)
    T = s.total_makespan
    mean = sum(Fraction(instantaneous_utilization(s, 20, t)).limit_denominator(20) for t in range(T)) / T
    exact = Fraction(sum(c.area for c in q), 20 * T)
    assert mean == exact
    profile = utilization_profile(s, 20)
    assert len(profile) == T
    assert profile == [instantaneous_utilization(s, 20, t) for t in range(T)]


def test_profile_matches_occupancy_grid(small_pool, four_by_five):
    q = sample_queue(small_pool, 80, 9)
    s = pack_circpack(q, four_by_five)
    cols = [grid[:, t].sum() / 20 for grid in occupancy(s, four_by_five) for t in range(grid.shape[1])]
    assert utilization_profile(s, 20) == pytest.approx(cols)


def test_instantaneous_utilization_bounds():
    s = pack_serial([block_circuit(0, 2, 3)], DeviceTopology((4,)))
    assert instantaneous_utilization(s, 4, 0) == 0.5
    with pytest.raises(ValueError):
        instantaneous_utilization(s, 4, 3)


def test_utilization_invariant_under_relabeling(small_pool, two_by_ten):
    q = sample_queue(small_pool, 50, 2)
    s = pack_circpack(q, two_by_ten)
    a = avg_utilization(s, 20)
    assert 0 < a <= 1
    # Ids only break ties, so an order-preserving relabel repacks identically.
    shifted = [c.with_id(3 * c.id + 1000) for c in q]
    assert avg_utilization(pack_circpack(shifted, two_by_ten), 20) == pytest.approx(a, abs=1e-12)
    # Any relabel of a fixed schedule leaves the metric alone.
    swapped = Schedule(s.algorithm, s.topology, tuple(
        Batch(b.index, tuple(Placement(999 - p.circuit_id, p.trap_index, p.qubit_start, p.layer_start,
                                       p.width, p.depth, p.trap_base) for p in b.placements),
              b.two_qubit_total)
        for b in s.batches))
    assert avg_utilization(swapped, 20) == a


# --- shuttle estimate -----------------------------------------------------------

def _four_qubit(cx_pairs):
    body = "".join(f"cx q[{a}],q[{b}];\n" for a, b in cx_pairs)
    return parse_program('OPENQASM 2.0;\nqreg q[4];\nh q[0];\n' + body, 0)


def test_straddling_cx_counts_once():
    topo = DeviceTopology((10, 10))
    c = _four_qubit([(0, 3)])
    s = Schedule("fifo", topo, (Batch(0, (Placement.at(topo, c, 8, 0),)),))
    assert estimate_shuttles(s, {0: c}, topo) == 1


def test_same_trap_pairs_are_free():
    topo = DeviceTopology((10, 10))
    c = _four_qubit([(0, 1), (2, 3), (1, 2)])
    s = Schedule("fifo", topo, (Batch(0, (Placement.at(topo, c, 8, 0),)),))
    # logical 0,1 -> trap 0; 2,3 -> trap 1; only (1, 2) crosses
    assert estimate_shuttles(s, {0: c}, topo) == 1
    s0 = Schedule("fifo", topo, (Batch(0, (Placement.at(topo, c, 0, 0),)),))
    assert estimate_shuttles(s0, {0: c}, topo) == 0


def test_fifo_wide_circuit_crossings():
    topo = DeviceTopology((10, 10))
    pairs = [(9, 10), (0, 11), (5, 6), (3, 15), (10, 9), (11, 2), (12, 13)]
    body = "".join(f"cx q[{a}],q[{b}];\n" for a, b in pairs)
    c = parse_program("OPENQASM 2.0;\nqreg q[16];\n" + body, 0)
    s = pack_fifo([c], topo)
    assert s.placements[0].physical_qubit_start == 0
    assert estimate_shuttles(s, {0: c}, topo) == 5


def test_circpack_never_needs_shuttles(small_pool, two_by_ten, four_by_five):
    for topo in (two_by_ten, four_by_five):
        for seed in range(5):
            q = sample_queue(small_pool, 200, seed)
            by_id = {c.id: c for c in q}
            assert estimate_shuttles(pack_circpack(q, topo), by_id, topo) == 0


# --- report ---------------------------------------------------------------------

def test_serial_report_against_itself(small_pool, two_by_ten):
    s = pack_serial(small_pool, two_by_ten)
    r = schedule_report(s, {c.id: c for c in small_pool}, two_by_ten, s)
    assert r.lrf == 0.0 and r.cutoffs == len(small_pool) == r.circuits
    row = r.row()
    assert row["avg_util_pct"] == pytest.approx(100 * 674 / 3460)
    assert set(row) == {"algorithm", "circuits", "makespan", "cutoffs", "shuttles_est",
                        "avg_util_pct", "lrf_pct", "seconds"}


def test_report_accepts_integer_reference_and_timing(small_pool, two_by_ten):
    q = sample_queue(small_pool, 20, 1)
    s, secs = timed_pack(pack_generic_skyline, q, two_by_ten)
    r = schedule_report(s, {c.id: c for c in q}, two_by_ten, 1000, secs)
    assert r.seconds == secs >= 0
    assert r.lrf == pytest.approx(100 * (1000 - s.total_makespan) / 1000)


@given(st.lists(st.tuples(st.integers(1, 5), st.integers(1, 15)), min_size=1, max_size=20))
@settings(max_examples=100, deadline=None)
def test_utilization_in_unit_interval(shapes):
    topo = DeviceTopology((5, 5), alpha=7)
    circs = [block_circuit(i, w, d, 1 if w > 1 and d > 1 else 0) for i, (w, d) in enumerate(shapes)]
    for packer in PACKERS.values():
        u = avg_utilization(packer(circs, topo), 10)
        assert 0 < u <= 1
