"""Exit criteria for the planner comparison, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import random
import statistics
import time

import pytest

from conftest import record_criterion, record_note
from sarplan.bench import PAPER_TABLE4, bench
from sarplan.coverage import coverage_fraction, lawn_mower_grid
from sarplan.geometry import Geofence, Point2D, contains
from sarplan.planners import STEP_FUNCTIONS, PlannerConfig, PlannerState
from sarplan.routing import (
    Optimality,
    branch_and_bound_path,
    brute_force_path,
    exact_path,
    held_karp_path,
    nn_path,
)
from sarplan.simulator import gap_closure, generate_scenario, table4_fence

pytestmark = pytest.mark.slow

N_SEEDS = 50
N_ROIS = 25
DELTA = 50.0
PLANNERS = ("NNH", "LIG", "OPT")


class TraceAudit:
    """Collects invariant violations over every mission trace it is shown."""

    def __init__(self):
        self.missions = 0
        self.rows = 0
        self.violations: list[str] = []

    def __call__(self, scenario, metrics, trace):
        self.missions += 1
        self.rows += len(trace.rows)
        tag = f"seed {scenario.rng_seed} {metrics.planner}"
        plan = scenario.coverage_plan().waypoints
        fence = scenario.fence
        bad = self.violations.append

        prev = None
        episode_grid = None
        rejoin_points: list[tuple[float, float]] = []
        for row in trace.rows:
            if (row.mode == "SERVICE") != (row.pending > 0):
                bad(f"{tag} step {row.step}: mode {row.mode} with {row.pending} pending")
            if not contains(fence, Point2D(row.x, row.y)):
                bad(f"{tag} step {row.step}: outside fence")
            if prev is not None and not row.t > prev.t:
                bad(f"{tag} step {row.step}: time not increasing")
            if row.mode == "SERVICE":
                if episode_grid is None:
                    episode_grid = prev.grid_index if prev is not None else row.grid_index
                    rejoin_points.append((row.x, row.y))
                elif row.grid_index != episode_grid:
                    bad(f"{tag} step {row.step}: grid index moved during SERVICE")
            elif episode_grid is not None:
                g = row.grid_index
                target = (row.target_x, row.target_y)
                allowed = set(rejoin_points)
                if g < len(plan):
                    allowed.add((plan[g].x, plan[g].y))
                if g != episode_grid or (row.target_x is not None and target not in allowed):
                    bad(f"{tag} step {row.step}: sweep resumed at index {g} "
                        f"target {target}, expected index {episode_grid}")
                episode_grid = None
            if "rejoin" in row.events.split(";"):
                rejoin_points.clear()
            prev = row

        for roi in trace.rois:
            if roi.detect_time is not None and roi.service_time is None:
                bad(f"{tag}: ROI {roi.id} detected but never serviced")


@pytest.fixture(scope="module")
def audit():
    return TraceAudit()


@pytest.fixture(scope="module")
def dynamic_run(audit):
    t0 = time.perf_counter()
    report = bench(N_SEEDS, N_ROIS, table4_fence(), PLANNERS, PlannerConfig(),
                   delta=DELTA, sensor_radius=DELTA / 2, speed=5.0, on_mission=audit)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="module")
def literal_run(audit):
    return bench(N_SEEDS, N_ROIS, table4_fence(), PLANNERS,
                 PlannerConfig(batch_order="literal-nn"), delta=DELTA,
                 sensor_radius=DELTA / 2, speed=5.0, on_mission=audit)


@pytest.fixture(scope="module")
def static_run():
    return bench(N_SEEDS, N_ROIS, table4_fence(), PLANNERS, PlannerConfig(), delta=DELTA,
                 speed=5.0, reveal_all=True)


def _times(report):
    # incomplete missions count as never finishing
    out = {}
    for r in report.rows:
        t = r.mission_time_s if r.mission_time_s is not None else math.inf
        out.setdefault(r.seed, {})[r.planner] = t
    return out


def _fmt_means(report):
    agg = report.aggregates["planners"]
    def show(v):
        return "n/a" if v is None else f"{v:.1f}"

    return ", ".join(f"{p} {show(agg[p]['mean_time_s'])} s "
                     f"(paper {PAPER_TABLE4[p]['time_s']:.0f})" for p in PLANNERS)


def test_criterion_1_planner_ordering(dynamic_run, static_run):
    report, elapsed = dynamic_run
    per_seed = _times(report)
    t_opt, t_lig, t_nnh = (statistics.fmean(s[p] for s in per_seed.values())
                           for p in ("OPT", "LIG", "NNH"))
    n = len(per_seed)
    opt_le_nnh = sum(s["OPT"] <= s["NNH"] for s in per_seed.values())
    lig_le_nnh = sum(s["LIG"] <= s["NNH"] for s in per_seed.values())
    ties = sum(s["OPT"] == s["LIG"] == s["NNH"] for s in per_seed.values())
    ok = (report.all_complete and n == N_SEEDS
          and t_opt <= t_lig <= t_nnh
          and opt_le_nnh == n and lig_le_nnh >= 0.9 * n
          and elapsed < 120.0)
    record_criterion(1, ok, f"means {_fmt_means(report)}; OPT<=NNH on {opt_le_nnh}/{n}, "
                            f"LIG<=NNH on {lig_le_nnh}/{n}; {ties}/{n} seeds tie on all "
                            f"three; {elapsed:.1f} s")
    record_note(f"static reading (all ROIs known at t=0): {_fmt_means(static_run)}")
    assert report.all_complete
    assert n == N_SEEDS
    assert t_opt <= t_lig <= t_nnh
    assert opt_le_nnh == n
    assert lig_le_nnh >= 0.9 * n
    assert elapsed < 120.0


def test_criterion_2_gap_closure(dynamic_run, literal_run, static_run):
    report, _ = dynamic_run
    paper_point = gap_closure(415, 355, 342)
    gc = report.aggregates["gap_closure"]
    lit = literal_run.aggregates["gap_closure"]
    st = static_run.aggregates["gap_closure"]
    mean = gc["mean"]
    ok = mean is not None and 0.5 <= mean <= 1.0 and round(paper_point, 3) == 0.822

    def show(v):
        return "undefined" if v is None else f"{v:.3f}"

    record_criterion(2, ok, f"exact-k mean gap closure {show(mean)} over {gc['n_defined']} "
                            f"seeds with T_NNH > T_OPT (of {N_SEEDS}); paper point value "
                            f"{paper_point:.3f}")
    record_note(f"literal-nn mean gap closure {show(lit['mean'])} over {lit['n_defined']} seeds")
    record_note(f"static reading: exact-k mean {show(st['mean'])} over {st['n_defined']} "
                f"seeds, of mean times {show(st['of_means'])}")
    assert round(paper_point, 3) == 0.822
    assert mean is not None, "gap closure undefined: NNH and OPT tie on every seed"
    assert 0.5 <= mean <= 1.0


def test_criterion_3_exact_solver_oracles():
    rng = random.Random(3)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n = rng.randint(2, 8)
        start = Point2D(rng.uniform(0, 600), rng.uniform(0, 400))
        targets = [Point2D(rng.uniform(0, 600), rng.uniform(0, 400)) for _ in range(n)]
        mismatches += exact_path(start, targets).length != brute_force_path(start, targets).length
    worst = 0.0
    unproven = 0
    for _ in range(50):
        n = rng.randint(9, 15)
        start = Point2D(rng.uniform(0, 600), rng.uniform(0, 400))
        targets = [Point2D(rng.uniform(0, 600), rng.uniform(0, 400)) for _ in range(n)]
        hk = held_karp_path(start, targets)
        bb = branch_and_bound_path(start, targets, budget=10.0)
        unproven += bb.optimality is not Optimality.PROVEN_OPTIMAL
        worst = max(worst, abs(hk.length - bb.length) / hk.length)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and worst <= 1e-9 and unproven == 0 and elapsed < 60
    record_criterion(3, ok, f"{mismatches}/200 exact-vs-brute mismatches; worst HK vs B&B "
                            f"relative gap {worst:.1e} over 50; {elapsed:.1f} s")
    assert mismatches == 0
    assert unproven == 0
    assert worst <= 1e-9
    assert elapsed < 60


def test_criterion_4_replan_latency():
    fence = table4_fence()
    plan = lawn_mower_grid(fence, DELTA)
    cfg = PlannerConfig()
    samples = {p: [] for p in PLANNERS}
    for seed in range(15):
        sc = generate_scenario(1000 + seed, N_ROIS, fence)
        q = sc.start_position()
        for name in PLANNERS:
            step = STEP_FUNCTIONS[name]
            repeats = 1 if name == "OPT" else 7
            for _ in range(repeats):
                state = PlannerState()
                t0 = time.perf_counter()
                state, _ = step(state, q, list(sc.rois), plan, fence, cfg)
                samples[name].append(time.perf_counter() - t0)
                assert len(state.pending) == N_ROIS
    med = {p: 1e3 * statistics.median(v) for p, v in samples.items()}
    ok = med["NNH"] <= med["LIG"] < med["OPT"] and med["LIG"] < 5.0
    record_criterion(4, ok, "median replan latency with 25 pending: " + ", ".join(
        f"{p} {med[p]:.3f} ms (paper {PAPER_TABLE4[p]['latency_ms']:.0f})" for p in PLANNERS))
    assert med["NNH"] <= med["LIG"] < med["OPT"]
    assert med["LIG"] < 5.0


RECTANGLES = [(600, 400, 50), (100, 40, 20), (250, 130, 30), (73, 61, 12), (1000, 200, 40),
              (45, 45, 45)]


def test_criterion_5_coverage_guarantee():
    fractions = []
    for w, h, delta in RECTANGLES:
        fence = Geofence.rectangle(0, 0, w, h)
        plan = lawn_mower_grid(fence, delta)
        fractions.append(coverage_fraction(plan, fence, delta / 2, cell=1.0))
    ok = all(f == 1.0 for f in fractions)
    record_criterion(5, ok, f"coverage at 1 m raster on {len(RECTANGLES)} rectangles: "
                            + ", ".join(f"{f:.4f}" for f in fractions))
    assert ok


def test_criterion_6_trace_invariants(dynamic_run, literal_run, audit):
    empty = TraceAudit()
    sweeps_match = []

    def no_detection(scenario, metrics, trace):
        empty(scenario, metrics, trace)
        plan = scenario.coverage_plan().waypoints
        targets = []
        for row in trace.rows:
            t = (row.target_x, row.target_y)
            if row.target_x is not None and (not targets or targets[-1] != t):
                targets.append(t)
        sweeps_match.append(targets == [(p.x, p.y) for p in plan[1:]]
                            and all(r.mode == "SWEEP" for r in trace.rows))

    bench(3, 0, table4_fence(), PLANNERS, PlannerConfig(), delta=DELTA, on_mission=no_detection)
    violations = audit.violations + empty.violations
    ok = not violations and all(sweeps_match) and audit.missions == 2 * 3 * N_SEEDS
    record_criterion(6, ok, f"{audit.missions} benchmark traces ({audit.rows} steps): "
                            f"{len(violations)} violations; no-detection missions reproduce "
                            f"the sweep {sum(sweeps_match)}/{len(sweeps_match)}")
    assert not violations, violations[:10]
    assert all(sweeps_match)


def test_criterion_7_determinism(tmp_path):
    from sarplan.cli import main

    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["bench", "--seeds", "10", "--seed", "7", "--traces", "--no-plot",
                     "--out", str(out)]) == 0
    files_a = sorted(p.name for p in (a / "traces").glob("*.csv"))
    files_b = sorted(p.name for p in (b / "traces").glob("*.csv"))
    same = [(a / "traces" / f).read_bytes() == (b / "traces" / f).read_bytes() for f in files_a]
    ok = files_a == files_b and len(files_a) == 30 and all(same)
    record_criterion(7, ok, f"{sum(same)}/{len(files_a)} trace CSVs byte-identical across "
                            "two bench runs")
    assert ok


def test_criterion_8_nn_degradation_report():
    rng = random.Random(8)
    start = lawn_mower_grid(table4_fence(), DELTA).waypoints[0]
    excess = []
    truncated = 0
    for _ in range(N_SEEDS):
        targets = [Point2D(rng.uniform(0, 600), rng.uniform(0, 400)) for _ in range(N_ROIS)]
        opt = exact_path(start, targets, budget=5.0)
        truncated += opt.optimality is Optimality.BUDGET_TRUNCATED
        excess.append(nn_path(start, targets).length / opt.length - 1)
    mean = statistics.fmean(excess)
    in_band = 0.10 <= mean <= 0.20
    record_criterion(8, True, f"report only: mean NN tour excess over exact {mean:.1%} on "
                              f"{N_SEEDS} static 25-target instances ({'inside' if in_band else 'outside'} "
                              f"the 10-20% band; {truncated} truncated solves)")
    assert mean > 0
