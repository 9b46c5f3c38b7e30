"""End-to-end acceptance criteria, one marked group per criterion."""

import io
import math
import time

import numpy as np
import pytest

from headlight_sim.cli import main
from headlight_sim.danger import DangerConfig, Policy
from headlight_sim.detector import DetectorConfig, Tracker, associate, association_cost, euclidean_cluster
from headlight_sim.detector.clustering import PointCloudFrame
from headlight_sim.geometry import BoundingBox3D, iou_3d
from headlight_sim.harness import (
    ActorScript,
    ConfusionMatrix,
    compute_metrics,
    generate_scenario,
    make_preset,
    preset_report,
    run_pipeline,
)
from headlight_sim.light import on_duration
from headlight_sim.montecarlo import (
    McConfig,
    analytic_p_danger,
    brute_force_p_danger,
    load_slope,
    p_e1_closed_form,
    p_e1_summation,
    run_simulation,
)
from oracles import best_assignment, radius_graph_components

HEADLIGHTS = ("Goreit Flashlight", "LED", "Halogen")


@pytest.fixture(scope="module")
def default_sweep():
    start = time.perf_counter()
    result = run_simulation(McConfig())
    return result, time.perf_counter() - start


@pytest.mark.acceptance(1, "Monte Carlo grand mean within 0.02 of 0.2118 in under 60 s")
def test_monte_carlo_reproduction(default_sweep):
    result, elapsed = default_sweep
    print(f"grand mean {result.grand_mean:.5f}, {elapsed:.1f} s")
    assert abs(result.grand_mean - 0.2118) <= 0.02
    assert elapsed < 60.0
    assert all(0.0 <= a <= 1.0 for a in result.averages)


@pytest.mark.acceptance(2, "closed-form identity, brute-force agreement and 5/24 limit")
def test_closed_form_identity():
    assert max(abs(p_e1_closed_form(n) - p_e1_summation(n)) for n in range(1, 1001)) <= 1e-12
    for n in (1, 2, 10, 60, 100):
        assert abs(brute_force_p_danger(n, 1.0) - analytic_p_danger(n, 1.0)) <= 1 / 360
    assert abs(analytic_p_danger(10**6) - 5 / 24) <= 1e-6


@pytest.mark.acceptance(3, "per-load averages show no load trend (95% CI of slope contains 0)")
def test_load_independence(default_sweep):
    fit = load_slope(default_sweep[0], 0.95)
    print(f"slope {fit.slope:.3e}, CI [{fit.ci_low:.3e}, {fit.ci_high:.3e}]")
    assert fit.contains_zero


@pytest.mark.acceptance(4, "nine energy values and average case near 21% of worst case")
@pytest.mark.parametrize(
    "case,expected",
    [("worst", (0.549, 9.15, 23.79)), ("average", (0.1155, 1.925, 5.005)), ("best", (0.0585, 0.975, 2.535))],
)
def test_energy_reproduction(case, expected):
    rep = preset_report(case)
    for name, wh in zip(HEADLIGHTS, expected):
        decimals = len(repr(wh).split(".")[1])
        assert round(rep.row(name).used_wh, decimals) == wh
    worst = preset_report("worst")
    for name in HEADLIGHTS:
        ratio = preset_report("average").row(name).used_wh / worst.row(name).used_wh
        assert abs(ratio - 0.21) <= 0.005


@pytest.mark.acceptance(5, "confusion matrix 8/6/3/18 gives 57.14 / 72.73 / 74.29 / 64.00")
def test_metrics_formulas():
    m = compute_metrics(ConfusionMatrix(tp=8, fp=6, fn=3, tn=18))
    got = [round(100 * v, 2) for v in (m.precision, m.recall, m.accuracy, m.f1)]
    assert got == [57.14, 72.73, 74.29, 64.00]


@pytest.mark.acceptance(6, "clustering, assignment and IOU agree with brute-force oracles")
def test_oracle_clustering():
    rng = np.random.default_rng(600)
    for k in range(200):
        n = int(rng.integers(0, 201))
        pts = rng.uniform(-5, 5, size=(n, 3))
        radius = float(rng.uniform(0.2, 1.5))
        cfg = DetectorConfig(cluster_radius=radius, min_cluster_points=1)
        got = [c.point_indices for c in euclidean_cluster(PointCloudFrame(k, 0.0, pts), cfg)]
        assert got == radius_graph_components(pts, radius)


@pytest.mark.acceptance(6, "clustering, assignment and IOU agree with brute-force oracles")
def test_oracle_assignment():
    rng = np.random.default_rng(601)
    cfg = DetectorConfig()
    for _ in range(200):
        rows, cols = (int(v) for v in rng.integers(1, 7, size=2))

        def boxes(count):
            out = []
            for _ in range(count):
                lo = rng.uniform(0, 6, 3)
                out.append(BoundingBox3D(tuple(lo), tuple(lo + rng.uniform(0.2, 1.5, 3))))
            return out

        prev, curr = boxes(rows), boxes(cols)
        cost = np.zeros((rows, cols))
        allowed = np.zeros((rows, cols), dtype=bool)
        for i, p in enumerate(prev):
            for j, c in enumerate(curr):
                cost[i, j], allowed[i, j] = association_cost(p, c, cfg)
        n_pairs, best = best_assignment(cost, allowed)
        matches = associate(prev, curr, cfg).matches
        assert len(matches) == n_pairs
        assert math.isclose(sum(cost[i, j] for i, j in matches), best, abs_tol=1e-9)


@pytest.mark.acceptance(6, "clustering, assignment and IOU agree with brute-force oracles")
def test_oracle_iou():
    rng = np.random.default_rng(602)
    for _ in range(1000):
        a_lo, b_lo = rng.uniform(-3, 3, (2, 3))
        a = BoundingBox3D(tuple(a_lo), tuple(a_lo + rng.uniform(0, 3, 3)))
        b = BoundingBox3D(tuple(b_lo), tuple(b_lo + rng.uniform(0, 3, 3)))
        v = iou_3d(a, b)
        assert 0.0 <= v <= 1.0 and v == iou_3d(b, a)


@pytest.mark.acceptance(7, "noisy constant-velocity actor: filtered RMSE below raw, speed within 10%")
def test_tracking_quality():
    velocity = (-2.0, 1.0, 0.0)
    true_speed = math.hypot(velocity[0], velocity[1])
    sc = generate_scenario([ActorScript("walker", (20.0, -3.0, 0.9), velocity, noise=0.2)],
                           duration_s=10.0, frame_rate_hz=10.0, seed=2024, name="tracking")
    assert len(sc.frames) == 100
    tracker = Tracker()
    filtered, raw, truth, speeds = [], [], [], []
    for frame, gt in zip(sc.frames, sc.ground_truth):
        out = tracker.process_frame(frame)
        assert len(out) == 1
        filtered.append(out[0].position[:2])
        raw.append(out[0].box.center()[:2])
        truth.append(gt.objects[0].pos[:2])
        speeds.append(out[0].speed)
    assert out[0].age_frames == 100  # one track throughout
    truth = np.array(truth)

    def rmse(est):
        return float(np.sqrt(np.mean(np.sum((np.array(est) - truth) ** 2, axis=1))))

    rel = np.abs(np.array(speeds[-50:]) / true_speed - 1.0)
    print(f"RMSE filtered {rmse(filtered):.3f} raw {rmse(raw):.3f}, worst speed error {rel.max():.1%}")
    assert rmse(filtered) < rmse(raw)
    assert np.all(rel <= 0.10)


@pytest.mark.acceptance(8, "light timing: single cycle, 141 s for 47 events, reset rules")
def test_fsm_timing():
    rate = 10.0

    def frames(events, end):
        hits = {round(e * rate) for e in events}
        return [(k / rate, k in hits) for k in range(int(end * rate) + 1)]

    assert abs(on_duration(frames([2.0], 10), 3.0) - 3.0) <= 1 / rate
    events = [1.0 + 28.0 * k for k in range(47)]
    assert on_duration(frames(events, events[-1] + 10), 3.0) == pytest.approx(141.0, abs=1e-9)
    # danger 0.5 s and 1.5 s into the cycle: more than 1 s remains, no extension
    assert on_duration(frames([0.0, 0.5, 1.5], 10), 3.0) == pytest.approx(3.0, abs=1e-9)
    # danger with 0.8 s remaining starts a whole new cycle
    assert on_duration(frames([0.0, 2.2], 10), 3.0) == pytest.approx(5.2, abs=1e-9)


@pytest.mark.acceptance(8, "light timing: single cycle, 141 s for 47 events, reset rules")
def test_fsm_timing_through_pipeline():
    trace = run_pipeline(make_preset("isolated", seed=0), tau_s=3.0)
    assert trace.on_time_s == pytest.approx(141.0, abs=1e-9)


@pytest.mark.acceptance(9, "parallel pedestrian: Current flags nothing, Legacy flags it")
@pytest.mark.parametrize("seed", [0, 7, 123])
def test_policy_regression(seed):
    sc = make_preset("parallel", seed=seed)
    counts = {}
    for policy in Policy:
        trace = run_pipeline(sc, danger_cfg=DangerConfig(policy=policy))
        counts[policy] = sum(v.dangerous for fr in trace.frames for v in fr.verdicts)
    assert counts[Policy.CURRENT] == 0
    assert counts[Policy.LEGACY] >= 1


def _call(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


@pytest.mark.acceptance(10, "every CLI subcommand is byte-reproducible under a fixed seed")
def test_cli_determinism(tmp_path):
    scen = []
    for k in range(2):
        path = tmp_path / f"s{k}.jsonl"
        assert _call(["gen", "--preset", "mixed", "--seed", "5", "--noise", "0.1", "-o", str(path)])[0] == 0
        scen.append(path.read_bytes())
    assert scen[0] == scen[1]

    traces = []
    for k in range(2):
        trace = tmp_path / f"t{k}.jsonl"
        code, out = _call(["run", str(tmp_path / "s0.jsonl"), "--trace", str(trace)])
        assert code == 0
        traces.append((out, trace.read_bytes()))
    assert traces[0] == traces[1]

    for argv in (["montecarlo", "--max-load", "10", "--trials", "100", "--seed", "5"],
                 ["energy", "--scenario", "average"],
                 ["energy", "--on-time", "141", "--format", "jsonl"]):
        first, second = _call(argv), _call(argv)
        assert first[0] == 0 and first == second
