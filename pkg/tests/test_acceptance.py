"""Acceptance gate: one test per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v`` for one pass/fail line per
criterion; each test also prints an ``ACCEPTANCE n PASS`` line.
"""

from __future__ import annotations

import json
import time

import numpy as np

import torus_filippov as tf
from torus_filippov.cli import main
from torus_filippov.geometry import h_value

from conftest import random_inelastic, random_torus_points
from test_geometry import fd_gradient

RNG_SEED = 812


def _segment_min_distances(points, polyline):
    """Distance from each point to the closed polyline (segment-accurate)."""
    verts = polyline.points
    starts = verts
    ends = np.roll(verts, -1, axis=0)
    d = ends - starts
    len2 = np.maximum(np.sum(d * d, axis=1), 1e-300)
    rel = points[:, None, :] - starts[None, :, :]
    t = np.clip(np.sum(rel * d[None, :, :], axis=2) / len2[None, :], 0.0, 1.0)
    proj = starts[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(points[:, None, :] - proj, axis=2)
    return dist.min(axis=1)


def symmetric_hausdorff(component, polyline, n_samples=1024):
    forward = _segment_min_distances(component.sample(n_samples), polyline).max()
    backward = component.distance(polyline.points).max()
    return float(max(forward, backward))


FAMILY_FIXTURES = {
    "SkewQ4Zero": ([[0, 1, -1], [-1, 0, -1], [1, 1, 0]], 4),
    "XZCase_gamma5": ([[0, 0, 1], [0, 0, 0], [0, 0, 0]], 6),
    "XZCase_empty_sphere": ([[0, 0, 1], [0, 0, 0], [2, 0, 0]], 4),
    "YZCase_gamma5": ([[0, 0, 0], [0, 0, 1], [0, 0, 0]], 6),
    "YZCase_empty_sphere": ([[0, 0, 0], [0, 0, 1], [0, 3, 0]], 4),
    "Q4OnlyLinear": ([[0, 0, 0], [0, 0, 0], [1, 1, 0]], 4),
    "Q2OnlyLinear": ([[0, 0, 1], [0, 0, 1], [0, 0, 0]], 6),
    "ZSquared": ([[0, 0, 0], [0, 0, 0], [0, 0, 1]], 2),
    "PlanarQuadratic_definite": ([[1, 0, 0], [0, 1, 0], [0, 0, 0]], 2),
    "PlanarQuadratic_double_line": ([[1, 2, 0], [0, 1, 0], [0, 0, 0]], 4),
    "PlanarQuadratic_indefinite": ([[1, 0, 0], [0, -1, 0], [0, 0, 0]], 6),
}

FALLBACK_A = [[-1, -4, 0], [4, -1, 0], [0, 0, -1]]


def test_criterion_01_inelastic_round_trip():
    rng = np.random.default_rng(RNG_SEED)
    start = time.perf_counter()
    pts = random_torus_points(rng, 1000)
    grad = tf.h_gradient(pts)
    worst = 0.0
    for _ in range(1000):
        a = rng.uniform(-10.0, 10.0, (3, 3))
        b = tf.derive_inelastic_b(a, rng.uniform(-10.0, 10.0))
        residual = np.sum((pts @ a.T + pts @ b.T) * grad, axis=1)
        worst = max(worst, float(np.max(np.abs(residual))))
    elapsed = time.perf_counter() - start
    assert worst < 1e-9, f"max |X+h + X-h| = {worst:.3e}"
    assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s"
    print(f"ACCEPTANCE 1 PASS: inelastic round trip, max residual {worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_sliding_closed_form():
    rng = np.random.default_rng(RNG_SEED + 1)
    checked = 0
    worst = 0.0
    for _ in range(50):
        sys_obj = random_inelastic(rng)
        pts = random_torus_points(rng, 200)
        lp = tf.lie_derivative_h(sys_obj.exterior, pts)
        candidates = pts[np.abs(lp) > 1.0][:20]
        for p in candidates:
            eq3 = tf.filippov_sliding(sys_obj, p)
            mean = sys_obj.mean_field(p)
            worst = max(worst, float(np.max(np.abs(eq3 - mean))))
            assert mean[2] == 0.0  # planarity of the closed form, exactly
            checked += 1
        form = tf.sliding_closed_form(sys_obj)
        assert np.all(form(pts)[:, 2] == 0.0)
    assert checked >= 1000, f"only {checked} non-tangent samples"
    assert worst < 1e-10, f"max |Eq(3) - mean| = {worst:.3e}"
    print(f"ACCEPTANCE 2 PASS: sliding closed form on {checked} points, max dev {worst:.2e}")


def test_criterion_03_closed_orbits():
    rng = np.random.default_rng(RNG_SEED + 2)
    start = time.perf_counter()
    for _ in range(20):
        omega = rng.uniform(0.1, 10.0) * rng.choice([-1.0, 1.0])
        sys_obj = random_inelastic(rng, omega=omega)
        p0 = random_torus_points(rng, 1)[0]
        result = tf.orbit_closure_check(sys_obj, p0)
        predicted = 2.0 * np.pi / abs(omega)
        assert result.closed
        assert result.return_gap < 1e-6
        assert abs(result.measured_period - predicted) / predicted < 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"runtime {elapsed:.2f}s exceeds 10s"
    print(f"ACCEPTANCE 3 PASS: 20 random sliding orbits closed, {elapsed:.2f}s")


def test_criterion_04_tangency_counts():
    for name, (a, count) in FAMILY_FIXTURES.items():
        result = tf.classify_tangency_set(tf.inelastic_system(a, 0.5))
        assert result.component_count == count, f"{name}: {result.component_count} != {count}"
    gamma5 = tf.classify_tangency_set(tf.inelastic_system(FAMILY_FIXTURES["XZCase_gamma5"][0], 0.5))
    spheres = sorted(
        (c for c in gamma5.components if c.kind == "sphere_circle"), key=lambda c: c.z
    )
    assert [c.z for c in spheres] == [-1.0, 1.0]
    assert all(abs(c.radius - 2.0) <= 1e-9 for c in spheres)
    print(f"ACCEPTANCE 4 PASS: component counts match for {len(FAMILY_FIXTURES)} fixtures")


def test_criterion_05_analytic_numerical_cross_validation():
    start = time.perf_counter()
    worst = 0.0
    for name, (a, count) in FAMILY_FIXTURES.items():
        sys_obj = tf.inelastic_system(a, 0.5)
        analytic = tf.classify_tangency_set(sys_obj)
        loops = tf.numerical_tangency_contours(sys_obj, 256, 256)
        assert len(loops) == analytic.component_count == count, name
        for comp in analytic.components:
            best = min(symmetric_hausdorff(comp, lp) for lp in loops)
            worst = max(worst, best)
            assert best < 0.05, f"{name}: Hausdorff {best:.4f}"
    fallback = tf.inelastic_system(FALLBACK_A, 0.0)
    loops = tf.numerical_tangency_contours(fallback, 256, 256)
    assert len(loops) == 2
    circles = [
        tf.HorizontalCircle(z=np.sqrt(3.0) / 2.0, radius=1.5),
        tf.HorizontalCircle(z=-np.sqrt(3.0) / 2.0, radius=1.5),
    ]
    for loop in loops:
        assert min(float(c.distance(loop.points).max()) for c in circles) < 0.02
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"runtime {elapsed:.2f}s exceeds 30s"
    print(f"ACCEPTANCE 5 PASS: contours match analytics, worst Hausdorff {worst:.4f}, {elapsed:.1f}s")


def test_criterion_06_no_crossing_region():
    rng = np.random.default_rng(RNG_SEED + 3)
    for _ in range(50):
        sys_obj = random_inelastic(rng)
        _, _, kinds = tf.region_grid(sys_obj, 128, 128)
        crossing = int(np.sum(kinds == tf.RegionKind.CROSSING))
        assert crossing == 0
    print("ACCEPTANCE 6 PASS: zero crossing cells over 50 random inelastic systems")


def test_criterion_07_hybrid_simulation_oracle():
    sys_obj = tf.inelastic_system(FALLBACK_A, 0.0)
    traj = tf.simulate(sys_obj, [4.0, 0.0, 0.0], 3.0)
    free, slide = traj.segments[0], traj.segments[1]
    assert free.mode is tf.SegmentMode.FREE_EXTERIOR
    assert slide.mode is tf.SegmentMode.SLIDING
    t_event = free.t_end
    assert abs(t_event - np.log(4.0 / 3.0)) < 1e-9
    contact = free.end_point
    assert abs(np.hypot(contact[0], contact[1]) - 3.0) < 1e-9
    assert abs(contact[2]) < 1e-9
    closure = tf.orbit_closure_check(sys_obj, contact)
    assert closure.closed
    assert abs(closure.measured_period - np.pi) < 1e-6
    print(
        "ACCEPTANCE 7 PASS: free->slide at t=ln(4/3)"
        f" ({t_event:.12f}), sliding period {closure.measured_period:.9f}"
    )


def test_criterion_08_equivalence_checks():
    rng = np.random.default_rng(RNG_SEED + 4)

    def classified_system(omega):
        a13 = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
        a21 = rng.uniform(-2.0, 2.0)
        a = np.array([[0.0, -a21, a13], [a21, 0.0, 0.0], [0.0, 0.0, 0.0]])
        return tf.inelastic_system(a, 2.0 * omega - a21)

    for _ in range(10):
        w1 = rng.uniform(0.1, 5.0)
        w2 = rng.uniform(0.1, 5.0)
        same = tf.equivalence_check(classified_system(w1), classified_system(w2))
        assert same.equivalent
        assert same.homeomorphism_descriptor is tf.Homeomorphism.IDENTITY
        assert same.orbit_match_error < 1e-12
        opposite = tf.equivalence_check(classified_system(w1), classified_system(-w2))
        assert opposite.equivalent
        assert opposite.homeomorphism_descriptor is tf.Homeomorphism.REFLECTION_Y
        assert opposite.conjugacy_residual < 1e-12
    print("ACCEPTANCE 8 PASS: 10 identity pairs and 10 reflection pairs verified")


def test_criterion_09_gradient_correctness():
    rng = np.random.default_rng(RNG_SEED + 5)
    for torus in (tf.CANONICAL, tf.TorusSpec(3.0, 0.5), tf.TorusSpec(1.5, 0.4)):
        pts = rng.uniform(-5.0, 5.0, (1000, 3))
        grads = tf.h_gradient(pts, torus)
        for p, g in zip(pts, grads):
            fd = fd_gradient(p, torus)
            rel = np.linalg.norm(fd - g) / max(np.linalg.norm(g), 1.0)
            assert rel < 1e-6
    print("ACCEPTANCE 9 PASS: gradient matches finite differences on 3 tori")


def test_criterion_10_cli_determinism(tmp_path, capsys):
    fixtures = tmp_path / "fixtures"
    fixtures.mkdir()
    xz = fixtures / "xz.json"
    xz.write_text(json.dumps({"A": [[0, 0, 1], [0, 0, 0], [0, 0, 0]], "b21": 0.5}))
    spiral = fixtures / "spiral.json"
    spiral.write_text(json.dumps({"A": FALLBACK_A, "b21": 0.0}))
    eq2 = fixtures / "eq2.json"
    eq2.write_text(json.dumps({"A": [[0, 0.4, 1], [-0.4, 0, 0], [0, 0, 0]], "b21": -0.2}))
    sweep_cfg = fixtures / "sweep.json"
    sweep_cfg.write_text(
        json.dumps({"base": {"A": [[0, 0, 1], [0, 0, 0], [0, 0, 0]]}, "grid": {"b21": [0, 1]}})
    )

    def run_all(root):
        root.mkdir()
        assert main(["derive-b", str(xz), str(root / "full.json")]) == 0
        assert main(["classify", str(xz), "--out", str(root / "cls.json"), "--svg", str(root / "cls.svg")]) == 0
        assert main(["simulate", str(spiral), "--x0", "4,0,0", "--tmax", "2", "--out", str(root / "traj.csv")]) == 0
        assert main(["regions", str(xz), "--grid", "32", "--out", str(root / "reg.csv"), "--svg", str(root / "reg.svg")]) == 0
        assert main(["orbit-check", str(spiral), "--p0", "3,0,0"]) == 0
        stdout = capsys.readouterr().out
        assert main(["equiv", str(xz), str(eq2), "--out", str(root / "eq.json")]) == 0
        assert main(["sweep", str(sweep_cfg), "--out-dir", str(root / "sweep")]) == 0
        capsys.readouterr()
        out = {"orbit-check.stdout": stdout.encode()}
        for name in ("full.json", "cls.json", "cls.svg", "traj.csv", "reg.csv", "reg.svg", "eq.json",
                     "full.json.report.json", "cls.json.report.json", "traj.csv.report.json",
                     "reg.csv.report.json", "eq.json.report.json"):
            out[name] = (root / name).read_bytes()
        for cell in sorted((root / "sweep").iterdir()):
            out[f"sweep/{cell.name}"] = cell.read_bytes()
        return out

    first = run_all(tmp_path / "run1")
    second = run_all(tmp_path / "run2")
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"{name} differs between runs"
    print(f"ACCEPTANCE 10 PASS: {len(first)} outputs byte-identical across repeated runs")


def test_supplementary_event_accuracy():
    """Every detected surface event satisfies |h| < 1e-9 (spec invariant)."""
    rng = np.random.default_rng(RNG_SEED + 6)
    hits = 0
    for _ in range(20):
        M = rng.uniform(-2.0, 2.0, (3, 3))
        seg = tf.free_flight(tf.LinearField(M), rng.uniform(-4, 4, 3), 4.0)
        if seg.terminal_event is tf.TerminalEvent.HIT_SURFACE:
            hits += 1
            assert abs(h_value(seg.end_point)) < 1e-9
    assert hits >= 5
