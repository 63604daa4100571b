"""Acceptance gate: one test per shipped guarantee, run under pytest -v.

Every test is deterministic (frozen seeds) and checks its own runtime
budget. Failures in the theorem checks dump a replay record next to
this file so the offending instance can be rebuilt directly.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import AC_MODEL, DC_MODEL
from ctrlgauge import (
    BoxLp,
    LdtSystem,
    NotReachable,
    OracleConfig,
    Zonotope,
    brute_vertices,
    controllability_report,
    exhaustive_min_time,
    expansion_check,
    load_model,
    lp_feasible,
    lp_optimize,
    mc_volume,
    min_time,
    normalize_full,
    polygon_area,
    reach_region,
    simulate,
    strategy_space_dim,
    verify_theorem1,
)
from polytope_enum import affine_dim, polytope_vertices

REPLAY_PATH = Path(__file__).resolve().parent / "replay_record.json"


def _fmt(M):
    return [" ".join(f"{v:.4g}" for v in row) for row in np.atleast_2d(M)]


def _random_system(rng, n, r=1, lo=-1.0, hi=1.0, name="sys"):
    A = rng.uniform(lo, hi, size=(n, n))
    B = rng.uniform(lo, hi, size=(n, r))
    return LdtSystem(name=name, A=A, B=B)


def _dump_replay(tag, payload):
    REPLAY_PATH.write_text(
        json.dumps({"check": tag, **payload}, indent=2, default=str),
        encoding="utf-8",
    )


def test_criterion_01_normalization_golden():
    t0 = time.monotonic()
    dc_sys, dc_spec = load_model(DC_MODEL)
    ac_sys, ac_spec = load_model(AC_MODEL)

    dc_rated = normalize_full(dc_sys, dc_spec)
    assert _fmt(dc_rated.A) == ["0 6.667 0", "0 0 0.15", "0.6953 -15.71 2.66"]
    assert _fmt(dc_rated.B.T) == ["0 0 6.992"]

    ac_rated = normalize_full(ac_sys, ac_spec)
    assert _fmt(ac_rated.A) == ["0 7.667 0", "0 0 0.1522", "0.5632 -14.91 2.61"]
    assert _fmt(ac_rated.B.T) == ["0 0 6.573"]

    dc_target = normalize_full(dc_sys, dc_spec, use_target=True)
    assert _fmt(dc_target.A) == ["0 6 0", "0 0 0.1667", "0.6953 -14.14 2.66"]
    assert _fmt(dc_target.B.T) == ["0 0 6.992"]

    ac_target = normalize_full(ac_sys, ac_spec, use_target=True)
    assert _fmt(ac_target.A) == ["0 6 0", "0 0 0.1667", "0.6571 -13.61 2.61"]
    assert _fmt(ac_target.B.T) == ["0 0 7.668"]

    assert time.monotonic() - t0 < 1.0


def _hull_boundary_gap(points, v):
    """Signed distance of v to the hull of `points` (0 on the boundary)."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(points)
    return float((hull.equations[:, :-1] @ v + hull.equations[:, -1]).max())


def _assert_vertex_routes_agree(z, tol_abs, tag):
    main = z.vertices()
    brute = brute_vertices(z)
    d = np.linalg.norm(main[:, None, :] - brute[None, :, :], axis=2)
    main_only = np.nonzero(d.min(axis=1) > tol_abs)[0]
    brute_only = np.nonzero(d.min(axis=0) > tol_abs)[0]
    if main_only.size == 0 and brute_only.size == 0:
        assert main.shape[0] == brute.shape[0], f"{tag}: duplicate matching"
        return
    # extremeness ties below the tolerance cannot be counted consistently
    # by any floating-point algorithm. A point one route emits and the
    # other does not is acceptable only as such a tie: an exact signed
    # generator sum lying ON the other route's hull boundary. Genuinely
    # missing vertices protrude from the other hull and still fail here.
    gens = z.generators
    m = gens.shape[0]
    bits = np.arange(1 << m)
    signs = ((bits[:, np.newaxis] >> np.arange(m)) & 1) * 2.0 - 1.0
    cloud = signs @ gens
    for v in main[main_only]:
        gap = float(np.linalg.norm(cloud - v, axis=1).min())
        assert gap <= tol_abs, f"{tag}: surplus point is not a signed sum"
        viol = _hull_boundary_gap(brute, v)
        assert abs(viol) <= tol_abs, (
            f"{tag}: surplus point is off the enumerated hull by {viol:.3e}"
        )
    for v in brute[brute_only]:
        viol = _hull_boundary_gap(main, v)
        assert abs(viol) <= tol_abs, (
            f"{tag}: fast route hull misses an enumerated vertex by {viol:.3e}"
        )
    # the two descriptions must still span the same body
    rng = np.random.default_rng(99)
    dirs = rng.standard_normal((200, z.n))
    h_main = (dirs @ main.T).max(axis=1)
    h_brute = (dirs @ brute.T).max(axis=1)
    assert float(np.abs(h_main - h_brute).max()) <= tol_abs * np.linalg.norm(
        dirs, axis=1
    ).max(), f"{tag}: support functions diverge"


def test_criterion_02_vertex_routes_agree():
    # two independent vertex constructions on 200 random systems
    t0 = time.monotonic()
    rng = np.random.default_rng(20260802)
    for i in range(200):
        n = 2 if i % 2 == 0 else 3
        if i % 5 == 4:
            r, N = 2, 1 + (i % 6)  # up to 12 generators
        else:
            r, N = 1, 1 + (i % 12)
        sys_ = _random_system(rng, n, r=r, lo=-2.0, hi=2.0)
        z = reach_region(sys_, N).stage(N)
        # tolerance scales with the region's coordinate magnitude
        scale = max(1.0, float(np.abs(z.generators).sum()))
        _assert_vertex_routes_agree(z, 1e-9 * scale, f"case {i}")
    assert time.monotonic() - t0 < 60.0


def test_criterion_03_volume_routes_agree():
    t0 = time.monotonic()
    rng = np.random.default_rng(20260803)
    checked = 0
    attempts = 0
    while checked < 20:
        attempts += 1
        assert attempts < 200
        n = 2 if checked % 2 == 0 else 3
        m = n + 2 + (checked % 3)
        gens = rng.uniform(-1, 1, size=(m, n))
        z = Zonotope(gens)
        if z.rank() < n:
            continue
        exact = z.volume()
        mc = mc_volume(z, OracleConfig(mc_samples=1_000_000, seed=300 + checked))
        gap = abs(mc.estimate - exact)
        assert gap <= 3.0 * max(mc.std_error, 1e-12), (
            f"case {checked}: exact {exact:.6g} vs mc {mc.estimate:.6g} "
            f"(se {mc.std_error:.3g})"
        )
        # planar projections against the explicit pairwise-determinant sum
        for a in range(n):
            for b in range(a + 1, n):
                poly = z.project_2d((a, b))
                pg = gens[:, [a, b]]
                acc = 0.0
                for i in range(m):
                    for j in range(i + 1, m):
                        acc += abs(pg[i, 0] * pg[j, 1] - pg[i, 1] * pg[j, 0])
                area = polygon_area(poly)
                assert abs(area - 4.0 * acc) <= 1e-9 * max(1.0, area)
        checked += 1
    assert time.monotonic() - t0 < 120.0


def test_criterion_04_expansion_is_strict_iff_controllable():
    t0 = time.monotonic()
    rng = np.random.default_rng(20260804)
    horizon = 8
    dirs_by_n = {
        n: (lambda d: d / np.linalg.norm(d, axis=1, keepdims=True))(
            np.random.default_rng(400 + n).standard_normal((1000, n))
        )
        for n in (2, 3)
    }
    built = 0
    attempts = 0
    while built < 100:
        attempts += 1
        assert attempts < 2000
        n = 2 if built % 2 == 0 else 3
        sys_ = _random_system(rng, n)
        if not controllability_report(sys_, n).controllable:
            continue
        fam = reach_region(sys_, horizon)
        # strictness is a rank statement about the added generator block;
        # draws whose later blocks collapse toward a dominant eigenvector
        # sit below what float64 can rank reliably, so keep the ensemble
        # away from that numerical cliff
        rows = fam.stages[-1].generators
        conditioned = True
        for n1 in range(1, horizon):
            for n2 in range(n1 + n, horizon + 1):
                block = rows[n1:n2]
                s = np.linalg.svd(block, compute_uv=False)
                if s[min(n, block.shape[0]) - 1] < 1e-6 * s[0]:
                    conditioned = False
        if not conditioned:
            continue
        dirs = dirs_by_n[n]
        for n1 in range(1, horizon):
            for n2 in range(n1 + n, horizon + 1):
                rep = expansion_check(fam, n1, n2)
                assert rep.verdict == "StrictlyExpanding", (
                    f"case {built}: stages {n1}->{n2} not strict"
                )
                g_lo = fam.stage(n1).generators
                g_hi = fam.stage(n2).generators
                gaps = np.abs(dirs @ g_hi.T).sum(axis=1) - np.abs(
                    dirs @ g_lo.T
                ).sum(axis=1)
                assert gaps.min() > 0.0
        built += 1

    # input trapped in a proper invariant subspace: expansion stalls
    for lam in (0.4, 0.6, 0.9):
        trap = LdtSystem(
            name="trap",
            A=np.diag([lam, 0.8 * lam]),
            B=np.array([[1.0], [0.0]]),
        )
        rep_c = controllability_report(trap, 2)
        assert not rep_c.controllable
        fam = reach_region(trap, 6)
        rep = expansion_check(fam, 2, 5)
        assert rep.verdict == "WeaklyExpanding"
        w = np.asarray(rep.witness_direction)
        gap = fam.stage(5).support(w) - fam.stage(2).support(w)
        assert abs(gap) <= 1e-9  # boundary contact along the witness
    assert time.monotonic() - t0 < 60.0


def test_criterion_05_min_time_routes_agree():
    t0 = time.monotonic()
    rng = np.random.default_rng(20260805)

    checked = 0
    attempts = 0
    while checked < 50:
        attempts += 1
        assert attempts < 300
        sys_ = _random_system(rng, 2)
        k = 2 + (checked % 7)
        rows = reach_region(sys_, k).stage(k).generators
        x0 = rows.T @ rng.uniform(-1, 1, size=rows.shape[0])
        try:
            sol = min_time(sys_, x0, max_steps=12)
        except NotReachable:
            continue
        want = exhaustive_min_time(sys_, x0, max_steps=12)
        assert sol.min_steps == want, (
            f"case {checked}: lp says {sol.min_steps}, enumeration says {want}"
        )
        traj = simulate(sys_, np.zeros(2), sol.inputs)
        assert float(np.abs(traj[-1] - x0).max()) <= 1e-6
        assert float(np.abs(sol.inputs).max(initial=0.0)) <= 1.0 + 1e-7
        checked += 1

    # scalar chain: the step count is the ceiling of the distance
    chain = LdtSystem(name="chain", A=np.array([[1.0]]), B=np.array([[1.0]]))
    for x0 in (0.2, -0.2, 1.0, -1.5, 2.5, 3.0, -3.999, 4.0):
        want = math.ceil(abs(x0))
        assert min_time(chain, [x0], max_steps=8).min_steps == want
        assert exhaustive_min_time(chain, [x0], max_steps=8) == want

    # unreachable targets fail identically on both routes
    blocked = 0
    rng2 = np.random.default_rng(20260855)
    while blocked < 10:
        sys_ = _random_system(rng2, 2)
        far = reach_region(sys_, 6).stage(6)
        d = rng2.standard_normal(2)
        x0 = 1.5 * far.support(d) * d / np.dot(d, d)  # support point pushed out
        if np.abs(x0).max() < 1e-6:
            continue
        with pytest.raises(NotReachable):
            min_time(sys_, x0, max_steps=6)
        with pytest.raises(NotReachable):
            exhaustive_min_time(sys_, x0, max_steps=6)
        blocked += 1
    assert time.monotonic() - t0 < 60.0


@pytest.fixture(scope="module")
def theorem_suite():
    """50 nested pairs (B scaled by 1.25/1.5/2), 100 sampled states each."""
    rng = np.random.default_rng(20260806)
    factors = (1.25, 1.5, 2.0)
    t0 = time.monotonic()
    reports = []
    for i in range(50):
        n = 3 if i % 3 == 0 else 2
        A = rng.uniform(-1, 1, size=(n, n))
        B = rng.uniform(-1, 1, size=(n, 1))
        sys_a = LdtSystem(name=f"pair{i}-a", A=A, B=B)
        sys_b = LdtSystem(name=f"pair{i}-b", A=A, B=factors[i % 3] * B)
        rep = verify_theorem1(sys_a, sys_b, 6, samples=100, seed=1000 + i)
        reports.append(rep)
    return reports, time.monotonic() - t0


def test_criterion_06_containment_never_slows_control(theorem_suite):
    reports, elapsed = theorem_suite
    assert len(reports) == 50
    for i, rep in enumerate(reports):
        if rep.min_time_violations:
            _dump_replay(
                "min-time", {"pair": i, "violations": rep.min_time_violations}
            )
        assert rep.min_time_violations == [], (
            f"pair {i}: replay record at {REPLAY_PATH}"
        )
        assert rep.checked == 100
    assert elapsed < 120.0


def test_criterion_07_containment_never_reduces_freedom(theorem_suite):
    t0 = time.monotonic()
    reports, _ = theorem_suite
    for i, rep in enumerate(reports):
        if rep.dim_violations:
            _dump_replay("dim", {"pair": i, "violations": rep.dim_violations})
        assert rep.dim_violations == [], f"pair {i}: replay record at {REPLAY_PATH}"

    # dimension route agrees with direct vertex enumeration of the
    # strategy polytope on small horizons
    rng = np.random.default_rng(20260807)
    checked = 0
    while checked < 12:
        sys_ = _random_system(rng, 2)
        N = 2 + (checked % 7)
        rows = reach_region(sys_, N).stage(N).generators
        if checked % 3 == 2:
            signs = np.where(rng.uniform(size=rows.shape[0]) < 0.5, -1.0, 1.0)
            x0 = rows.T @ signs  # a sign-extreme point: little or no slack
        else:
            x0 = rows.T @ rng.uniform(-1, 1, size=rows.shape[0])
        want = affine_dim(rows.T, x0)
        if want is None:
            continue
        got = strategy_space_dim(sys_, x0, N)
        assert got == want, f"case {checked}: dim {got} vs enumerated {want}"
        checked += 1
    assert time.monotonic() - t0 < 60.0


def test_criterion_08_shape_invariance_and_motor_ordering():
    t0 = time.monotonic()

    # shape factors must ignore positive diagonal changes of state units
    rng = np.random.default_rng(20260808)
    for case in range(6):
        n = 2 if case % 2 == 0 else 3
        A = rng.uniform(-1, 1, size=(n, n))
        B = rng.uniform(-1, 1, size=(n, 1))
        p = rng.uniform(0.2, 5.0, size=n)
        base = LdtSystem(name="base", A=A, B=B)
        scaled = LdtSystem(
            name="scaled",
            A=A * (p[np.newaxis, :] / p[:, np.newaxis]),
            B=B / p[:, np.newaxis],
        )
        N = 5
        rep_a = reach_region(base, N).stage(N).shape_report()
        rep_b = reach_region(scaled, N).stage(N).shape_report()
        assert abs(rep_a.overall_shape_factor - rep_b.overall_shape_factor) <= 1e-9
        for key in rep_a.planar_shape_factors:
            assert (
                abs(
                    rep_a.planar_shape_factors[key]
                    - rep_b.planar_shape_factors[key]
                )
                <= 1e-9
            )

    # the two motor models: volume ordering and cross-mode consistency
    dc_sys, dc_spec = load_model(DC_MODEL)
    ac_sys, ac_spec = load_model(AC_MODEL)

    def stage_volume(sys_, spec, use_target, N):
        normed = normalize_full(sys_, spec, use_target=use_target)
        return reach_region(normed, N).stage(N).volume()

    # rated units: the DC motor commands the larger region at N = 10
    dc_rated_10 = stage_volume(dc_sys, dc_spec, False, 10)
    ac_rated_10 = stage_volume(ac_sys, ac_spec, False, 10)
    assert dc_rated_10 > ac_rated_10

    # target units shift both regions; the DC lead appears from N = 15 on
    dc_target_15 = stage_volume(dc_sys, dc_spec, True, 15)
    ac_target_15 = stage_volume(ac_sys, ac_spec, True, 15)
    assert dc_target_15 > ac_target_15

    # switching bounds rescales volumes by the exact diagonal factor
    for sys_, spec in ((dc_sys, dc_spec), (ac_sys, ac_spec)):
        factor = float(np.prod(spec.state_rated / spec.state_target))
        for N in (10, 15):
            vol_rated = stage_volume(sys_, spec, False, N)
            vol_target = stage_volume(sys_, spec, True, N)
            assert vol_target == pytest.approx(vol_rated * factor, rel=1e-9)
    assert time.monotonic() - t0 < 60.0


def test_criterion_09_lp_matches_vertex_enumeration():
    t0 = time.monotonic()
    rng = np.random.default_rng(20260809)
    feasible_seen = 0
    infeasible_seen = 0
    for case in range(500):
        n = 1 + (case % 3)
        m = int(rng.integers(n, 9))
        G = rng.uniform(-1, 1, size=(n, m))
        x0 = G @ rng.uniform(-1.4, 1.4, size=m)
        lp = BoxLp(G=G, x0=x0, lower=-np.ones(m), upper=np.ones(m))
        verts = polytope_vertices(G, x0)
        res = lp_feasible(lp)
        assert res.feasible == (verts.shape[0] > 0), f"case {case}"
        if not res.feasible:
            infeasible_seen += 1
            d = res.certificate
            assert float(d @ x0) > float(np.abs(d @ G).sum())
            continue
        feasible_seen += 1
        # witness re-verification at the published tolerance
        u = res.witness
        assert float(np.abs(G @ u - x0).max()) <= 1e-7
        assert float(np.abs(u).max()) <= 1.0 + 1e-7
        assert res.residual <= 1e-7
        # optima against the enumerated vertex values
        c = rng.standard_normal(m)
        vals = verts @ c
        prob = BoxLp(G=G, x0=x0, lower=-np.ones(m), upper=np.ones(m), objective=c)
        lo = lp_optimize(prob, sense="min")
        hi = lp_optimize(prob, sense="max")
        assert abs(lo.value - float(vals.min())) <= 1e-7
        assert abs(hi.value - float(vals.max())) <= 1e-7
        assert float(np.abs(G @ lo.witness - x0).max()) <= 1e-7
        assert float(np.abs(G @ hi.witness - x0).max()) <= 1e-7
    assert feasible_seen >= 100 and infeasible_seen >= 50
    assert time.monotonic() - t0 < 60.0
