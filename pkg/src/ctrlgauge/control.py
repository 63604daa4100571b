"""Open-loop control ability: minimum time, strategy freedom, comparison.

Minimum-time questions reduce to membership of the target state in the
stage regions: the smallest horizon whose region contains the state is the
answer, and the LP witness converts directly into an input sequence. The
leftover freedom at a fixed horizon is the affine dimension of the set of
admissible input sequences; comparing two systems reduces to containment
of their regions stage by stage.

Geometric half-space tests locate the candidate horizon quickly; the
authoritative accept/reject at each horizon is always the verified LP.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import lp
from .errors import (
    DimensionMismatch,
    Infeasible,
    NotMember,
    NotReachable,
    PreconditionNotMet,
    TooManyGenerators,
)
from .model import require_amplitude
from .region import RegionKind, reach_region, recover_region, stage_generators
from .zonotope import Zonotope, _rank, contains_point

BOUNDARY_TOL = 1e-7
STRICT_TOL = 1e-9
DECISIVE_GAP = 1e-6
EXACT_GENERATOR_CAP = 16
SAMPLED_DIRECTIONS = 10_000
DEFAULT_MAX_STEPS = 50


def _box_lp(rows, x, objective=None):
    m = rows.shape[0]
    return lp.BoxLp(
        G=rows.T,
        x0=x,
        lower=np.full(m, -1.0),
        upper=np.full(m, 1.0),
        objective=objective,
    )


def _check_state(sys, x0):
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != sys.n:
        raise DimensionMismatch(f"state must have length {sys.n}, got {x.size}")
    if not np.isfinite(x).all():
        raise DimensionMismatch("state contains non-finite entries")
    return x


@dataclass(frozen=True)
class ControlSolution:
    """Minimum-time answer with the witness inputs and horizon diagnostics.

    inputs has one row per step in time order. certificate, when present,
    is a direction separating the state from the region one step shorter.
    strategy_dim is evaluated at `horizon` (the search cap), not at
    min_steps.
    """

    min_steps: int
    inputs: np.ndarray
    strategy_dim: int
    horizon: int
    boundary: str
    margin: float
    certificate: np.ndarray | None

    def to_dict(self):
        return {
            "minSteps": self.min_steps,
            "inputs": self.inputs.tolist(),
            "strategyDim": self.strategy_dim,
            "horizon": self.horizon,
            "boundary": self.boundary,
            "margin": self.margin,
            "certificate": (
                None if self.certificate is None else self.certificate.tolist()
            ),
        }


def _quick_member(rows, x):
    try:
        return contains_point(Zonotope(rows), x)
    except TooManyGenerators:
        return None


def _strategy_dim(rows, x):
    """Affine dimension of {u in box : rows^T u = x}.

    With a uniform margin above tolerance the box is inactive, so the
    dimension is that of the full solution space. Otherwise coordinates
    whose LP range collapses are pinned and the rest contribute their
    null-space dimension.
    """
    box = _box_lp(rows, x)
    res = lp.feasible(box)
    if not res.feasible:
        raise NotMember("state is outside the region at this horizon")
    mar = lp.max_margin(box)
    m = rows.shape[0]
    if mar.margin > BOUNDARY_TOL:
        return m - _rank(rows)
    free = np.zeros(m, dtype=bool)
    for j in range(m):
        c = np.zeros(m)
        c[j] = 1.0
        lo = lp.optimize(_box_lp(rows, x, c), sense="min").value
        hi = lp.optimize(_box_lp(rows, x, c), sense="max").value
        free[j] = (hi - lo) > STRICT_TOL
    if not free.any():
        return 0
    return int(free.sum()) - _rank(rows[free])


def min_time(sys, x0, kind=RegionKind.REACH, max_steps=DEFAULT_MAX_STEPS, constraint=None):
    """Fewest steps to reach x0 from the origin (or recover, by kind).

    Sweeps horizons with the geometric membership test, then confirms and
    refines with LPs: the returned horizon is LP-feasible and the horizon
    below it is LP-infeasible with the separating certificate stored.
    Raises NotReachable past max_steps.
    """
    require_amplitude(constraint)
    x = _check_state(sys, x0)
    r = sys.r
    rows_all = stage_generators(sys, max_steps, kind)
    if float(np.abs(x).max(initial=0.0)) <= 1e-12:
        return ControlSolution(
            min_steps=0,
            inputs=np.zeros((0, r)),
            strategy_dim=_strategy_dim(rows_all, x),
            horizon=max_steps,
            boundary="Interior",
            margin=1.0,
            certificate=None,
        )
    cand = None
    for steps in range(1, max_steps + 1):
        rows = rows_all[: steps * r]
        member = _quick_member(rows, x)
        if member is None:
            member = lp.feasible(_box_lp(rows, x)).feasible
        if member:
            cand = steps
            break
    if cand is None:
        res = lp.feasible(_box_lp(rows_all, x))
        if not res.feasible:
            raise NotReachable(
                f"state not reachable within {max_steps} steps",
                certificate=res.certificate,
                max_steps=max_steps,
            )
        cand = max_steps
    res = lp.feasible(_box_lp(rows_all[: cand * r], x))
    while not res.feasible:
        cand += 1
        if cand > max_steps:
            raise NotReachable(
                f"state not reachable within {max_steps} steps",
                certificate=res.certificate,
                max_steps=max_steps,
            )
        res = lp.feasible(_box_lp(rows_all[: cand * r], x))
    certificate = None
    while cand > 1:
        below = lp.feasible(_box_lp(rows_all[: (cand - 1) * r], x))
        if below.feasible:
            cand -= 1
            res = below
        else:
            certificate = below.certificate
            break
    if cand == 1 and certificate is None:
        # the zero-step region is the origin; x itself separates
        certificate = x / float(np.linalg.norm(x))
    inputs = res.witness.reshape(cand, r)
    if kind is RegionKind.REACH:
        # generator block i acts at time cand-1-i
        inputs = inputs[::-1].copy()
    else:
        inputs = -inputs
    mar = lp.max_margin(_box_lp(rows_all[: cand * r], x))
    return ControlSolution(
        min_steps=cand,
        inputs=inputs,
        strategy_dim=_strategy_dim(rows_all, x),
        horizon=max_steps,
        boundary="Boundary" if mar.margin <= BOUNDARY_TOL else "Interior",
        margin=float(mar.margin),
        certificate=certificate,
    )


def strategy_space_dim(sys, x0, horizon, kind=RegionKind.REACH, constraint=None):
    """Affine dimension of the admissible input sequences at a horizon.

    Raises NotMember when the state is outside the horizon's region.
    """
    require_amplitude(constraint)
    x = _check_state(sys, x0)
    rows = stage_generators(sys, horizon, kind)
    return _strategy_dim(rows, x)


@dataclass(frozen=True)
class AbilityVerdict:
    """Outcome of a two-system region comparison at one horizon.

    relation is Equal, StrictlyStronger, NotWeaker, or Incomparable;
    stronger names the dominating system for the one-sided relations.
    exact is False when generator counts forced sampled support checks,
    making the verdict probable rather than certified.
    """

    relation: str
    stronger: str | None
    at_horizon: int
    exact: bool
    certificate: dict | None
    metrics: dict

    def to_dict(self):
        return {
            "relation": self.relation,
            "stronger": self.stronger,
            "atHorizon": self.at_horizon,
            "exact": self.exact,
            "certificate": self.certificate,
            "metrics": self.metrics,
        }


def _vertex_containment(fam_inner, fam_outer):
    """Check stage-wise vertex membership; returns (min margin, failures)."""
    worst = float("inf")
    failures = []
    for k in range(1, fam_inner.horizon + 1):
        verts = fam_inner.stage(k).vertices()
        rows_outer = fam_outer.stage(k).generators
        for v in verts:
            try:
                mar = lp.max_margin(_box_lp(rows_outer, v))
                worst = min(worst, mar.margin)
            except Infeasible as exc:
                d = exc.certificate
                gap = None
                if d is not None:
                    gap = float(d @ v - np.abs(rows_outer @ d).sum())
                failures.append(
                    {
                        "stage": k,
                        "vertex": v.tolist(),
                        "gap": gap,
                        "direction": None if d is None else d.tolist(),
                    }
                )
    return worst, failures


def _sampled_containment(fam_inner, fam_outer, dirs):
    """Support-function comparison along sampled directions."""
    worst_slack = float("inf")
    failures = []
    for k in range(1, fam_inner.horizon + 1):
        hi = np.abs(dirs @ fam_inner.stage(k).generators.T).sum(axis=1)
        ho = np.abs(dirs @ fam_outer.stage(k).generators.T).sum(axis=1)
        slack = ho - hi
        tol = STRICT_TOL * np.maximum(1.0, ho)
        bad = slack < -tol
        worst_slack = min(worst_slack, float(slack.min()))
        if np.any(bad):
            j = int(np.argmin(slack))
            failures.append(
                {
                    "stage": k,
                    "direction": dirs[j].tolist(),
                    "gap": float(-slack[j]),
                    "vertex": None,
                }
            )
    return worst_slack, failures


def compare_ability(
    sys_a,
    sys_b,
    horizon,
    kind=RegionKind.REACH,
    constraint=None,
    seed=0,
):
    """Compare the stage regions of two same-dimension systems.

    Containment is decided by vertex membership LPs when every stage stays
    within the exact generator cap, and by sampled support functions
    otherwise (exact=False). The verdict names the stronger system; the
    certificate carries the witnesses behind it.
    """
    require_amplitude(constraint)
    if sys_a.n != sys_b.n:
        raise DimensionMismatch(
            f"state dimensions differ: {sys_a.n} vs {sys_b.n}"
        )
    builder = reach_region if kind is RegionKind.REACH else recover_region
    fam_a = builder(sys_a, horizon)
    fam_b = builder(sys_b, horizon)
    exact = horizon * max(sys_a.r, sys_b.r) <= EXACT_GENERATOR_CAP
    if exact:
        margin_ab, fail_ab = _vertex_containment(fam_a, fam_b)
        margin_ba, fail_ba = _vertex_containment(fam_b, fam_a)
    else:
        rng = np.random.default_rng(seed)
        dirs = rng.standard_normal((SAMPLED_DIRECTIONS, sys_a.n))
        dirs = dirs[np.linalg.norm(dirs, axis=1) > 1e-12]
        dirs /= np.linalg.norm(dirs, axis=1)[:, np.newaxis]
        margin_ab, fail_ab = _sampled_containment(fam_a, fam_b, dirs)
        margin_ba, fail_ba = _sampled_containment(fam_b, fam_a, dirs)
    a_in_b = not fail_ab
    b_in_a = not fail_ba
    if a_in_b and b_in_a:
        relation, stronger = "Equal", None
    elif a_in_b or b_in_a:
        fails = fail_ba if a_in_b else fail_ab
        decisive = any(
            f["gap"] is not None and f["gap"] > DECISIVE_GAP for f in fails
        )
        relation = "StrictlyStronger" if decisive else "NotWeaker"
        stronger = sys_b.name if a_in_b else sys_a.name
    else:
        relation, stronger = "Incomparable", None
    certificate = {
        "aInB": a_in_b,
        "bInA": b_in_a,
        "minMarginAInB": None if margin_ab == float("inf") else float(margin_ab),
        "minMarginBInA": None if margin_ba == float("inf") else float(margin_ba),
        "aViolations": fail_ab,
        "bViolations": fail_ba,
    }
    metrics = {
        "a": {"name": sys_a.name, **fam_a.stages[-1].shape_report().to_dict()},
        "b": {"name": sys_b.name, **fam_b.stages[-1].shape_report().to_dict()},
    }
    return AbilityVerdict(
        relation=relation,
        stronger=stronger,
        at_horizon=horizon,
        exact=exact,
        certificate=certificate,
        metrics=metrics,
    )


@dataclass(frozen=True)
class TheoremReport:
    """Empirical check that region containment orders control ability.

    For sampled states x0 in the smaller system's region, the containing
    system must never need more steps and never offer fewer degrees of
    freedom. Violations carry the data needed to replay them.
    """

    horizon: int
    kind: str
    samples: int
    seed: int
    checked: int
    min_time_violations: list
    dim_violations: list
    summary: dict
    passed: bool

    def to_dict(self):
        return {
            "horizon": self.horizon,
            "kind": self.kind,
            "samples": self.samples,
            "seed": self.seed,
            "checked": self.checked,
            "minTimeViolations": self.min_time_violations,
            "dimViolations": self.dim_violations,
            "summary": self.summary,
            "passed": self.passed,
        }


def verify_theorem1(
    sys_a,
    sys_b,
    horizon,
    kind=RegionKind.REACH,
    samples=100,
    seed=0,
    constraint=None,
):
    """Sample states from system A's region and compare both systems.

    Precondition: A's stage regions are contained in B's at every stage up
    to the horizon (PreconditionNotMet otherwise). States are the final
    stage's vertices topped up with random convex combinations of them.
    """
    require_amplitude(constraint)
    if sys_a.n != sys_b.n:
        raise DimensionMismatch(
            f"state dimensions differ: {sys_a.n} vs {sys_b.n}"
        )
    builder = reach_region if kind is RegionKind.REACH else recover_region
    fam_a = builder(sys_a, horizon)
    fam_b = builder(sys_b, horizon)
    for k in range(1, horizon + 1):
        rows_b = fam_b.stage(k).generators
        for v in fam_a.stage(k).vertices():
            if not lp.feasible(_box_lp(rows_b, v)).feasible:
                raise PreconditionNotMet(
                    f"stage {k} of {sys_a.name} is not contained in "
                    f"{sys_b.name}; vertex {v.tolist()} is outside"
                )
    verts = fam_a.stage(horizon).vertices()
    if verts.shape[0] >= samples:
        states = verts[:samples]
    else:
        rng = np.random.default_rng(seed)
        extra = samples - verts.shape[0]
        weights = rng.dirichlet(np.ones(verts.shape[0]), size=extra)
        states = np.vstack([verts, weights @ verts])
    min_time_violations = []
    dim_violations = []
    steps_tied = 0
    dims_tied = 0
    for x0 in states:
        sol_a = min_time(sys_a, x0, kind=kind, max_steps=horizon)
        sol_b = min_time(sys_b, x0, kind=kind, max_steps=horizon)
        if sol_b.min_steps > sol_a.min_steps:
            min_time_violations.append(
                {
                    "x0": x0.tolist(),
                    "minStepsA": sol_a.min_steps,
                    "minStepsB": sol_b.min_steps,
                }
            )
        elif sol_b.min_steps == sol_a.min_steps:
            steps_tied += 1
        if sol_a.strategy_dim > sol_b.strategy_dim:
            dim_violations.append(
                {
                    "x0": x0.tolist(),
                    "dimA": sol_a.strategy_dim,
                    "dimB": sol_b.strategy_dim,
                }
            )
        elif sol_a.strategy_dim == sol_b.strategy_dim:
            dims_tied += 1
    summary = {
        "stepsTied": steps_tied,
        "stepsStrictlyFewerB": len(states) - steps_tied - len(min_time_violations),
        "dimsTied": dims_tied,
        "dimsStrictlyMoreB": len(states) - dims_tied - len(dim_violations),
    }
    return TheoremReport(
        horizon=horizon,
        kind=kind.value if hasattr(kind, "value") else str(kind),
        samples=int(states.shape[0]),
        seed=int(seed),
        checked=int(states.shape[0]),
        min_time_violations=min_time_violations,
        dim_violations=dim_violations,
        summary=summary,
        passed=not min_time_violations and not dim_violations,
    )


def simulate(sys, start, inputs):
    """Roll the dynamics from `start` under an input sequence.

    Returns the (N+1, n) trajectory. Inputs above the unit amplitude in
    magnitude trigger a RuntimeWarning but are applied as given. Reach
    solutions replay from the origin; recover solutions from their x0.
    """
    x = _check_state(sys, start)
    u = np.asarray(inputs, dtype=float)
    if u.ndim == 1:
        u = u.reshape(-1, sys.r) if sys.r == 1 else u.reshape(1, -1)
    if u.ndim != 2 or (u.size and u.shape[1] != sys.r):
        raise DimensionMismatch(f"inputs must be (N, {sys.r})")
    if u.size and float(np.abs(u).max()) > 1.0 + STRICT_TOL:
        warnings.warn(
            "input amplitude exceeds the unit bound", RuntimeWarning, stacklevel=2
        )
    steps = u.shape[0]
    traj = np.zeros((steps + 1, sys.n))
    traj[0] = x
    for k in range(steps):
        traj[k + 1] = sys.A @ traj[k] + sys.B @ u[k]
    return traj
