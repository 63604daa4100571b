"""Self-contained dense linear programming over box-constrained variables.

Problems have the form

    optimize c . u   subject to   G u = x0,   lower <= u <= upper

with all bounds finite. The solver is a bounded-variable primal simplex:
phase 1 minimizes the l1 norm of the equality residuals through signed
artificial variables, phase 2 optimizes the caller's objective. Bland's
rule fixes the pivot order (lowest eligible index enters; lowest variable
index leaves among ratio ties), so runs are deterministic and cycle-free.
Finite boxes rule out unbounded rays; meeting one raises InternalError.

Witnesses are always re-verified after the fact: equality residual within
RESIDUAL_TOL, bounds within BOUND_TOL. Per-iteration state can be dumped
by setting the ctrlgauge.lp logger (CTRLGAUGE_LOG=DEBUG) to debug level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    Infeasible,
    InternalError,
    IterationLimit,
)

logger = logging.getLogger("ctrlgauge.lp")

PIVOT_TOL = 1e-10
BOUND_TOL = 1e-9
RESIDUAL_TOL = 1e-7
MARGIN_TOL = 1e-8
ITERATION_LIMIT = 50000

_AT_LOWER, _AT_UPPER, _BASIC = 0, 1, 2


@dataclass(frozen=True)
class BoxLp:
    """Equality-constrained LP data over a box. objective may be None."""

    G: np.ndarray
    x0: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    objective: np.ndarray | None = None

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        x0 = np.asarray(self.x0, dtype=float).ravel()
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        n, m = G.shape
        if x0.size != n:
            raise DimensionMismatch(f"x0 must have length {n}, got {x0.size}")
        if lower.size != m or upper.size != m:
            raise DimensionMismatch(f"bounds must have length {m}")
        if not (
            np.isfinite(G).all()
            and np.isfinite(x0).all()
            and np.isfinite(lower).all()
            and np.isfinite(upper).all()
        ):
            raise ValueError("LP data must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bounds exceed upper bounds")
        obj = self.objective
        if obj is not None:
            obj = np.asarray(obj, dtype=float).ravel()
            if obj.size != m:
                raise DimensionMismatch(f"objective must have length {m}")
            if not np.isfinite(obj).all():
                raise ValueError("objective must be finite")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "objective", obj)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: np.ndarray | None
    certificate: np.ndarray | None
    residual: float


@dataclass(frozen=True)
class MarginResult:
    margin: float
    witness: np.ndarray


@dataclass(frozen=True)
class OptimizeResult:
    value: float
    witness: np.ndarray


class _Simplex:
    """One bounded-variable simplex instance: A x = b, l <= x <= u."""

    def __init__(self, A, b, lower, upper):
        self.A = A
        self.b = b
        self.lower = lower.copy()
        self.upper = upper.copy()
        self.nrows, self.ncols = A.shape
        self.iterations = 0

    def _setup_phase1(self):
        ncols = self.ncols
        x = self.lower.copy()
        resid = self.b - self.A @ x
        sign = np.where(resid >= 0.0, 1.0, -1.0)
        art = np.zeros((self.nrows, self.nrows))
        art[np.arange(self.nrows), np.arange(self.nrows)] = sign
        self.A = np.hstack([self.A, art])
        self.lower = np.concatenate([self.lower, np.zeros(self.nrows)])
        self.upper = np.concatenate([self.upper, np.abs(resid) + 1.0])
        self.x = np.concatenate([x, np.abs(resid)])
        self.status = np.full(ncols + self.nrows, _AT_LOWER, dtype=np.int8)
        self.status[ncols:] = _BASIC
        self.basis = np.arange(ncols, ncols + self.nrows)

    def _solve_b(self, rhs):
        try:
            return np.linalg.solve(self.A[:, self.basis], rhs)
        except np.linalg.LinAlgError as exc:
            raise InternalError(f"basis matrix became singular: {exc}") from exc

    def _iterate(self, c):
        """Run simplex to optimality for objective c (minimization)."""
        debug = logger.isEnabledFor(logging.DEBUG)
        while True:
            self.iterations += 1
            if self.iterations > ITERATION_LIMIT:
                raise IterationLimit(
                    f"simplex exceeded {ITERATION_LIMIT} iterations"
                )
            y = np.linalg.solve(self.A[:, self.basis].T, c[self.basis])
            reduced = c - self.A.T @ y
            at_lower = (self.status == _AT_LOWER) & (reduced < -PIVOT_TOL)
            at_upper = (self.status == _AT_UPPER) & (reduced > PIVOT_TOL)
            eligible = np.flatnonzero(at_lower | at_upper)
            if eligible.size == 0:
                self.duals = y
                self.reduced = reduced
                return
            enter = int(eligible[0])
            delta = 1.0 if self.status[enter] == _AT_LOWER else -1.0
            w = self._solve_b(self.A[:, enter])
            if debug:
                logger.debug(
                    "iter=%d enter=%d delta=%+.0f obj=%.12g basis=%s",
                    self.iterations,
                    enter,
                    delta,
                    float(c @ self.x),
                    self.basis.tolist(),
                )
            rate = -delta * w
            # ratio test; ties resolved toward the smallest variable index,
            # with the entering variable itself standing for a bound flip
            t_min = self.upper[enter] - self.lower[enter]
            leave_pos = -1
            hit_upper = False
            best_var = enter
            for i in range(self.nrows):
                bi = self.basis[i]
                if rate[i] > PIVOT_TOL:
                    room = self.upper[bi] - self.x[bi]
                    t = max(room, 0.0) / rate[i]
                    up = True
                elif rate[i] < -PIVOT_TOL:
                    room = self.x[bi] - self.lower[bi]
                    t = max(room, 0.0) / -rate[i]
                    up = False
                else:
                    continue
                if t < t_min - PIVOT_TOL or (t <= t_min + PIVOT_TOL and bi < best_var):
                    t_min = min(t_min, t)
                    leave_pos = i
                    hit_upper = up
                    best_var = bi
            if not np.isfinite(t_min):
                raise InternalError("unbounded ray met despite finite boxes")
            t_step = max(t_min, 0.0)
            if leave_pos < 0:
                # bound flip: the entering variable crosses its own box
                self.x[self.basis] += t_step * rate
                self.x[enter] = (
                    self.upper[enter] if delta > 0 else self.lower[enter]
                )
                self.status[enter] = _AT_UPPER if delta > 0 else _AT_LOWER
                continue
            leave = int(self.basis[leave_pos])
            self.x[self.basis] += t_step * rate
            self.x[enter] = self.x[enter] + delta * t_step
            self.x[leave] = self.upper[leave] if hit_upper else self.lower[leave]
            self.status[enter] = _BASIC
            self.status[leave] = _AT_UPPER if hit_upper else _AT_LOWER
            self.basis[leave_pos] = enter

    def _polish(self):
        """Recompute basic values from the nonbasic ones to cut drift."""
        nonbasic = self.status != _BASIC
        rhs = self.b - self.A[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = self._solve_b(rhs)

    def solve(self, c_real):
        """Phase 1, then phase 2 with c_real (zeros mean feasibility only).

        Returns (feasible, x_real, phase1_objective, duals_at_phase1_end).
        """
        ncols = self.ncols
        self._setup_phase1()
        c1 = np.zeros(ncols + self.nrows)
        c1[ncols:] = 1.0
        self._iterate(c1)
        phase1 = float(self.x[ncols:].sum())
        y1 = self.duals.copy()
        scale = max(1.0, float(np.abs(self.b).max()))
        if phase1 > BOUND_TOL * scale:
            return False, None, phase1, y1
        # freeze artificials at zero and optimize the real objective
        self.upper[ncols:] = 0.0
        self.x[ncols:] = np.minimum(self.x[ncols:], 0.0)
        if np.any(c_real):
            c2 = np.concatenate([c_real, np.zeros(self.nrows)])
            self._iterate(c2)
        self._polish()
        return True, self.x[:ncols].copy(), phase1, y1


def _verify_witness(lp, u, context):
    # the published witness contract: equality residual and bound slip
    # both within RESIDUAL_TOL; ill-conditioned bases can drift past the
    # much tighter pivoting tolerance without being wrong answers
    resid = float(np.abs(lp.G @ u - lp.x0).max()) if u.size else 0.0
    low_viol = float(np.max(lp.lower - u, initial=0.0))
    up_viol = float(np.max(u - lp.upper, initial=0.0))
    if resid > RESIDUAL_TOL or low_viol > RESIDUAL_TOL or up_viol > RESIDUAL_TOL:
        raise InternalError(
            f"{context}: witness failed verification "
            f"(residual={resid:.3e}, bound violation={max(low_viol, up_viol):.3e})"
        )
    return resid


def _farkas_certificate(lp, y):
    """Extract a separating direction from phase-1 duals, if it validates.

    A valid certificate d satisfies d . x0 > max over the box of d . G u.
    """
    best = None
    best_gap = 0.0
    for d in (y, -y):
        nd = float(np.linalg.norm(d))
        if nd <= 0.0 or not np.isfinite(nd):
            continue
        d = d / nd
        coeff = lp.G.T @ d
        boxmax = float(
            np.sum(np.where(coeff > 0.0, coeff * lp.upper, coeff * lp.lower))
        )
        gap = float(d @ lp.x0) - boxmax
        if gap > best_gap:
            best_gap = gap
            best = d
    return best


def feasible(lp):
    """Decide G u = x0 over the box; witness or Farkas-style certificate."""
    solver = _Simplex(
        lp.G.copy(), lp.x0.copy(), lp.lower.copy(), lp.upper.copy()
    )
    ok, u, phase1, y = solver.solve(np.zeros(lp.G.shape[1]))
    if not ok:
        return FeasibilityResult(
            feasible=False,
            witness=None,
            certificate=_farkas_certificate(lp, y),
            residual=phase1,
        )
    resid = _verify_witness(lp, u, "feasible")
    return FeasibilityResult(
        feasible=True, witness=u, certificate=None, residual=resid
    )


def optimize(lp, sense="min"):
    """Optimize lp.objective over the feasible box slice.

    Optimality is certified by the reduced-cost signs at 1e-9; a failed
    certification raises InternalError. Raises Infeasible when the
    equality system has no point in the box.
    """
    if lp.objective is None:
        raise ValueError("optimize requires an objective")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    c = lp.objective if sense == "min" else -lp.objective
    solver = _Simplex(
        lp.G.copy(), lp.x0.copy(), lp.lower.copy(), lp.upper.copy()
    )
    ok, u, phase1, y = solver.solve(c.copy())
    if not ok:
        raise Infeasible(
            f"no feasible point (phase-1 residual {phase1:.3e})",
            certificate=_farkas_certificate(lp, y),
        )
    _verify_witness(lp, u, "optimize")
    ncols = lp.G.shape[1]
    red = solver.reduced[:ncols]
    stat = solver.status[:ncols]
    bad = np.any(((stat == _AT_LOWER) & (red < -BOUND_TOL))) or np.any(
        (stat == _AT_UPPER) & (red > BOUND_TOL)
    )
    if bad:
        raise InternalError("optimality certification by reduced costs failed")
    value = float(lp.objective @ u)
    return OptimizeResult(value=value, witness=u)


def max_margin(lp):
    """Largest uniform shrink s of the box keeping G u = x0 solvable.

    Maximizes s subject to G u = x0, lower + s <= u <= upper - s,
    0 <= s <= 1. A margin of zero (within 1e-8) means x0 sits on the
    boundary of the reachable set; raises Infeasible when x0 is outside
    even the unshrunk box image.
    """
    n, m = lp.G.shape
    span = lp.upper - lp.lower
    s_cap = float(min(1.0, 0.5 * span.min()))
    if s_cap < 0.0:
        s_cap = 0.0
    # variables: u (m), s (1), hi-slack w (m), lo-slack v (m)
    #   G u = x0
    #   u_i + s + w_i = upper_i
    #  -u_i + s + v_i = -lower_i
    ncols = 3 * m + 1
    A = np.zeros((n + 2 * m, ncols))
    A[:n, :m] = lp.G
    A[n : n + m, :m] = np.eye(m)
    A[n : n + m, m] = 1.0
    A[n : n + m, m + 1 : 2 * m + 1] = np.eye(m)
    A[n + m :, :m] = -np.eye(m)
    A[n + m :, m] = 1.0
    A[n + m :, 2 * m + 1 :] = np.eye(m)
    b = np.concatenate([lp.x0, lp.upper, -lp.lower])
    lower = np.concatenate([lp.lower, [0.0], np.zeros(2 * m)])
    upper = np.concatenate([lp.upper, [s_cap], np.tile(span, 2)])
    c = np.zeros(ncols)
    c[m] = -1.0  # maximize s
    solver = _Simplex(A, b, lower, upper)
    ok, full, phase1, y = solver.solve(c)
    if not ok:
        raise Infeasible(
            f"state is outside the region (phase-1 residual {phase1:.3e})",
            certificate=_farkas_certificate(lp, y[:n]),
        )
    s = float(full[m])
    u = full[:m]
    _verify_witness(lp, u, "max_margin")
    shrink_viol = float(
        max(
            np.max(lp.lower + s - u, initial=0.0),
            np.max(u - (lp.upper - s), initial=0.0),
        )
    )
    if shrink_viol > MARGIN_TOL:
        raise InternalError(
            f"max_margin witness violates shrunken bounds by {shrink_viol:.3e}"
        )
    return MarginResult(margin=s, witness=u)
