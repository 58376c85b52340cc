"""Dense two-phase simplex and builders for SINR-threshold constraint systems.

The problems this package generates are tiny (tens of variables), so a
plain dense tableau with Bland's anti-cycling rule is both sufficient
and fully deterministic.  The solver maximizes ``objective @ x`` over
``a_ub @ x <= b_ub`` with per-variable bounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .model import NetworkModel

#: A point is accepted as feasible when every row residual is within
#: ``FEAS_RTOL * (1 + |b_row|)``.
FEAS_RTOL = 1e-9

_PIVOT_TOL = 1e-11


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective @ x  s.t.  a_ub @ x <= b_ub,  lower <= x <= upper``."""

    objective: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "objective", np.atleast_1d(np.asarray(self.objective, float)))
        object.__setattr__(self, "a_ub", np.asarray(self.a_ub, float).reshape(-1, self.objective.size))
        object.__setattr__(self, "b_ub", np.atleast_1d(np.asarray(self.b_ub, float)))
        object.__setattr__(self, "lower", np.atleast_1d(np.asarray(self.lower, float)))
        object.__setattr__(self, "upper", np.atleast_1d(np.asarray(self.upper, float)))
        n = self.objective.size
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("bounds must match the variable count")
        if self.a_ub.shape[0] != self.b_ub.size:
            raise ValueError("a_ub and b_ub row counts differ")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        if not np.all(np.isfinite(self.lower)):
            raise ValueError("lower bounds must be finite")


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    value: float = float("nan")


def _pivot(tab, basis, row, col):
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and tab[r, col] != 0.0:
            tab[r] -= tab[r, col] * tab[row]
    basis[row] = col


def _simplex_phase(tab, basis, n_cols, iter_cap):
    """Run Bland-rule simplex on a tableau whose last row is the (negated) objective.

    Returns "optimal" or "unbounded"; raises NumericalFailure past the cap.
    """
    n_rows = tab.shape[0] - 1
    for _ in range(iter_cap):
        cost = tab[-1, :n_cols]
        candidates = np.flatnonzero(cost < -_PIVOT_TOL)
        if candidates.size == 0:
            return "optimal"
        col = candidates[0]  # Bland: smallest index
        ratios = np.full(n_rows, np.inf)
        pos = tab[:n_rows, col] > _PIVOT_TOL
        ratios[pos] = tab[:n_rows, -1][pos] / tab[:n_rows, col][pos]
        if not np.any(np.isfinite(ratios)):
            return "unbounded"
        best = np.min(ratios)
        ties = np.flatnonzero(ratios <= best + _PIVOT_TOL * (1.0 + abs(best)))
        row = ties[np.argmin(basis[ties])]  # Bland on the leaving variable
        _pivot(tab, basis, row, col)
    raise NumericalFailure("simplex iteration cap exceeded")


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve a small dense LP with a two-phase simplex.

    Optimal solutions are re-substituted into the original constraints;
    a violation beyond the feasibility tolerance raises
    ``NumericalFailure`` instead of returning a bogus optimum.
    """
    n = lp.objective.size
    span = lp.upper - lp.lower
    finite_ub = np.flatnonzero(np.isfinite(span))

    # Shift to y = x - lower >= 0; upper bounds become explicit rows.
    a_rows = [lp.a_ub] if lp.a_ub.size else []
    b_rows = [lp.b_ub - lp.a_ub @ lp.lower] if lp.a_ub.size else []
    if finite_ub.size:
        eye = np.zeros((finite_ub.size, n))
        eye[np.arange(finite_ub.size), finite_ub] = 1.0
        a_rows.append(eye)
        b_rows.append(span[finite_ub])
    a = np.vstack(a_rows) if a_rows else np.zeros((0, n))
    b = np.concatenate(b_rows) if b_rows else np.zeros(0)
    k = a.shape[0]

    # Row equilibration keeps mixed mW / uW magnitudes off the pivots.
    scale = np.maximum(np.max(np.abs(a), axis=1, initial=0.0), np.abs(b))
    scale[scale < 1e-300] = 1.0
    a = a / scale[:, None]
    b = b / scale

    flip = b < 0.0
    a[flip] *= -1.0
    b[flip] *= -1.0
    slack_sign = np.where(flip, -1.0, 1.0)

    art_rows = np.flatnonzero(flip)
    n_art = art_rows.size
    n_cols = n + k + n_art
    iter_cap = 50 * (n + k + n_art)

    tab = np.zeros((k + 1, n_cols + 1))
    tab[:k, :n] = a
    tab[:k, n:n + k] = np.diag(slack_sign)
    tab[:k, -1] = b
    basis = np.empty(k, dtype=int)
    basis[:] = n + np.arange(k)
    for idx, r in enumerate(art_rows):
        tab[r, n + k + idx] = 1.0
        basis[r] = n + k + idx

    if n_art:
        # Phase 1: minimize the artificial sum (stored negated in the last row).
        tab[-1, :] = -tab[art_rows].sum(axis=0)
        tab[-1, n + k:n + k + n_art] = 0.0
        status = _simplex_phase(tab, basis, n_cols, iter_cap)
        if status != "optimal":  # pragma: no cover - cannot happen: phase 1 is bounded
            raise NumericalFailure("phase 1 terminated " + status)
        if tab[-1, -1] < -1e-9:
            return LpSolution(status=LpStatus.INFEASIBLE)
        # Drive leftover artificials out of the basis where possible.
        for r in np.flatnonzero(basis >= n + k):
            cols = np.flatnonzero(np.abs(tab[r, :n + k]) > _PIVOT_TOL)
            if cols.size:
                _pivot(tab, basis, r, cols[0])

    obj = np.zeros(n_cols + 1)
    obj[:n] = -lp.objective
    tab[-1] = obj
    tab[-1, n + k:n + k + n_art] = 0.0
    for r, col in enumerate(basis):
        if col < n and tab[-1, col] != 0.0:
            tab[-1] -= tab[-1, col] * tab[r]
    # Blocked artificials stay pinned at zero; mask their columns.
    tab[:, n + k:n + k + n_art] = 0.0

    status = _simplex_phase(tab, basis, n + k, iter_cap)
    if status == "unbounded":
        return LpSolution(status=LpStatus.UNBOUNDED, value=float("inf"))

    y = np.zeros(n_cols)
    y[basis] = tab[:k, -1]
    # Refine the vertex by re-solving the basis system directly; sequential
    # pivots accumulate roundoff that a single factorization avoids.
    if k:
        cols = np.zeros((k, k))
        for r, col in enumerate(basis):
            if col < n:
                cols[:, r] = a[:, col]
            elif col < n + k:
                cols[col - n, r] = slack_sign[col - n]
            else:
                cols[art_rows[col - n - k], r] = 1.0
        try:
            y_basic = np.linalg.solve(cols, b)
            if np.all(y_basic >= -1e-9):
                y[:] = 0.0
                y[basis] = np.maximum(y_basic, 0.0)
        except np.linalg.LinAlgError:
            pass
    x = lp.lower + y[:n]
    x = np.clip(x, lp.lower, np.where(np.isfinite(lp.upper), lp.upper, np.inf))
    _verify(lp, x)
    return LpSolution(status=LpStatus.OPTIMAL, x=x, value=float(lp.objective @ x))


def row_tolerances(a_ub: np.ndarray, b_ub: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Backward-error feasibility tolerance per row at the point ``x``.

    A residual is indistinguishable from zero once it is below
    ``FEAS_RTOL`` times the magnitude of the terms that produced it, so
    the tolerance scales with ``|a_row| @ |x|`` as well as ``|b_row|``.
    """
    return FEAS_RTOL * (1.0 + np.abs(b_ub) + np.abs(a_ub) @ np.abs(x))


def _verify(lp: LinearProgram, x: np.ndarray) -> None:
    if lp.a_ub.size == 0:
        return
    resid = lp.a_ub @ x - lp.b_ub
    worst = np.max(resid - row_tolerances(lp.a_ub, lp.b_ub, x))
    if worst > 0.0:
        raise NumericalFailure(f"optimal point violates a constraint by {worst:.3e}")


def threshold_rows(model: NetworkModel, gamma) -> tuple[np.ndarray, np.ndarray]:
    """Rows of ``A p <= b`` encoding ``sinr_i >= gamma_i`` for every ``gamma_i > 0``.

    The SINR bound ``gain[i,i] p_i >= gamma_i (sum_{j!=i} gain[j,i] p_j + noise_i)``
    is rewritten as ``-gain[i,i] p_i + gamma_i sum_{j!=i} gain[j,i] p_j <= -gamma_i noise_i``.
    Rows with ``gamma_i == 0`` hold for any ``p >= 0`` and are dropped.
    """
    gamma = np.atleast_1d(np.asarray(gamma, float))
    m = model.num_links
    keep = np.flatnonzero(gamma > 0.0)
    a = np.zeros((keep.size, m))
    for r, i in enumerate(keep):
        a[r] = gamma[i] * model.gain[:, i]
        a[r, i] = -model.gain[i, i]
    b = -gamma[keep] * model.noise[keep]
    return a, b


def threshold_constraints(model: NetworkModel, gamma, objective=None) -> LinearProgram:
    """Feasibility LP for SINR thresholds ``gamma``, boxed by ``0 <= p <= p_max``.

    The default objective minimizes total power (encoded as maximizing
    its negation), which makes the returned vertex the minimal-power
    point hitting the thresholds.
    """
    a, b = threshold_rows(model, gamma)
    m = model.num_links
    if objective is None:
        objective = -np.ones(m)
    return LinearProgram(
        objective=np.asarray(objective, float),
        a_ub=a,
        b_ub=b,
        lower=np.zeros(m),
        upper=model.p_max.copy(),
    )


def feasible(model: NetworkModel, gamma) -> bool:
    """True iff some ``0 <= p <= p_max`` meets every SINR threshold in ``gamma``."""
    sol = solve_lp(threshold_constraints(model, gamma))
    return sol.status is LpStatus.OPTIMAL
