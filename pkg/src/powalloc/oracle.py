"""Independent verifiers: interference fixed point and brute-force grids.

Nothing here touches the solvers under test.  The fixed-point check
exploits the standard-interference-function structure of the SINR
constraints: iterating the minimal-power map from zero produces a
componentwise nondecreasing sequence that either converges to the
minimal feasible power vector or provably escapes the power box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooLargeError, IterationCapError, NoFeasibleGridPointError
from .model import LN2, NetworkModel, validate

_GRID_GUARD = 10 ** 8


@dataclass(frozen=True)
class GridSpec:
    """Uniform per-axis grid over ``[0, p_max_i]``."""

    points_per_axis: int = 101

    def __post_init__(self):
        if self.points_per_axis < 2:
            raise ValueError("need at least two points per axis")


@dataclass(frozen=True)
class GridSearchResult:
    objective_bits: float
    p: np.ndarray
    certified_gap: float


def fixed_point_feasibility(
    model: NetworkModel,
    gamma,
    step_tol: float = 1e-12,
    cap_rtol: float = 1e-9,
    max_iters: int = 1_000_000,
) -> tuple[bool, np.ndarray | None]:
    """Exact feasibility of SINR targets via the minimal-power fixed point.

    Iterates ``p_i <- gamma_i * (interference_i(p) + noise_i) / gain_ii``
    from ``p = 0``.  Convergence below ``p_max`` yields the minimal
    feasible point; any component escaping the box certifies
    infeasibility (the iterates lower-bound every feasible point).

    Returns ``(True, p_min)`` or ``(False, None)``.  Raises
    ``IterationCapError`` if neither verdict is reached within
    ``max_iters`` -- never silently truncates.
    """
    validate(model)
    gamma = np.atleast_1d(np.asarray(gamma, float))
    if np.any(gamma < 0):
        raise ValueError("gamma must be nonnegative")
    diag = np.diag(model.gain)
    coupling = model.gain.T - np.diag(diag)  # row i: gains of interferers into receiver i
    cap = model.p_max * (1.0 + cap_rtol) + 1e-15
    p = np.zeros(model.num_links)
    for _ in range(max_iters):
        nxt = gamma * (coupling @ p + model.noise) / diag
        if np.any(nxt < p - 1e-15):
            raise AssertionError("interference iteration lost monotonicity")
        if np.any(nxt > cap):
            return False, None
        if np.max(nxt - p) < step_tol:
            return True, np.minimum(nxt, model.p_max)
        p = nxt
    raise IterationCapError(f"no verdict after {max_iters} fixed-point iterations")


def _enumerate_grid(model: NetworkModel, grid: GridSpec, max_links: int):
    m = model.num_links
    if m > max_links:
        raise GridTooLargeError(f"grid oracle supports at most {max_links} links")
    if grid.points_per_axis ** m > _GRID_GUARD:
        raise GridTooLargeError("grid exceeds the enumeration guard")
    axes = [np.linspace(0.0, pm, grid.points_per_axis) for pm in model.p_max]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, m)  # lexicographic order


def _metrics_on_points(model: NetworkModel, pts: np.ndarray):
    diag = np.diag(model.gain)
    interf = pts @ model.gain - pts * diag + model.noise
    s = pts * diag / interf
    return np.log1p(s) / LN2


def _capacity_gradient_bounds(model: NetworkModel, p_floor: np.ndarray) -> np.ndarray:
    """Entry ``(k, i)``: bound on ``|d capacity_bits_k / d p_i|`` over ``[p_floor, p_max]``."""
    m = model.num_links
    diag = np.diag(model.gain)
    coupling = model.gain.T - np.diag(diag)
    den_lo = coupling @ p_floor + model.noise
    num_lo = diag * p_floor
    num_hi = diag * model.p_max
    bounds = np.empty((m, m))
    for k in range(m):
        for i in range(m):
            if i == k:
                bounds[k, i] = diag[k] / (den_lo[k] + num_lo[k])
            else:
                g = model.gain[i, k]
                bounds[k, i] = g * num_hi[k] / (den_lo[k] * (den_lo[k] + num_hi[k]))
    return bounds / LN2


def grid_search_maxmin(model: NetworkModel, grid: GridSpec) -> GridSearchResult:
    """Exhaustive max-min search with a certified optimality gap.

    The gap uses per-axis Lipschitz bounds of the weighted-min objective
    over the sub-box ``[p_lo, p_max]``, where ``p_lo`` is the minimal
    power vector achieving the best grid value; every power vector
    beating that value must dominate ``p_lo``, so the restriction is
    sound.  Ties are broken toward the lexicographically smallest point.
    """
    validate(model)
    pts = _enumerate_grid(model, grid, max_links=4)
    rates = _metrics_on_points(model, pts)
    obj = np.min(model.weights * rates, axis=1)
    best_idx = int(np.argmax(obj))  # first max = lexicographically smallest
    best = float(obj[best_idx])
    p_best = pts[best_idx]

    h = model.p_max / (grid.points_per_axis - 1)
    gamma = np.expm1(best * LN2 / model.weights)
    ok, p_lo = fixed_point_feasibility(model, gamma)
    if not ok:  # pragma: no cover - best is achieved, so its targets are feasible
        p_lo = np.zeros(model.num_links)
    p_floor = np.maximum(p_lo - h / 2.0, 0.0)
    grad = _capacity_gradient_bounds(model, p_floor)
    lipschitz = np.max(model.weights[:, None] * grad, axis=0)
    gap = float(lipschitz @ (h / 2.0))
    return GridSearchResult(objective_bits=best, p=p_best.copy(), certified_gap=gap)


def grid_search_latency(model: NetworkModel, grid: GridSpec) -> GridSearchResult:
    """Exhaustive weighted-latency search over rate-feasible grid points.

    ``objective_bits`` is achieved by ``p`` (an upper bound on the true
    minimum); the certified gap bounds how far below the true minimum
    can lie, using crude global Lipschitz estimates over the feasible
    region.  The gap is only informative when noise floors are not
    vanishingly small relative to the gains.
    """
    validate(model)
    if model.min_rates is None:
        raise NoFeasibleGridPointError("model has no min_rates to enforce")
    pts = _enumerate_grid(model, grid, max_links=3)
    rates = _metrics_on_points(model, pts)
    feas = np.all(rates >= model.min_rates - 1e-12, axis=1) & np.all(rates > 0.0, axis=1)
    if not np.any(feas):
        raise NoFeasibleGridPointError("no grid point satisfies the rate floors")
    lat = np.full(pts.shape[0], np.inf)
    lat[feas] = np.sum(model.weights / rates[feas], axis=1)
    best_idx = int(np.argmin(lat))
    best = float(lat[best_idx])

    # Rate floors give p_k >= (2^{r_k} - 1) noise_k / gain_kk on the feasible set.
    r = np.maximum(model.min_rates, 1e-12)
    p_floor = np.expm1(r * LN2) * model.noise / np.diag(model.gain)
    grad = _capacity_gradient_bounds(model, np.minimum(p_floor, model.p_max))
    h = model.p_max / (grid.points_per_axis - 1)
    lipschitz = np.sum((model.weights / r ** 2)[:, None] * grad, axis=0)
    gap = float(lipschitz @ (h / 2.0))
    return GridSearchResult(objective_bits=best, p=pts[best_idx].copy(), certified_gap=gap)
