"""Max-min weighted capacity via bisection over LP feasibility.

The threshold ``t`` lives on the nats scale of ``w_i * ln(1 + sinr_i)``;
a target ``t`` is achievable iff the SINR thresholds
``gamma_i(t) = exp(t / w_i) - 1`` admit a feasible power vector, which
the ``linprog`` module decides.  Feasibility is downward closed in
``t``, so the supremum is found by bisection between a feasible lower
end (full power) and an infeasible upper end (per-link SINR maxima).
Reported objectives and rates are converted to bits at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linprog
from .errors import InfeasibleRegionError, NonConvergence
from .model import LN2, NetworkModel, sinr, validate, weighted_min_capacity


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the bisection and its Dinkelbach subroutine.

    ``midpoint`` selects the probe rule: ``"exp"`` bisects in the
    ``e^t`` domain, ``"arith"`` in ``t`` itself.  Both converge; the
    arithmetic rule guarantees the textbook iteration bound
    ``ceil(log2(bracket / eps))`` while the exponential rule can exceed
    it on very wide brackets.
    """

    eps: float = 1e-6
    max_bisect_iters: int = 200
    dinkelbach_tol: float = 1e-10
    dinkelbach_max_iters: int = 100
    midpoint: str = "exp"

    def __post_init__(self):
        if min(self.eps, self.dinkelbach_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if min(self.max_bisect_iters, self.dinkelbach_max_iters) <= 0:
            raise ValueError("iteration caps must be positive")
        if self.midpoint not in ("exp", "arith"):
            raise ValueError("midpoint must be 'exp' or 'arith'")


@dataclass(frozen=True)
class DinkelbachResult:
    lambda_star: float
    p_at_opt: np.ndarray
    iterations: int


@dataclass(frozen=True)
class MaxMinResult:
    """Outcome of the bisection.

    ``t_star`` is the nats-scale threshold; ``objective_bits`` is
    ``min_i w_i log2(1 + sinr_i)`` evaluated at ``p_star``.
    ``bracket_trace`` records ``(t_min, t_max, probe_feasible)`` after
    every probe.
    """

    t_star: float
    objective_bits: float
    p_star: np.ndarray
    iterations: int
    bracket_trace: list[tuple[float, float, bool]] = field(default_factory=list)


def gamma_for_threshold(model: NetworkModel, t: float) -> np.ndarray:
    """SINR thresholds equivalent to ``w_i * ln(1 + sinr_i) >= t``."""
    return np.expm1(max(t, 0.0) / model.weights)


def max_sinr(
    model: NetworkModel,
    link: int,
    extra_rows: tuple[np.ndarray, np.ndarray] | None = None,
    options: SolverOptions | None = None,
) -> DinkelbachResult:
    """Maximize ``sinr_link`` over the box, optionally cut by linear rows.

    Runs Dinkelbach's parametric scheme: each round solves the LP
    ``maximize gain_ii p_i - lambda * (interference_i + noise_i)`` and
    resets ``lambda`` to the SINR at the LP optimum, stopping once the
    LP value drops to zero (within tolerance).  Without extra rows the
    answer is closed form -- interferers silent, own power at the cap --
    and is returned directly.
    """
    opts = options or SolverOptions()
    validate(model)
    m = model.num_links
    diag = model.gain[link, link]

    if extra_rows is None:
        p = np.zeros(m)
        p[link] = model.p_max[link]
        lam = diag * model.p_max[link] / model.noise[link]
        return DinkelbachResult(lambda_star=float(lam), p_at_opt=p, iterations=0)

    a_extra, b_extra = extra_rows
    penalty = model.gain[:, link].copy()
    penalty[link] = 0.0
    scale = max(1.0, diag * model.p_max[link])

    lam = 1.0
    p_opt = None
    for it in range(1, opts.dinkelbach_max_iters + 1):
        obj = -lam * penalty
        obj[link] = diag
        sol = linprog.solve_lp(
            linprog.LinearProgram(
                objective=obj,
                a_ub=a_extra,
                b_ub=b_extra,
                lower=np.zeros(m),
                upper=model.p_max.copy(),
            )
        )
        if sol.status is not linprog.LpStatus.OPTIMAL:
            raise InfeasibleRegionError("constraint region for max-SINR is empty")
        p_opt = sol.x
        gap = sol.value - lam * model.noise[link]
        num = diag * p_opt[link]
        den = penalty @ p_opt + model.noise[link]
        new_lam = num / den
        if gap <= opts.dinkelbach_tol * scale:
            return DinkelbachResult(lambda_star=float(new_lam), p_at_opt=p_opt, iterations=it)
        lam = new_lam
    raise NonConvergence("Dinkelbach failed to converge within its iteration cap")


def initial_bracket(model: NetworkModel) -> tuple[float, float]:
    """Feasible lower / infeasible-or-optimal upper bound on the threshold.

    ``t_min`` evaluates the objective at full power (always achievable);
    ``t_max`` combines the per-link zero-interference SINR maxima, which
    no power vector can beat simultaneously.
    """
    validate(model)
    t_min = float(np.min(model.weights * np.log1p(sinr(model, model.p_max))))
    lam = np.array([max_sinr(model, i).lambda_star for i in range(model.num_links)])
    t_max = float(np.min(model.weights * np.log1p(lam)))
    return t_min, max(t_max, t_min)


def _midpoint(t_lo: float, t_hi: float, rule: str) -> float:
    if rule == "exp":
        return float(np.logaddexp(t_lo, t_hi) - LN2)
    return 0.5 * (t_lo + t_hi)


def _min_power_at(model: NetworkModel, t: float) -> np.ndarray:
    lp = linprog.threshold_constraints(model, gamma_for_threshold(model, t))
    sol = linprog.solve_lp(lp)
    if sol.status is not linprog.LpStatus.OPTIMAL:
        raise NonConvergence(f"threshold certified feasible earlier became infeasible at t={t!r}")
    return sol.x


def solve_maxmin(model: NetworkModel, options: SolverOptions | None = None) -> MaxMinResult:
    """Find the largest achievable ``min_i w_i * ln(1 + sinr_i)`` within ``eps``.

    The returned powers are the minimal-total-power vector achieving the
    final threshold, which makes the result deterministic and pins every
    threshold row tight (weighted rates equalize across links).
    """
    opts = options or SolverOptions()
    validate(model)
    t_min, t_max = initial_bracket(model)
    trace: list[tuple[float, float, bool]] = []
    iterations = 0

    if t_max - t_min > opts.eps and linprog.feasible(model, gamma_for_threshold(model, t_max)):
        # Degenerate case (e.g. no cross interference): the upper bound is achievable.
        t_min = t_max

    while t_max - t_min > opts.eps:
        if iterations >= opts.max_bisect_iters:
            raise NonConvergence(
                f"bracket still {t_max - t_min:.3e} wide after {iterations} bisection steps"
            )
        t = _midpoint(t_min, t_max, opts.midpoint)
        if not (t_min < t < t_max):  # floating-point underflow of the bracket
            break
        ok = linprog.feasible(model, gamma_for_threshold(model, t))
        if ok:
            t_min = t
        else:
            t_max = t
        iterations += 1
        trace.append((t_min, t_max, ok))

    p_star = _min_power_at(model, t_min)
    return MaxMinResult(
        t_star=t_min,
        objective_bits=weighted_min_capacity(model, p_star),
        p_star=p_star,
        iterations=iterations,
        bracket_trace=trace,
    )
