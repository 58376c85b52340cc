"""Interference-network data model and per-link capacity metrics.

An instance couples ``M`` transmitter/receiver pairs through a gain
matrix: entry ``(j, i)`` is the (dimensionless) power gain from
transmitter ``j`` into receiver ``i``, so the diagonal carries the
direct-link gains.  All powers are in milliwatts.  The SINR of link
``i`` at power vector ``p`` is

    sinr_i = gain[i, i] * p[i] / (sum_{j != i} gain[j, i] * p[j] + noise[i])

and the link rate is ``log(1 + sinr_i)`` -- base 2 for bits per channel
use, natural log for nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroRateError

LN2 = float(np.log(2.0))


def _as_readonly(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class NetworkModel:
    """Immutable description of one interference network.

    Parameters
    ----------
    gain : (M, M) array_like
        Channel gains; ``gain[j, i]`` couples transmitter ``j`` into
        receiver ``i``.
    p_max : (M,) array_like
        Per-link transmit power caps, mW.
    noise : (M,) array_like
        Receiver noise powers, mW.
    weights : (M,) array_like
        Strictly positive link weights.
    min_rates : (M,) array_like, optional
        Per-link rate floors in bits per channel use; only the latency
        solver consumes these.
    """

    gain: np.ndarray
    p_max: np.ndarray
    noise: np.ndarray
    weights: np.ndarray
    min_rates: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "gain", np.atleast_2d(_as_readonly(self.gain)))
        for name in ("p_max", "noise", "weights"):
            object.__setattr__(self, name, np.atleast_1d(_as_readonly(getattr(self, name))))
        if self.min_rates is not None:
            object.__setattr__(self, "min_rates", np.atleast_1d(_as_readonly(self.min_rates)))

    @property
    def num_links(self) -> int:
        return self.gain.shape[0]


@dataclass(frozen=True)
class LinkMetrics:
    """Per-link SINR and Shannon capacities at one power vector."""

    sinr: np.ndarray
    capacity_bits: np.ndarray
    capacity_nats: np.ndarray


def validate(model: NetworkModel) -> None:
    """Check every model invariant, raising ``ValidationError`` on the first breach."""
    g = model.gain
    m = model.num_links
    if m < 1:
        raise ValidationError("model needs at least one link")
    if g.ndim != 2 or g.shape != (m, m):
        raise ValidationError(f"gain must be square, got shape {g.shape}")
    for name in ("p_max", "noise", "weights"):
        vec = getattr(model, name)
        if vec.shape != (m,):
            raise ValidationError(f"{name} must have length {m}, got shape {vec.shape}")
    if not np.all(np.isfinite(g)) or np.any(g < 0):
        raise ValidationError("gain entries must be finite and nonnegative")
    if np.any(np.diag(g) <= 0):
        raise ValidationError("diagonal (direct-link) gains must be positive")
    if np.any(model.p_max <= 0) or not np.all(np.isfinite(model.p_max)):
        raise ValidationError("p_max entries must be positive and finite")
    if np.any(model.noise <= 0) or not np.all(np.isfinite(model.noise)):
        raise ValidationError("noise powers must be positive and finite")
    if np.any(model.weights <= 0) or not np.all(np.isfinite(model.weights)):
        raise ValidationError("weights must be positive and finite")
    if model.min_rates is not None:
        if model.min_rates.shape != (m,):
            raise ValidationError(f"min_rates must have length {m}")
        if np.any(model.min_rates < 0) or not np.all(np.isfinite(model.min_rates)):
            raise ValidationError("min_rates must be nonnegative and finite")


def check_power(model: NetworkModel, p) -> np.ndarray:
    """Coerce ``p`` to an array and verify ``0 <= p <= p_max`` componentwise."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (model.num_links,):
        raise ValidationError(f"power vector must have length {model.num_links}")
    tol = 1e-9 * (1.0 + model.p_max)
    if np.any(p < -tol) or np.any(p > model.p_max + tol):
        raise ValidationError("power vector outside [0, p_max]")
    return np.clip(p, 0.0, model.p_max)


def interference(model: NetworkModel, p) -> np.ndarray:
    """Interference-plus-noise power seen by each receiver, mW."""
    p = np.asarray(p, dtype=float)
    direct = np.diag(model.gain) * p
    return p @ model.gain - direct + model.noise


def sinr(model: NetworkModel, p) -> np.ndarray:
    p = check_power(model, p)
    return np.diag(model.gain) * p / interference(model, p)


def capacity(model: NetworkModel, p) -> LinkMetrics:
    """SINR and Shannon capacities (bits and nats per channel use) at ``p``."""
    s = sinr(model, p)
    nats = np.log1p(s)
    return LinkMetrics(sinr=s, capacity_bits=nats / LN2, capacity_nats=nats)


def weighted_min_capacity(model: NetworkModel, p) -> float:
    """The max-min objective: ``min_i weights_i * capacity_bits_i``."""
    return float(np.min(model.weights * capacity(model, p).capacity_bits))


def weighted_latency(model: NetworkModel, p) -> float:
    """Weighted sum of reciprocal rates, ``sum_i weights_i / capacity_bits_i``.

    Raises ``ZeroRateError`` for any zero-capacity link rather than
    returning infinity; a silent infinity would mask modeling errors.
    """
    rates = capacity(model, p).capacity_bits
    if np.any(rates == 0.0):
        raise ZeroRateError("at least one link has zero capacity")
    return float(np.sum(model.weights / rates))
