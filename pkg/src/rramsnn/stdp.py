"""Exponential STDP update rules and conductance-level quantization.

Two rule variants live here: the training rule used throughout the
simulator (potentiation for causal pairings, dt >= 0) and the
Bi-and-Poo-style illustrative rule with 1.5-exponent saturation factors.
Both operate on conductances normalized to [g_min, g_max].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StdpParams",
    "BiPooParams",
    "delta_g_train",
    "delta_g_bipoo",
    "quantize",
]


@dataclass(frozen=True)
class StdpParams:
    """Parameters of the training STDP rule.

    ``a_plus`` / ``a_minus`` are the maximum fractional conductance
    changes (the learning-rates), expressed as fractions of ``g_max``.
    """

    a_plus: float = 0.02
    a_minus: float = 0.01
    tau_plus: float = 50.0  # ms
    tau_minus: float = 50.0  # ms
    p: float = 1.0
    g_max: float = 1.0
    g_min: float = 0.0

    def __post_init__(self):
        if self.a_plus < 0 or self.a_minus < 0:
            raise ValueError("a_plus and a_minus must be non-negative")
        if self.tau_plus <= 0 or self.tau_minus <= 0:
            raise ValueError("tau_plus and tau_minus must be positive")
        if self.p < 0:
            raise ValueError("saturation exponent p must be non-negative")
        if self.g_max <= self.g_min:
            raise ValueError("g_max must exceed g_min")


@dataclass(frozen=True)
class BiPooParams:
    """Parameters of the illustrative bi-exponential rule.

    ``a_plus`` is positive, ``a_minus`` non-positive; saturation uses
    fixed 1.5 exponents: S+(g) = (1-g)^1.5, S-(g) = g^1.5.
    """

    a_plus: float = 1.0
    a_minus: float = -1.0
    tau_plus: float = 50.0  # ms
    tau_minus: float = 50.0  # ms
    sat_exponent: float = 1.5

    def __post_init__(self):
        if not (self.a_plus > 0 >= self.a_minus):
            raise ValueError("require a_plus > 0 >= a_minus")
        if self.tau_plus <= 0 or self.tau_minus <= 0:
            raise ValueError("time constants must be positive")


def _check_g(g, lo, hi):
    g = np.asarray(g, dtype=float)
    valid = np.isnan(g) | ((g >= lo) & (g <= hi))
    if not np.all(valid):
        raise ValueError(f"conductance outside [{lo}, {hi}]")
    return g


def delta_g_train(dt, g, params: StdpParams):
    """Conductance change for a pairing with time gap ``dt`` (ms).

    dt >= 0 (causal) potentiates: +a_plus * exp(-dt/tau+) * (1 - g/g_max)^p.
    dt < 0 depresses: -a_minus * exp(dt/tau-) * (g/g_max)^p, so the
    magnitude decays as |dt| grows on both branches. The result is
    clamped so that g + dg stays within [g_min, g_max]. NaN entries in
    ``dt`` (no pairing) yield 0.

    Accepts scalars or broadcastable arrays; returns a matching shape.
    """
    g = _check_g(g, params.g_min, params.g_max)
    dt = np.asarray(dt, dtype=float)
    gn = (g - params.g_min) / (params.g_max - params.g_min)

    causal = dt >= 0
    with np.errstate(invalid="ignore"):
        pot = params.a_plus * np.exp(-np.abs(dt) / params.tau_plus)
        dep = params.a_minus * np.exp(-np.abs(dt) / params.tau_minus)
    dg = np.where(causal, pot * (1.0 - gn) ** params.p, -dep * gn**params.p)
    dg = dg * params.g_max
    dg = np.where(np.isnan(dt), 0.0, dg)
    dg = np.clip(dg, params.g_min - g, params.g_max - g)
    if np.ndim(dt) == 0 and np.ndim(g) == 0:
        return float(dg)
    return dg


def delta_g_bipoo(dt, g, params: BiPooParams):
    """Illustrative bi-exponential rule with saturation factors.

    Keeps the printed branch assignment of the source rule: the
    potentiating amplitude applies for dt < 0 and the (negative)
    depressing amplitude for dt >= 0; magnitudes decay in |dt| on both
    sides. S+(g) = (1-g)^1.5 zeroes potentiation at g = 1; S-(g) =
    g^1.5 zeroes depression at g = 0.
    """
    g = _check_g(g, 0.0, 1.0)
    dt = np.asarray(dt, dtype=float)
    s_plus = (1.0 - g) ** params.sat_exponent
    s_minus = g**params.sat_exponent
    pot = params.a_plus * s_plus * np.exp(-np.abs(dt) / params.tau_plus)
    dep = params.a_minus * s_minus * np.exp(-np.abs(dt) / params.tau_minus)
    dg = np.where(dt < 0, pot, dep)
    if np.ndim(dt) == 0 and np.ndim(g) == 0:
        return float(dg)
    return dg


def quantize(g, n_levels: int, g_min: float = 0.0, g_max: float = 1.0):
    """Snap ``g`` to the nearest of ``n_levels`` uniform levels.

    Levels are g_min + i*(g_max-g_min)/(n_levels-1) for i in
    [0, n_levels). Exact midpoints round toward the higher level.
    """
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")
    g = _check_g(g, g_min, g_max)
    step = (g_max - g_min) / (n_levels - 1)
    idx = np.floor((g - g_min) / step + 0.5)
    out = g_min + idx * step
    if np.ndim(g) == 0:
        return float(out)
    return out
