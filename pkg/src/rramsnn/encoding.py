"""Latency encoding of feature vectors through banks of linear sensors.

Each feature drives ``k`` sensors with triangular receptive fields laid
out over [0, 1]. A sensor's activation maps linearly to a single spike
time inside the presentation window: full activation spikes at t = 0,
weaker activation spikes later, zero activation stays silent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SensorBank", "SpikeTrain", "encode", "encode_times"]


def _default_centers(k: int) -> np.ndarray:
    return (np.arange(k) + 0.5) / k


@dataclass(frozen=True)
class SensorBank:
    """Per-feature bank of triangular receptive fields.

    ``centers`` are shared by every feature; ``width`` is the half-base
    of the triangle. Defaults give adjacent fields 50% overlap.
    """

    sensors_per_feature: int = 4
    t_win: float = 100.0  # ms
    centers: tuple = None
    width: float = None

    def __post_init__(self):
        k = self.sensors_per_feature
        if k < 1:
            raise ValueError("sensors_per_feature must be >= 1")
        if self.t_win <= 0:
            raise ValueError("t_win must be positive")
        if self.centers is None:
            object.__setattr__(self, "centers", tuple(_default_centers(k)))
        if self.width is None:
            object.__setattr__(self, "width", 2.0 / k)
        c = np.asarray(self.centers, dtype=float)
        if len(c) != k:
            raise ValueError("need one center per sensor")
        if np.any(np.diff(c) <= 0) or c.min() < 0 or c.max() > 1:
            raise ValueError("centers must be strictly increasing within [0, 1]")
        if self.width <= 0:
            raise ValueError("width must be positive")

    def n_neurons(self, n_features: int) -> int:
        return n_features * self.sensors_per_feature


@dataclass(frozen=True)
class SpikeTrain:
    """Single-spike-per-neuron events inside one presentation window.

    ``times`` holds one entry per input neuron, NaN marking silence.
    ``events`` yields the (neuron_id, t) list sorted by time.
    """

    times: np.ndarray
    t_win: float

    @property
    def events(self):
        idx = np.flatnonzero(~np.isnan(self.times))
        order = idx[np.argsort(self.times[idx], kind="stable")]
        return [(int(i), float(self.times[i])) for i in order]

    def __len__(self):
        return int(np.sum(~np.isnan(self.times)))


def encode_times(features: np.ndarray, bank: SensorBank) -> np.ndarray:
    """Spike-time array of shape (F * k,) for a normalized feature vector.

    Sensor j of feature x fires at t = t_win * (1 - a) where
    a = max(0, 1 - |x - c_j| / width); silent sensors get NaN.
    """
    x = np.asarray(features, dtype=float)
    if np.any((x < 0) | (x > 1)) or not np.all(np.isfinite(x)):
        raise ValueError("features must lie in [0, 1]")
    c = np.asarray(bank.centers)
    a = 1.0 - np.abs(x[:, None] - c[None, :]) / bank.width
    a = np.maximum(a, 0.0)
    times = bank.t_win * (1.0 - a)
    times[a <= 0.0] = np.nan
    return times.ravel()


def encode(features: np.ndarray, bank: SensorBank) -> SpikeTrain:
    """Encode a normalized feature vector as a SpikeTrain."""
    return SpikeTrain(times=encode_times(features, bank), t_win=bank.t_win)
