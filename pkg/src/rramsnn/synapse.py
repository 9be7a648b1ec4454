"""Synapse backends: ideal analog, level-quantized, single device and
multi-device parallel arrays.

All backends share one surface: ``read()`` returns the synaptic
conductance in units of g_max and ``update(dt, rng)`` applies one
pairing-driven update per synapse. ``dt`` broadcasts over the array
shape; NaN entries mean "no pairing" and leave the synapse untouched.

The multi-device backend reads the mean of its n device conductances
but writes only one device per update, picked uniformly at random --
this divides the effective learning-rate by n. The periodic one-hot
selection-line scheme used by the write circuitry is modeled in
:class:`SelectionScheme`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceTable, interpolate
from .stdp import StdpParams, delta_g_train, quantize

__all__ = [
    "SynapseArray",
    "IdealSynapses",
    "QuantizedSynapses",
    "SingleDeviceSynapses",
    "MultiRramSynapses",
    "make_synapses",
    "SelectionScheme",
    "select_index",
]


class SynapseArray:
    """Common interface over an array of synapses of one backend kind."""

    shape: tuple

    def read(self) -> np.ndarray:
        raise NotImplementedError

    def update(self, dt, rng: np.random.Generator = None) -> None:
        raise NotImplementedError

    def state(self) -> np.ndarray:
        """Copy of the raw internal conductance state."""
        raise NotImplementedError

    def _dt_array(self, dt) -> np.ndarray:
        return np.broadcast_to(np.asarray(dt, dtype=float), self.shape)


class IdealSynapses(SynapseArray):
    """Continuous analog synapses driven by the training STDP rule."""

    def __init__(self, g, params: StdpParams = None):
        self.params = params or StdpParams()
        self.g = np.array(g, dtype=float)
        self.shape = self.g.shape
        span = (self.params.g_min, self.params.g_max)
        if np.any((self.g < span[0]) | (self.g > span[1])):
            raise ValueError(f"initial conductances outside {span}")

    def read(self) -> np.ndarray:
        p = self.params
        gn = (self.g - p.g_min) / (p.g_max - p.g_min)
        return p.g_max * gn

    def update(self, dt, rng=None) -> None:
        dt = self._dt_array(dt)
        self.g += np.asarray(delta_g_train(dt, self.g, self.params))

    def state(self) -> np.ndarray:
        return self.g.copy()


class QuantizedSynapses(IdealSynapses):
    """Ideal rule followed by snapping to one of n uniform levels after
    every update."""

    def __init__(self, g, n_levels: int, params: StdpParams = None):
        if n_levels < 2:
            raise ValueError("n_levels must be at least 2")
        super().__init__(g, params)
        self.n_levels = int(n_levels)
        p = self.params
        self.g = quantize(self.g, self.n_levels, p.g_min, p.g_max)

    def update(self, dt, rng=None) -> None:
        super().update(dt, rng)
        p = self.params
        self.g = np.asarray(quantize(self.g, self.n_levels, p.g_min, p.g_max))

    def state(self) -> np.ndarray:
        return self.g.copy()


class SingleDeviceSynapses(SynapseArray):
    """One measured/modeled device per synapse, updated via its table."""

    def __init__(self, g, table: DeviceTable, g_max: float = 1.0):
        self.g = np.array(g, dtype=float)
        self.shape = self.g.shape
        self.table = table
        self.g_max = float(g_max)
        if np.any((self.g < 0) | (self.g > 1)):
            raise ValueError("device conductances must lie in [0, 1]")

    def read(self) -> np.ndarray:
        return self.g_max * self.g

    def update(self, dt, rng=None) -> None:
        dt = self._dt_array(dt)
        active = ~np.isnan(dt)
        if not np.any(active):
            return
        dg = np.asarray(interpolate(self.table, dt[active], self.g[active]))
        self.g[active] = np.clip(self.g[active] + dg, 0.0, 1.0)

    def state(self) -> np.ndarray:
        return self.g.copy()


class MultiRramSynapses(SynapseArray):
    """n parallel devices per synapse; reads average all of them, each
    update writes one uniformly random device."""

    def __init__(self, g_k, n_devices: int, table: DeviceTable,
                 g_max: float = 1.0):
        self.n_devices = int(n_devices)
        if self.n_devices < 1:
            raise ValueError("need at least one device per synapse")
        self.g = np.array(g_k, dtype=float)
        if self.g.shape[-1] != self.n_devices:
            raise ValueError("last axis of g_k must hold the devices")
        self.shape = self.g.shape[:-1]
        self.table = table
        self.g_max = float(g_max)
        if np.any((self.g < 0) | (self.g > 1)):
            raise ValueError("device conductances must lie in [0, 1]")

    def read(self) -> np.ndarray:
        return self.g_max * self.g.mean(axis=-1)

    def update(self, dt, rng: np.random.Generator = None) -> None:
        if rng is None:
            raise ValueError("multi-device updates need an rng")
        dt = self._dt_array(dt)
        active = np.nonzero(~np.isnan(dt))
        n_active = len(active[0])
        if n_active == 0:
            return
        k = rng.integers(0, self.n_devices, size=n_active)
        idx = active + (k,)
        g_k = self.g[idx]
        dg = np.asarray(interpolate(self.table, dt[active], g_k))
        self.g[idx] = np.clip(g_k + dg, 0.0, 1.0)

    def state(self) -> np.ndarray:
        return self.g.copy()


def make_synapses(kind: str, shape, rng: np.random.Generator,
                  stdp: StdpParams = None, table: DeviceTable = None,
                  n_levels: int = None, n_devices: int = None,
                  g_max: float = 1.0) -> SynapseArray:
    """Build a backend with independent uniform initial conductances."""
    stdp = stdp or StdpParams()
    if kind == "ideal":
        g0 = stdp.g_min + rng.uniform(size=shape) * (stdp.g_max - stdp.g_min)
        return IdealSynapses(g0, stdp)
    if kind == "quantized":
        if n_levels is None:
            raise ValueError("quantized backend needs n_levels")
        g0 = stdp.g_min + rng.uniform(size=shape) * (stdp.g_max - stdp.g_min)
        return QuantizedSynapses(g0, n_levels, stdp)
    if kind == "single_device":
        if table is None:
            raise ValueError("single_device backend needs a device table")
        return SingleDeviceSynapses(rng.uniform(size=shape), table, g_max)
    if kind == "multi_rram":
        if table is None or n_devices is None:
            raise ValueError("multi_rram backend needs a table and n_devices")
        g0 = rng.uniform(size=tuple(shape) + (n_devices,))
        return MultiRramSynapses(g0, n_devices, table, g_max)
    raise ValueError(f"unknown synapse backend {kind!r}")


@dataclass(frozen=True)
class SelectionScheme:
    """Periodic one-hot selection lines latched at the spike edge.

    The row line-set advances every ``line_period``; the column set
    advances once per full row cycle (every m1 * line_period), so over
    spike times spread across many full cycles every (row, col) pair is
    selected equally often.
    """

    m1: int
    m2: int
    line_period: float = 1.0  # ms
    phase_row: float = 0.0
    phase_col: float = 0.0

    def __post_init__(self):
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("m1 and m2 must be at least 1")
        if self.line_period <= 0:
            raise ValueError("line_period must be positive")

    @property
    def n_devices(self) -> int:
        return self.m1 * self.m2


def select_index(scheme: SelectionScheme, spike_time: float):
    """(row, col) of the device latched at ``spike_time``."""
    if np.any(np.asarray(spike_time) < 0):
        raise ValueError("spike_time must be non-negative")
    t = np.asarray(spike_time, dtype=float)
    row = np.floor((t - scheme.phase_row) / scheme.line_period)
    col = np.floor((t - scheme.phase_col) / (scheme.line_period * scheme.m1))
    row = np.mod(row, scheme.m1).astype(int)
    col = np.mod(col, scheme.m2).astype(int)
    if np.ndim(spike_time) == 0:
        return int(row), int(col)
    return row, col
