"""Threshold-memristor write physics and the measured-device table model.

A spiking neuron emits a shaped write pulse: a microsecond positive ramp
peaking at the spike instant followed by a long negative exponential
tail whose decay constant sets the STDP time scale. The voltage across
the device is the difference of the pre- and post-synaptic pulses; only
the part of that waveform exceeding the device's write threshold (the
overdrive) changes conductance. Negative-polarity overdrive raises
conductance (sets the device), positive-polarity overdrive lowers it,
so causal pairings (dt > 0) potentiate.

STDP measurements are emulated by the random-dt protocol and condensed
into a regular (g, dt) -> dG lookup table with bilinear interpolation;
the same CSV format accepts externally measured tables.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "WritePulseParams",
    "ThresholdMemristor",
    "DeviceTable",
    "default_pulse",
    "default_memristor",
    "pulse_voltage",
    "net_voltage",
    "overdrive",
    "device_delta_g",
    "calibrate_gains",
    "measure_stdp_protocol",
    "build_table",
    "table_from_model",
    "interpolate",
    "save_table_csv",
    "load_table_csv",
]


@dataclass(frozen=True)
class WritePulseParams:
    """Shape of one write pulse (times in ms, amplitudes in volts).

    The pulse is a normalized rising exponential on [-t_pos, 0) peaking
    at ``amp_pos`` and a normalized decaying tail on (0, t_neg] starting
    at ``amp_neg``; zero outside that support.
    """

    amp_pos: float = 1.0
    amp_neg: float = -1.0
    t_pos: float = 1e-3  # 1 us
    t_neg: float = 400.0
    tau_pos: float = 5e-4  # 0.5 us
    tau_neg: float = 50.0

    def __post_init__(self):
        if not self.amp_pos > 0 > self.amp_neg:
            raise ValueError("require amp_pos > 0 > amp_neg")
        if min(self.t_pos, self.t_neg, self.tau_pos, self.tau_neg) <= 0:
            raise ValueError("durations and decay constants must be positive")


@dataclass(frozen=True)
class ThresholdMemristor:
    """Behavioral threshold device: dG responds linearly to overdrive.

    ``v_tp``/``v_tn`` are the positive/negative write thresholds (both
    stored positive) and must exceed the pulse amplitudes so a lone
    pulse never writes. ``gain_set`` scales potentiation (driven by
    negative-polarity overdrive), ``gain_reset`` depression.
    """

    v_tp: float = 1.005
    v_tn: float = 1.005
    gain_set: float = 1.0
    gain_reset: float = 1.0
    p_dev: float = 1.0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.v_tp <= 0 or self.v_tn <= 0:
            raise ValueError("thresholds must be positive")
        if self.gain_set <= 0 or self.gain_reset <= 0:
            raise ValueError("gains must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")


@dataclass(frozen=True)
class DeviceTable:
    """Sampled (g, dt) -> dG grid with strictly increasing axes."""

    g_axis: np.ndarray
    dt_axis: np.ndarray
    dg_grid: np.ndarray  # shape (len(g_axis), len(dt_axis))

    def __post_init__(self):
        g, dt, grid = (
            np.asarray(self.g_axis, float),
            np.asarray(self.dt_axis, float),
            np.asarray(self.dg_grid, float),
        )
        if np.any(np.diff(g) <= 0) or np.any(np.diff(dt) <= 0):
            raise ValueError("table axes must be strictly increasing")
        if grid.shape != (len(g), len(dt)):
            raise ValueError("grid shape must match axes")
        if not np.all(np.isfinite(grid)):
            raise ValueError("grid must be finite everywhere")
        object.__setattr__(self, "g_axis", g)
        object.__setattr__(self, "dt_axis", dt)
        object.__setattr__(self, "dg_grid", grid)


def default_pulse() -> WritePulseParams:
    return WritePulseParams()


def pulse_voltage(t, params: WritePulseParams, polarity: str = "+"):
    """Voltage of one write pulse at time(s) ``t`` relative to the spike.

    ``polarity`` selects the emitted pulse family; '-' mirrors the
    amplitudes. Zero outside [-t_pos, t_neg].
    """
    if polarity not in ("+", "-"):
        raise ValueError("polarity must be '+' or '-'")
    sign = 1.0 if polarity == "+" else -1.0
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    v = np.zeros_like(t)

    ramp = (t >= -params.t_pos) & (t < 0)
    cp = np.exp(-params.t_pos / params.tau_pos)
    v[ramp] = params.amp_pos * (np.exp(t[ramp] / params.tau_pos) - cp) / (1.0 - cp)
    tail = (t > 0) & (t <= params.t_neg)
    cn = np.exp(-params.t_neg / params.tau_neg)
    v[tail] = params.amp_neg * (np.exp(-t[tail] / params.tau_neg) - cn) / (1.0 - cn)
    v = sign * v
    if scalar:
        return float(v[0])
    return v


def net_voltage(dt, t, pre: WritePulseParams, post: WritePulseParams):
    """Voltage across the device: V_pre(t) - V_post(t - dt)."""
    return pulse_voltage(t, pre) - pulse_voltage(np.asarray(t, float) - dt, post)


def _scan_grid(dt, pre: WritePulseParams, post: WritePulseParams) -> np.ndarray:
    """Sample times resolving both the us peaks and the ms tails."""
    kinks = [-pre.t_pos, 0.0, pre.t_neg, dt - post.t_pos, dt, dt + post.t_neg]
    fine_tau = min(pre.tau_pos, post.tau_pos)
    pieces = []
    for k in kinks:
        pieces.append(np.linspace(k - 4 * fine_tau, k + 4 * fine_tau, 81))
    # the waveform is zero outside the two pulse supports, so only
    # those need coarse coverage (they may be arbitrarily far apart)
    coarse_step = min(pre.tau_neg, post.tau_neg) / 100.0
    pieces.append(np.arange(-pre.t_pos, pre.t_neg + coarse_step, coarse_step))
    pieces.append(
        np.arange(dt - post.t_pos, dt + post.t_neg + coarse_step, coarse_step)
    )
    ts = np.unique(np.concatenate(pieces))
    # open branch boundaries: evaluate just inside each peak
    eps = fine_tau * 1e-6
    ts = np.concatenate([ts, [-eps, dt - eps, eps, dt + eps]])
    return np.sort(ts)


def overdrive(dt, pre: WritePulseParams, post: WritePulseParams,
              mem: ThresholdMemristor):
    """Portions of the net waveform exceeding the write thresholds.

    Returns (od_pos, od_neg): the positive excursion above ``v_tp`` and
    the negative excursion below ``-v_tn``, both non-negative volts.
    """
    if mem.v_tp <= pre.amp_pos or mem.v_tn <= -pre.amp_neg:
        raise ValueError("thresholds must exceed single-pulse amplitudes")
    ts = _scan_grid(float(dt), pre, post)
    net = net_voltage(float(dt), ts, pre, post)
    od_pos = max(0.0, float(net.max()) - mem.v_tp)
    od_neg = max(0.0, -float(net.min()) - mem.v_tn)
    return od_pos, od_neg


def device_delta_g(dt, g, mem: ThresholdMemristor,
                   pre: WritePulseParams, post: WritePulseParams,
                   rng: np.random.Generator = None) -> float:
    """Conductance change of a device at state ``g`` for pairing ``dt``.

    Negative-polarity overdrive (the causal side) sets the device:
    dG = gain_set * od_set * (1-g)^p - gain_reset * od_reset * g^p,
    optionally scaled by multiplicative lognormal noise, clamped so the
    state stays in [0, 1].
    """
    g = float(g)
    if not 0.0 <= g <= 1.0:
        raise ValueError("g must lie in [0, 1]")
    od_pos, od_neg = overdrive(dt, pre, post, mem)
    od_set, od_reset = od_neg, od_pos  # negative polarity potentiates
    dg = (
        mem.gain_set * od_set * (1.0 - g) ** mem.p_dev
        - mem.gain_reset * od_reset * g**mem.p_dev
    )
    if mem.noise_sigma > 0 and rng is not None:
        dg *= float(rng.lognormal(0.0, mem.noise_sigma))
    return float(np.clip(dg, -g, 1.0 - g))


def calibrate_gains(mem: ThresholdMemristor, pre: WritePulseParams,
                    post: WritePulseParams, learning_rate: float = 0.5,
                    at_dt: float = None) -> ThresholdMemristor:
    """Set both gains so the largest single-pairing |dG| from a rail
    equals ``learning_rate`` of the full conductance range.

    By default the peak over all pairing intervals is used (it occurs as
    |dt| -> 0, where the pre and post waveforms overlap most); pass
    ``at_dt`` to calibrate at one specific interval instead.
    """
    if at_dt is not None:
        _, od_set = overdrive(at_dt, pre, post, mem)
        od_reset, _ = overdrive(-at_dt, pre, post, mem)
    else:
        dts = np.geomspace(1e-4, 200.0, 121)
        ods = [overdrive(d, pre, post, mem) for d in np.r_[-dts, dts]]
        od_reset = max(o[0] for o in ods)
        od_set = max(o[1] for o in ods)
    if od_set <= 0 or od_reset <= 0:
        raise ValueError(f"no overdrive at dt = {at_dt} ms; cannot calibrate")
    return replace(
        mem, gain_set=learning_rate / od_set, gain_reset=learning_rate / od_reset
    )


def default_memristor(learning_rate: float = 0.5,
                      noise_sigma: float = 0.0) -> ThresholdMemristor:
    """Calibrated default device (50% single-device learning-rate)."""
    pulse = default_pulse()
    mem = ThresholdMemristor(noise_sigma=noise_sigma)
    return calibrate_gains(mem, pulse, pulse, learning_rate=learning_rate)


def measure_stdp_protocol(mem: ThresholdMemristor, pre: WritePulseParams,
                          post: WritePulseParams, iterations: int,
                          rng: np.random.Generator,
                          dt_range=(-100.0, 100.0)) -> np.ndarray:
    """Emulated measurement loop: returns an (iterations, 3) array of
    (g_before, dt, dg) records.

    Starts from the low-resistance state (g = 1); each iteration reads
    the state, draws dt uniformly from ``dt_range``, applies the device
    response and carries the new state into the next iteration.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    g = 1.0
    records = np.empty((iterations, 3))
    for i in range(iterations):
        dt = float(rng.uniform(*dt_range))
        dg = device_delta_g(dt, g, mem, pre, post, rng=rng)
        records[i] = (g, dt, dg)
        g += dg
    return records


def _model_grid(g_axis, dt_axis, mem, pre, post) -> np.ndarray:
    od = np.array([overdrive(dt, pre, post, mem) for dt in dt_axis])
    od_set, od_reset = od[:, 1], od[:, 0]
    g = np.asarray(g_axis)[:, None]
    grid = (
        mem.gain_set * od_set[None, :] * (1.0 - g) ** mem.p_dev
        - mem.gain_reset * od_reset[None, :] * g**mem.p_dev
    )
    return np.clip(grid, -g, 1.0 - g)


def table_from_model(mem: ThresholdMemristor, pre: WritePulseParams,
                     post: WritePulseParams, n_g: int = 21, n_dt: int = 41,
                     dt_range=(-100.0, 100.0)) -> DeviceTable:
    """Noise-free device table sampled directly from the pulse physics."""
    g_axis = np.linspace(0.0, 1.0, n_g)
    dt_axis = np.linspace(dt_range[0], dt_range[1], n_dt)
    return DeviceTable(g_axis, dt_axis, _model_grid(g_axis, dt_axis, mem, pre, post))


def build_table(scatter: np.ndarray, mem: ThresholdMemristor,
                pre: WritePulseParams, post: WritePulseParams,
                n_g: int = 21, n_dt: int = 41,
                dt_range=(-100.0, 100.0)) -> DeviceTable:
    """Bin protocol records onto a regular grid (bin means).

    Grid nodes whose bin collected no records are filled from the
    noise-free model so the table stays finite everywhere.
    """
    scatter = np.asarray(scatter, float)
    g_axis = np.linspace(0.0, 1.0, n_g)
    dt_axis = np.linspace(dt_range[0], dt_range[1], n_dt)
    grid = _model_grid(g_axis, dt_axis, mem, pre, post)
    counts = np.zeros_like(grid)
    sums = np.zeros_like(grid)
    gi = np.clip(np.rint((scatter[:, 0] - g_axis[0])
                         / (g_axis[1] - g_axis[0])).astype(int), 0, n_g - 1)
    di = np.clip(np.rint((scatter[:, 1] - dt_axis[0])
                         / (dt_axis[1] - dt_axis[0])).astype(int), 0, n_dt - 1)
    np.add.at(counts, (gi, di), 1.0)
    np.add.at(sums, (gi, di), scatter[:, 2])
    filled = counts > 0
    grid[filled] = sums[filled] / counts[filled]
    return DeviceTable(g_axis, dt_axis, grid)


def interpolate(table: DeviceTable, dt, g):
    """Bilinear interpolation on the table, flat beyond the axis bounds.

    Broadcasts over array-valued ``dt`` and ``g``.
    """
    dt = np.clip(np.asarray(dt, float), table.dt_axis[0], table.dt_axis[-1])
    g = np.clip(np.asarray(g, float), table.g_axis[0], table.g_axis[-1])
    gi = np.clip(np.searchsorted(table.g_axis, g) - 1, 0, len(table.g_axis) - 2)
    di = np.clip(np.searchsorted(table.dt_axis, dt) - 1, 0, len(table.dt_axis) - 2)
    g0, g1 = table.g_axis[gi], table.g_axis[gi + 1]
    d0, d1 = table.dt_axis[di], table.dt_axis[di + 1]
    wg = (g - g0) / (g1 - g0)
    wd = (dt - d0) / (d1 - d0)
    z = table.dg_grid
    out = (
        z[gi, di] * (1 - wg) * (1 - wd)
        + z[gi + 1, di] * wg * (1 - wd)
        + z[gi, di + 1] * (1 - wg) * wd
        + z[gi + 1, di + 1] * wg * wd
    )
    if np.ndim(out) == 0:
        return float(out)
    return out


def save_table_csv(table: DeviceTable, path) -> None:
    """Write the grid as `g_i,dt_ms,dg` rows, row-major by g then dt."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["g_i", "dt_ms", "dg"])
        for i, g in enumerate(table.g_axis):
            for j, dt in enumerate(table.dt_axis):
                w.writerow([repr(float(g)), repr(float(dt)),
                            repr(float(table.dg_grid[i, j]))])


def load_table_csv(path) -> DeviceTable:
    """Read a table written by :func:`save_table_csv` (or measured data
    in the same format)."""
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        if [h.strip() for h in header] != ["g_i", "dt_ms", "dg"]:
            raise ValueError(f"{path}: expected header g_i,dt_ms,dg")
        rows = np.array([[float(c) for c in row] for row in r])
    if rows.size == 0:
        raise ValueError(f"{path}: empty table")
    g_axis = np.unique(rows[:, 0])
    dt_axis = np.unique(rows[:, 1])
    if len(g_axis) * len(dt_axis) != len(rows):
        raise ValueError(f"{path}: rows do not form a full grid")
    grid = rows[:, 2].reshape(len(g_axis), len(dt_axis))
    return DeviceTable(g_axis, dt_axis, grid)
