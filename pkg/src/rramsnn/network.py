"""Single-layer feed-forward spiking network with LIF outputs.

Input spikes inject impulse currents weighted by the synaptic
conductances; output membranes decay exponentially between impulses on
a fixed simulation step. During supervised training the labeled output
is forced to spike after every input (causal pairings) and all other
outputs before any input (anti-causal pairings), which hands the STDP
rule pairings of the right sign without per-synapse bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .encoding import SensorBank, SpikeTrain, encode_times
from .synapse import SynapseArray

__all__ = ["LifParams", "PairingEvent", "PresentResult", "Network"]

TEACH_MARGIN = 10.0  # ms after the window for the forced target spike
TAIL = 20.0  # ms of integration past the window


@dataclass(frozen=True)
class LifParams:
    tau_m: float = 50.0  # ms
    v_th: float = 1.0
    v_reset: float = 0.0
    k_syn: float = None  # None: calibrated from the network size

    def __post_init__(self):
        if self.tau_m <= 0:
            raise ValueError("tau_m must be positive")
        if self.v_th <= self.v_reset:
            raise ValueError("v_th must exceed v_reset")


@dataclass(frozen=True)
class PairingEvent:
    pre: int
    post: int
    delta_t: float  # ms, t_post - t_pre


@dataclass(frozen=True)
class PresentResult:
    """Outcome of one presentation.

    ``out_times`` has one spike time per output (NaN if silent),
    ``delta_t`` is the (n_in, n_out) pairing matrix with NaN where no
    pairing occurred, ``v_end`` the membrane potentials at the end of
    the integration horizon.
    """

    out_times: np.ndarray
    delta_t: np.ndarray
    v_end: np.ndarray

    @property
    def pairings(self):
        idx = np.argwhere(~np.isnan(self.delta_t))
        return [
            PairingEvent(int(i), int(j), float(self.delta_t[i, j]))
            for i, j in idx
        ]


class Network:
    """Feed-forward net: n_in input lines fully connected to n_out LIF
    outputs through a synapse backend of shape (n_in, n_out)."""

    def __init__(self, synapses: SynapseArray, lif: LifParams = None,
                 t_win: float = 100.0, dt_sim: float = 0.1):
        if len(synapses.shape) != 2:
            raise ValueError("synapse array must have shape (n_in, n_out)")
        if dt_sim > 1.0:
            raise ValueError("dt_sim must be at most 1 ms")
        self.synapses = synapses
        self.n_in, self.n_out = synapses.shape
        lif = lif or LifParams()
        if lif.k_syn is None:
            g_max = getattr(synapses, "g_max", None)
            if g_max is None:
                g_max = synapses.params.g_max
            # a half-conductance fully-active volley reaches ~2 * v_th
            k = 4.0 * lif.v_th / (self.n_in * g_max)
            lif = LifParams(lif.tau_m, lif.v_th, lif.v_reset, k)
        self.lif = lif
        self.t_win = float(t_win)
        self.dt_sim = float(dt_sim)

    # -- presentation ----------------------------------------------------

    def present(self, spikes, teacher: int = None) -> PresentResult:
        """Run one presentation window; returns spike times and pairings."""
        times = spikes.times if isinstance(spikes, SpikeTrain) else np.asarray(spikes, float)
        if times.shape != (self.n_in,):
            raise ValueError("spike train does not match n_in")
        finite = times[~np.isnan(times)]
        if finite.size and (finite.min() < 0 or finite.max() > self.t_win):
            raise ValueError("input spikes must lie within [0, t_win]")

        if teacher is not None:
            if not 0 <= teacher < self.n_out:
                raise ValueError("teacher label out of range")
            out_times = np.zeros(self.n_out)
            out_times[teacher] = self.t_win + TEACH_MARGIN
            v_end = np.zeros(self.n_out)
        else:
            out_times, v_end = self._integrate(times)

        delta_t = out_times[None, :] - times[:, None]
        delta_t[np.isnan(times), :] = np.nan
        return PresentResult(out_times=out_times, delta_t=delta_t, v_end=v_end)

    def _integrate(self, times: np.ndarray):
        """Fixed-step LIF run, stepping event-to-event between input
        impulses (the membrane only decays in between)."""
        lif = self.lif
        decay = np.exp(-self.dt_sim / lif.tau_m)
        active = ~np.isnan(times)
        steps = np.zeros(times.shape, dtype=np.int64)
        steps[active] = np.round(times[active] / self.dt_sim).astype(np.int64)
        g = self.synapses.read()  # (n_in, n_out)

        v = np.full(self.n_out, lif.v_reset, dtype=float)
        out_step = np.full(self.n_out, -1, dtype=np.int64)
        last = 0
        if np.any(active):
            order = np.unique(steps[active])
            for s in order:
                v = lif.v_reset + (v - lif.v_reset) * decay ** (s - last)
                rows = active & (steps == s)
                v += lif.k_syn * g[rows].sum(axis=0)
                fired = (v >= lif.v_th) & (out_step < 0)
                out_step[fired] = s
                v[v >= lif.v_th] = lif.v_reset
                last = s
        end_step = int(round((self.t_win + TAIL) / self.dt_sim))
        v = lif.v_reset + (v - lif.v_reset) * decay ** (end_step - last)
        out_times = np.where(out_step >= 0, out_step * self.dt_sim, np.nan)
        return out_times, v

    # -- training and evaluation ----------------------------------------

    def classify(self, spikes) -> int:
        """Earliest-spiking output wins; silent nets fall back to the
        highest membrane potential; remaining ties take the lowest index."""
        res = self.present(spikes, teacher=None)
        if np.any(~np.isnan(res.out_times)):
            t = np.where(np.isnan(res.out_times), np.inf, res.out_times)
            return int(np.argmin(t))
        return int(np.argmax(res.v_end))

    def train_epoch(self, train: Dataset, bank: SensorBank,
                    rng: np.random.Generator,
                    encoded: np.ndarray = None) -> None:
        """One shuffled pass applying every pairing through the backend."""
        if len(train) == 0:
            return
        if encoded is None:
            encoded = encode_dataset(train, bank)
        labels = train.labels
        for i in rng.permutation(len(train)):
            res = self.present(encoded[i], teacher=int(labels[i]))
            self.synapses.update(res.delta_t, rng)

    def evaluate(self, test: Dataset, bank: SensorBank,
                 encoded: np.ndarray = None) -> float:
        """Percent of test samples classified correctly."""
        if len(test) == 0:
            raise ValueError("empty test set")
        if encoded is None:
            encoded = encode_dataset(test, bank)
        labels = test.labels
        correct = sum(
            self.classify(encoded[i]) == labels[i] for i in range(len(test))
        )
        return 100.0 * correct / len(test)


def encode_dataset(d: Dataset, bank: SensorBank) -> np.ndarray:
    """(N, n_in) spike-time matrix for a whole dataset (NaN = silent)."""
    return np.stack([encode_times(s.features, bank) for s in d.samples])
