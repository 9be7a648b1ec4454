"""Experiment orchestration: seeded training runs, parameter sweeps and
CSV emission.

Every experiment is described by an :class:`ExperimentConfig` and is
fully deterministic given its master seed: the train/test split derives
from the master seed, per-run generators from (master seed, run index).
Outputs are plain CSVs (ca.csv, quantiles.csv, trajectories.csv,
surface.csv) plus a manifest.json capturing the resolved config.
"""

from __future__ import annotations

import csv
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

import numpy as np

from . import device as dev
from .dataset import CsvSchema, Dataset, load_csv, load_iris, normalize, split
from .encoding import SensorBank
from .network import LifParams, Network, encode_dataset
from .stdp import StdpParams
from .synapse import make_synapses

__all__ = [
    "ExperimentConfig",
    "RunStats",
    "load_config",
    "run_training",
    "sweep_learning_rate",
    "sweep_levels",
    "sweep_n",
    "single_device_experiment",
    "epochs_for_n",
    "write_surface_csv",
    "write_manifest",
]

QUANTILE_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    # dataset
    dataset: str = "iris"  # "iris" or a CSV path
    label_col: str = None
    feature_cols: tuple = None
    missing: str = "?"
    train_fraction: float = 0.5
    # synapse backend
    backend: str = "ideal"  # ideal | quantized | single_device | multi_rram
    n_levels: int = 256
    n_devices: int = 64
    table_path: str = None  # None: synthesize from the default device
    device_learning_rate: float = 0.5
    device_noise_sigma: float = 0.0
    # STDP rule
    a_plus: float = 0.02
    a_minus: float = 0.01
    tau_plus: float = 50.0
    tau_minus: float = 50.0
    p: float = 1.0
    g_max: float = 1.0
    # neuron and encoder
    tau_m: float = 50.0
    v_th: float = 1.0
    v_reset: float = 0.0
    k_syn: float = None
    sensors_per_feature: int = 4
    t_win: float = 100.0
    dt_sim: float = 0.1
    # schedule
    epochs: int = 20
    runs: int = 10
    seed: int = 0
    record_trajectories: bool = False

    def __post_init__(self):
        if self.epochs < 1 or self.runs < 1:
            raise ValueError("epochs and runs must be at least 1")
        if self.backend not in ("ideal", "quantized", "single_device", "multi_rram"):
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def stdp(self) -> StdpParams:
        return StdpParams(
            a_plus=self.a_plus, a_minus=self.a_minus,
            tau_plus=self.tau_plus, tau_minus=self.tau_minus,
            p=self.p, g_max=self.g_max,
        )

    @property
    def lif(self) -> LifParams:
        return LifParams(self.tau_m, self.v_th, self.v_reset, self.k_syn)

    @property
    def bank(self) -> SensorBank:
        return SensorBank(self.sensors_per_feature, self.t_win)


def load_config(path) -> ExperimentConfig:
    """Read a TOML key-value config file into an ExperimentConfig."""
    with open(path, "rb") as f:
        data = tomllib.load(f)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "feature_cols" in data and data["feature_cols"] is not None:
        data["feature_cols"] = tuple(data["feature_cols"])
    return ExperimentConfig(**data)


@dataclass
class RunStats:
    """Accuracy series of repeated training runs.

    ``ca`` has shape (runs, epochs), in percent. ``trajectories``
    (optional) has shape (runs, epochs, n_synapses): the synaptic
    conductances read after each epoch.
    """

    ca: np.ndarray
    trajectories: np.ndarray = None

    @property
    def ce(self) -> np.ndarray:
        return 100.0 - self.ca

    def quantiles(self) -> np.ndarray:
        """(epochs, 5): min/25%/median/75%/max of CA per epoch, linear
        interpolation on the order statistics."""
        return np.quantile(self.ca, QUANTILE_LEVELS, axis=0).T

    def last5_mean(self) -> float:
        """Mean CA over the last five epochs, pooled across runs."""
        k = min(5, self.ca.shape[1])
        return float(self.ca[:, -k:].mean())

    def last5_mean_per_run(self) -> np.ndarray:
        k = min(5, self.ca.shape[1])
        return self.ca[:, -k:].mean(axis=1)

    def peak_ca(self) -> float:
        return float(self.ca.max())

    # -- CSV round-trips -------------------------------------------------

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "ca.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["run", "epoch", "ca"])
            for r in range(self.ca.shape[0]):
                for e in range(self.ca.shape[1]):
                    w.writerow([r, e, repr(float(self.ca[r, e]))])
        q = self.quantiles()
        with open(out / "quantiles.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["epoch", "q0", "q25", "q50", "q75", "q100"])
            for e in range(q.shape[0]):
                w.writerow([e] + [repr(float(x)) for x in q[e]])
        if self.trajectories is not None:
            with open(out / "trajectories.csv", "w", newline="") as f:
                w = csv.writer(f, lineterminator="\n")
                w.writerow(["run", "epoch", "synapse_id", "g"])
                runs, epochs, n_syn = self.trajectories.shape
                for r in range(runs):
                    for e in range(epochs):
                        for s in range(n_syn):
                            w.writerow(
                                [r, e, s, repr(float(self.trajectories[r, e, s]))]
                            )

    @classmethod
    def read(cls, out_dir) -> "RunStats":
        out = Path(out_dir)
        rows = []
        with open(out / "ca.csv", newline="") as f:
            r = csv.reader(f)
            next(r)
            rows = [(int(a), int(b), float(c)) for a, b, c in r]
        runs = max(a for a, _, _ in rows) + 1
        epochs = max(b for _, b, _ in rows) + 1
        ca = np.empty((runs, epochs))
        for a, b, c in rows:
            ca[a, b] = c
        traj = None
        tpath = out / "trajectories.csv"
        if tpath.exists():
            with open(tpath, newline="") as f:
                r = csv.reader(f)
                next(r)
                trows = [(int(a), int(b), int(c), float(d)) for a, b, c, d in r]
            n_syn = max(c for _, _, c, _ in trows) + 1
            traj = np.empty((runs, epochs, n_syn))
            for a, b, c, d in trows:
                traj[a, b, c] = d
        return cls(ca=ca, trajectories=traj)


# -- experiment building blocks -----------------------------------------


def _load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.dataset == "iris":
        return load_iris()
    if cfg.label_col is None:
        raise ValueError("CSV datasets need label_col")
    schema = CsvSchema(
        label_col=cfg.label_col, feature_cols=cfg.feature_cols, missing=cfg.missing
    )
    return load_csv(cfg.dataset, schema)


def _device_table(cfg: ExperimentConfig) -> dev.DeviceTable:
    if cfg.table_path is not None:
        return dev.load_table_csv(cfg.table_path)
    pulse = dev.default_pulse()
    mem = dev.default_memristor(learning_rate=cfg.device_learning_rate)
    if cfg.device_noise_sigma > 0:
        mem = replace(mem, noise_sigma=cfg.device_noise_sigma)
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0xDE)))
        scatter = dev.measure_stdp_protocol(mem, pulse, pulse, 1000, rng)
        return dev.build_table(scatter, mem, pulse, pulse)
    return dev.table_from_model(mem, pulse, pulse)


def _run_rng(seed: int, run: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, stream, run)))


def _build_network(cfg: ExperimentConfig, shape, rng, table) -> Network:
    syn = make_synapses(
        cfg.backend, shape, rng, stdp=cfg.stdp, table=table,
        n_levels=cfg.n_levels, n_devices=cfg.n_devices, g_max=cfg.g_max,
    )
    return Network(syn, cfg.lif, t_win=cfg.t_win, dt_sim=cfg.dt_sim)


def run_training(cfg: ExperimentConfig, out_dir=None,
                 ic_stream: int = 0) -> RunStats:
    """Train ``cfg.runs`` fresh networks for ``cfg.epochs`` epochs each,
    evaluating after every epoch.

    ``ic_stream`` shifts the per-run seed stream, giving an independent
    family of initial conditions under the same master seed.
    """
    data = normalize(_load_dataset(cfg))
    train, test = split(data, cfg.train_fraction, cfg.seed)
    bank = cfg.bank
    enc_train = encode_dataset(train, bank)
    enc_test = encode_dataset(test, bank)
    table = (
        _device_table(cfg)
        if cfg.backend in ("single_device", "multi_rram")
        else None
    )
    shape = (bank.n_neurons(data.num_features), data.num_classes)

    ca = np.empty((cfg.runs, cfg.epochs))
    traj = None
    if cfg.record_trajectories:
        traj = np.empty((cfg.runs, cfg.epochs, shape[0] * shape[1]))
    for run in range(cfg.runs):
        rng = _run_rng(cfg.seed, run, ic_stream)
        net = _build_network(cfg, shape, rng, table)
        for epoch in range(cfg.epochs):
            net.train_epoch(train, bank, rng, encoded=enc_train)
            ca[run, epoch] = net.evaluate(test, bank, encoded=enc_test)
            if traj is not None:
                traj[run, epoch] = net.synapses.read().ravel()
    stats = RunStats(ca=ca, trajectories=traj)
    if out_dir is not None:
        stats.write(out_dir)
        write_manifest(cfg, out_dir)
    return stats


def sweep_learning_rate(pairs, cfg: ExperimentConfig, out_dir=None):
    """Ideal-backend CA surface over (a_plus, a_minus) pairs.

    Returns {(a_plus, a_minus): RunStats}; the surface CSV records the
    mean last-5-epoch CA per grid point.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty learning-rate grid")
    results = {}
    for a_plus, a_minus in pairs:
        sub = replace(cfg, backend="ideal", a_plus=a_plus, a_minus=a_minus)
        results[(a_plus, a_minus)] = run_training(sub)
    if out_dir is not None:
        write_surface_csv(results, out_dir)
        write_manifest(cfg, out_dir)
    return results


def sweep_levels(levels, cfg: ExperimentConfig, out_dir=None):
    """Quantized-backend CE distributions per level count, plus the
    continuous ideal control under key "ideal"."""
    results = {}
    for n in levels:
        if n < 2:
            raise ValueError("level counts must be at least 2")
        sub = replace(cfg, backend="quantized", n_levels=int(n))
        results[int(n)] = run_training(sub)
    results["ideal"] = run_training(replace(cfg, backend="ideal"))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "levels.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["levels", "mean_ce"])
            for key, stats in results.items():
                w.writerow([key, repr(float(stats.ce.mean()))])
        for key, stats in results.items():
            stats.write(out / f"levels_{key}")
        write_manifest(cfg, out_dir)
    return results


def epochs_for_n(n: int) -> int:
    """Training length for an n-device synapse: proportional to n with
    a floor of 20 (50 epochs at n = 100)."""
    return max(20, round(n / 2))


def sweep_n(ns, cfg: ExperimentConfig, out_dir=None):
    """Multi-device backend sweep over device counts."""
    results = {}
    for n in ns:
        if n < 1:
            raise ValueError("device counts must be at least 1")
        sub = replace(
            cfg, backend="multi_rram", n_devices=int(n),
            epochs=epochs_for_n(int(n)), record_trajectories=True,
        )
        results[int(n)] = run_training(sub)
    if out_dir is not None:
        out = Path(out_dir)
        for n, stats in results.items():
            stats.write(out / f"n_{n}")
        write_manifest(cfg, out_dir)
    return results


def single_device_experiment(cfg: ExperimentConfig, n_ics: int = 2,
                             out_dir=None):
    """Single-device runs under ``n_ics`` independent initial-condition
    families; returns {ic_index: RunStats}."""
    results = {}
    for ic in range(n_ics):
        sub = replace(cfg, backend="single_device", record_trajectories=True)
        results[ic] = run_training(sub, ic_stream=ic)
    if out_dir is not None:
        out = Path(out_dir)
        for ic, stats in results.items():
            stats.write(out / f"ic_{ic}")
        write_manifest(cfg, out_dir)
    return results


# -- output helpers ------------------------------------------------------


def write_surface_csv(results, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "surface.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["a_plus", "a_minus", "mean_ca"])
        for (a_plus, a_minus), stats in sorted(results.items()):
            w.writerow(
                [repr(float(a_plus)), repr(float(a_minus)),
                 repr(float(stats.last5_mean()))]
            )


def write_manifest(cfg: ExperimentConfig, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = asdict(cfg)
    if payload.get("feature_cols") is not None:
        payload["feature_cols"] = list(payload["feature_cols"])
    with open(out / "manifest.json", "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
