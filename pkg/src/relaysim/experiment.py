"""Monte Carlo campaigns: BER sweeps over protocol variants and PEP sweeps.

A campaign is split into independent cells, one per (variant, SNR) for BER
and one per (N, SNR) for PEP.  Every cell derives its random streams from
the master seed and its own key, so results are identical for any number
of worker processes.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml
from statsmodels.stats.proportion import proportion_confint

from .analysis import pep_from_d_min, selected_d_min
from .channel import CSIModel, draw_slot_channels, slot_rng
from .constellation import build_constellation, enumerate_candidates
from .errors import ConfigurationError, UsageError
from .protocol import Network, initialize_buffers, run_slot
from .selection import VARIANTS, decide_slot

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "BerRecord",
    "PepRecord",
    "load_config",
    "run_cell",
    "run_campaign",
    "run_pep_campaign",
    "emit_csv",
    "read_csv",
    "emit_pep_csv",
    "emit_plot_data",
    "wilson_interval",
]

CSV_COLUMNS = ("variant", "snr_db", "bits", "errors", "ber", "ci_lo", "ci_hi",
               "slots", "n_direct", "n_rx", "n_tx")
PEP_COLUMNS = ("criterion", "snr_db", "n", "mean_pep", "ci_lo", "ci_hi", "slots")

_INIT, _MAIN = 0, 1


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 10
    M: int = 2
    J: int = 4
    constellation: str = "bpsk"
    snr_db: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)
    packets: int = 2000
    symbols_per_packet: int = 100
    csi: str = "perfect"
    beta: float = 0.0
    alpha: float = 0.0
    csi_error: str = "channel"
    variants: tuple[str, ...] = ("mmd-switched", "mmd-maxlink", "qn-maxlink", "mimo-direct")
    seed: int = 1
    N_0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in np.atleast_1d(self.snr_db)))
        object.__setattr__(self, "variants", tuple(np.atleast_1d(self.variants).tolist()))
        if self.N < 1 or self.M < 1:
            raise ConfigurationError("N and M must be >= 1")
        if self.J < 2 * self.M:
            raise ConfigurationError(f"J={self.J} must be >= 2M={2 * self.M}")
        if not self.snr_db:
            raise ConfigurationError("snr_db grid is empty")
        if self.packets < 1 or self.symbols_per_packet < 1:
            raise ConfigurationError("packets and symbols_per_packet must be >= 1")
        if self.csi not in ("perfect", "imperfect"):
            raise ConfigurationError(f"csi must be 'perfect' or 'imperfect', got {self.csi!r}")
        if not self.N_0 > 0:
            raise ConfigurationError("N_0 must be positive")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown or not self.variants:
            raise ConfigurationError(f"unknown variants {unknown}; choose from {sorted(VARIANTS)}")
        build_constellation(self.constellation)
        self.csi_model()

    def csi_model(self) -> CSIModel:
        if self.csi == "perfect":
            return CSIModel.perfect()
        return CSIModel(self.beta, self.alpha, self.csi_error)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "ExperimentConfig":
        return type(self).from_mapping({**asdict(self), **changes})


def load_config(path) -> ExperimentConfig:
    """Read a flat YAML mapping of ExperimentConfig fields."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict) or any(isinstance(v, dict) for v in data.values()):
        raise ConfigurationError(f"{path}: expected a flat key-value mapping")
    return ExperimentConfig.from_mapping(data)


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    lo, hi = proportion_confint(errors, trials, alpha=0.05, method="wilson")
    return float(lo), float(hi)


@dataclass(frozen=True)
class BerRecord:
    variant: str
    snr_db: float
    bits: int
    errors: int
    slots: int
    n_direct: int
    n_rx: int
    n_tx: int
    buffered_at_end: int = field(default=0, compare=False)

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.bits)


@dataclass(frozen=True)
class PepRecord:
    criterion: str
    snr_db: float
    N: int
    mean_pep: float
    ci_lo: float
    ci_hi: float
    slots: int


def _snr_key(snr_db: float) -> int:
    # spawn keys must be non-negative integers
    return int(round(snr_db * 1000)) + 1_000_000


def run_cell(config: ExperimentConfig, variant: str, snr_db: float) -> BerRecord:
    """One (variant, SNR) point: initialization then slots until the packet budget.

    Cells at the same SNR share channel realizations slot by slot, whatever
    the variant.
    """
    criterion, protocol = VARIANTS[variant]
    net = Network(
        config.N, config.M, config.J, config.constellation, criterion, protocol,
        config.symbols_per_packet, config.csi_model(), config.N_0,
    )
    E_s = config.N_0 * 10 ** (snr_db / 10)
    cell = (_snr_key(snr_db),)
    if protocol != "direct":
        initialize_buffers(slot_rng(config.seed, cell, 0, _INIT), net, E_s)
    counts = {"direct": 0, "reception": 0, "transmission": 0}
    errors = bits = 0
    while net.created_main < config.packets:
        out = run_slot(slot_rng(config.seed, cell, net.slot, _MAIN), net, E_s)
        counts[out.decision.mode] += 1
        errors += out.bit_errors
        bits += out.bits_delivered
    return BerRecord(variant, float(snr_db), bits, errors, net.slot,
                     counts["direct"], counts["reception"], counts["transmission"],
                     net.buffered())


def _run_cell_args(args):
    return run_cell(*args)


def _map(fn, jobs: list, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def run_campaign(config: ExperimentConfig, workers: int = 1) -> list[BerRecord]:
    """BER for every (variant, SNR) cell, ordered variant-major."""
    jobs = [(config, v, s) for v in config.variants for s in config.snr_db]
    log.info("running %d cells on %d worker(s)", len(jobs), workers)
    return _map(_run_cell_args, jobs, workers)


def _pep_cell(args) -> list[PepRecord]:
    N, M, J, constellation, snr_db, slots, criteria, seed, N_0 = args
    cands = enumerate_candidates(build_constellation(constellation), M)
    E_s = N_0 * 10 ** (snr_db / 10)
    occupancy = {c: [J // 2] * N for c in criteria}
    peps = {c: np.empty(slots) for c in criteria}
    perfect = CSIModel.perfect()
    for t in range(slots):
        channels = draw_slot_channels(slot_rng(seed, (N, _snr_key(snr_db)), t, _MAIN), N, M, perfect, E_s)
        for c in criteria:
            dec = decide_slot(channels, occupancy[c], J, c, "maxlink", E_s, cands)
            peps[c][t] = pep_from_d_min(selected_d_min(dec), E_s, N_0, M)
            occupancy[c][dec.relay] += M if dec.mode == "reception" else -M
    out = []
    for c in criteria:
        mean = float(peps[c].mean())
        half = 1.96 * float(peps[c].std(ddof=1)) / math.sqrt(slots) if slots > 1 else 0.0
        out.append(PepRecord(c, float(snr_db), N, mean, mean - half, mean + half, slots))
    return out


def run_pep_campaign(
    N_values: Sequence[int],
    snr_db: Sequence[float],
    slots: int = 10_000,
    criteria: Sequence[str] = ("mmd", "qn"),
    M: int = 2,
    J: int = 4,
    constellation: str = "bpsk",
    seed: int = 1,
    N_0: float = 1.0,
    workers: int = 1,
) -> list[PepRecord]:
    """Mean worst-case PEP of the Max-Link selected link, per criterion, N and SNR.

    Each criterion evolves its own buffer occupancies (starting half full)
    under its own decisions; all criteria see the same channel draws.
    """
    if J < 2 * M or slots < 1:
        raise ConfigurationError("need J >= 2M and slots >= 1")
    jobs = [(int(n), M, J, constellation, float(s), slots, tuple(criteria), seed, N_0)
            for n in N_values for s in snr_db]
    return [rec for cell in _map(_pep_cell, jobs, workers) for rec in cell]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_csv(records: Sequence[BerRecord], path) -> Path:
    if not records:
        raise UsageError("no records to write")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            lo, hi = r.ci
            w.writerow([r.variant, _fmt(r.snr_db), r.bits, r.errors, _fmt(r.ber), _fmt(lo), _fmt(hi),
                        r.slots, r.n_direct, r.n_rx, r.n_tx])
    return path


def read_csv(path) -> list[BerRecord]:
    """Parse a file written by :func:`emit_csv` (derived columns are recomputed)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        BerRecord(row["variant"], float(row["snr_db"]), int(row["bits"]), int(row["errors"]),
                  int(row["slots"]), int(row["n_direct"]), int(row["n_rx"]), int(row["n_tx"]))
        for row in rows
    ]


def emit_pep_csv(records: Sequence[PepRecord], path_or_file) -> None:
    if not records:
        raise UsageError("no records to write")
    own = isinstance(path_or_file, (str, Path))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(PEP_COLUMNS)
        for r in records:
            w.writerow([r.criterion, _fmt(r.snr_db), r.N, _fmt(r.mean_pep), _fmt(r.ci_lo),
                        _fmt(r.ci_hi), r.slots])
    finally:
        if own:
            fh.close()


def emit_plot_data(records: Iterable, directory) -> list[Path]:
    """One whitespace-separated ``snr_db value`` file per curve (log-y intended)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    curves: dict[str, list[tuple[float, float]]] = {}
    for r in records:
        if isinstance(r, BerRecord):
            curves.setdefault(f"ber_{r.variant}", []).append((r.snr_db, r.ber))
        else:
            curves.setdefault(f"pep_{r.criterion}_N{r.N}", []).append((r.snr_db, r.mean_pep))
    paths = []
    for name, pts in curves.items():
        p = directory / f"{name}.dat"
        with open(p, "w") as fh:
            fh.write("# snr_db value\n")
            for x, y in sorted(pts):
                fh.write(f"{_fmt(x)} {_fmt(y)}\n")
        paths.append(p)
    return paths
