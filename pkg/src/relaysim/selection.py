"""MMD and QN link metrics and the per-slot transmission-mode decision."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import SlotChannels
from .constellation import CandidateSet, difference_vectors
from .errors import ConfigurationError, ProtocolStallError, UsageError

__all__ = [
    "CRITERIA",
    "PROTOCOLS",
    "VARIANTS",
    "EvaluationCounter",
    "LinkMetric",
    "SlotDecision",
    "coop_gain",
    "direct_gain",
    "pairwise_distance",
    "d_min",
    "d_min_brute",
    "d_min_stack",
    "qn_metric",
    "link_metrics",
    "decide_slot",
    "select_reception",
]

CRITERIA = ("mmd", "qn")
PROTOCOLS = ("switched", "maxlink", "direct")

# public variant names -> (criterion, protocol)
VARIANTS = {
    "mmd-switched": ("mmd", "switched"),
    "mmd-maxlink": ("mmd", "maxlink"),
    "qn-maxlink": ("qn", "maxlink"),
    "qn-switched": ("qn", "switched"),
    "mimo-direct": ("mmd", "direct"),
}


def coop_gain(E_s: float, M: int) -> float:
    return float(np.sqrt(E_s / M))


def direct_gain(E_s: float, M: int) -> float:
    return float(np.sqrt(2.0 * E_s / M))


@dataclass
class EvaluationCounter:
    """Counts metric evaluations made by :func:`d_min`."""

    evaluations: int = 0


def _sq_norms(H: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """``||H v||^2`` for each row v; H is (..., M, M), vectors (P, M) -> (..., P).

    Written with explicit products and sums so brute-force and
    difference-set evaluations round identically.
    """
    Hv = (H[..., None, :, :] * vectors[:, None, :]).sum(axis=-1)
    return (Hv.real ** 2 + Hv.imag ** 2).sum(axis=-1)


def pairwise_distance(H: np.ndarray, x_l: np.ndarray, x_n: np.ndarray, gain: float) -> float:
    """``||gain*H*x_l - gain*H*x_n||^2``, evaluated as ``gain^2 ||H (x_l - x_n)||^2``."""
    diff = np.asarray(x_l, dtype=complex) - np.asarray(x_n, dtype=complex)
    return float(gain ** 2 * _sq_norms(np.asarray(H), diff[None, :])[0])


def d_min_brute(H: np.ndarray, candidates: CandidateSet, gain: float) -> float:
    """Minimum pairwise distance over all C(N_s^M, 2) unordered candidate pairs."""
    x = candidates.vectors
    pairs = np.array(list(itertools.combinations(range(len(x)), 2)))
    diffs = x[pairs[:, 0]] - x[pairs[:, 1]]
    return float(gain ** 2 * _sq_norms(np.asarray(H), diffs).min())


def d_min(
    H: np.ndarray,
    candidates: CandidateSet,
    gain: float,
    counter: EvaluationCounter | None = None,
) -> float:
    """Minimum pairwise distance via the sign-deduplicated difference vectors.

    Equal to :func:`d_min_brute` bit for bit, with far fewer evaluations
    (one per distinct difference vector).
    """
    diffs = difference_vectors(candidates)
    if counter is not None:
        counter.evaluations += len(diffs)
    return float(gain ** 2 * _sq_norms(np.asarray(H), diffs).min())


def d_min_stack(Hs: np.ndarray, candidates: CandidateSet) -> np.ndarray:
    """Unscaled ``min_e ||H e||^2`` for a (K, M, M) stack of matrices."""
    return _sq_norms(Hs, difference_vectors(candidates)).min(axis=-1)


def qn_metric(H: np.ndarray) -> float:
    """Squared Frobenius norm."""
    H = np.asarray(H)
    return float((H.real ** 2 + H.imag ** 2).sum())


@dataclass(frozen=True)
class LinkMetric:
    link_kind: str
    relay: int | None
    d_min: float  # gain-scaled minimum distance
    qn: float  # squared Frobenius norm of the estimate


@dataclass(frozen=True)
class SlotDecision:
    mode: str  # "direct", "reception" or "transmission"
    relay: int | None
    winning_metric: float
    all_metrics: tuple[LinkMetric, ...] = field(repr=False, default=())


def link_metrics(channels: SlotChannels, candidates: CandidateSet, E_s: float) -> tuple[LinkMetric, ...]:
    """Metrics for SR_1, RD_1, ..., SR_N, RD_N, SD computed on the estimates."""
    M = candidates.M
    Hs = channels.estimated_stack()
    gains2 = np.full(len(Hs), coop_gain(E_s, M) ** 2)
    gains2[-1] = direct_gain(E_s, M) ** 2
    dm = gains2 * d_min_stack(Hs, candidates)
    qn = (Hs.real ** 2 + Hs.imag ** 2).sum(axis=(1, 2))
    out = []
    for k in range(len(Hs) - 1):
        out.append(LinkMetric("SR" if k % 2 == 0 else "RD", k // 2, float(dm[k]), float(qn[k])))
    out.append(LinkMetric("SD", None, float(dm[-1]), float(qn[-1])))
    return tuple(out)


def _score(metric: LinkMetric, criterion: str, E_s: float, M: int) -> float:
    if criterion == "mmd":
        return metric.d_min
    # energy-weighted so that the switch compares like with like
    g = direct_gain(E_s, M) if metric.link_kind == "SD" else coop_gain(E_s, M)
    return g ** 2 * metric.qn


def _check(criterion: str, protocol: str) -> None:
    if criterion not in CRITERIA:
        raise ConfigurationError(f"unknown criterion {criterion!r}")
    if protocol not in PROTOCOLS:
        raise ConfigurationError(f"unknown protocol {protocol!r}")


def decide_slot(
    channels: SlotChannels,
    occupancy: Sequence[int],
    capacity: int,
    criterion: str,
    protocol: str,
    E_s: float,
    candidates: CandidateSet,
) -> SlotDecision:
    """Pick direct transmission, reception at relay k or transmission from relay j.

    A relay may receive when it has at least M free slots and transmit when
    it holds at least M packets.  Ties between relay links go to the lowest
    relay index, SR before RD; the switch to direct mode is taken when the
    direct metric is >= the best eligible relay metric.
    """
    _check(criterion, protocol)
    M = candidates.M
    if len(occupancy) != channels.N:
        raise UsageError(f"{len(occupancy)} buffer states for {channels.N} relays")
    metrics = link_metrics(channels, candidates, E_s)
    scores = np.array([_score(m, criterion, E_s, M) for m in metrics])

    if protocol == "direct":
        return SlotDecision("direct", None, float(scores[-1]), metrics)

    occ = np.asarray(occupancy)
    eligible = np.empty(2 * channels.N, dtype=bool)
    eligible[0::2] = capacity - occ >= M
    eligible[1::2] = occ >= M
    if not eligible.any():
        raise ProtocolStallError(f"no eligible relay link (occupancy={list(occ)}, J={capacity}, M={M})")
    relay_scores = np.where(eligible, scores[:-1], -np.inf)
    k = int(np.argmax(relay_scores))
    best = float(relay_scores[k])

    if protocol == "switched" and scores[-1] >= best:
        return SlotDecision("direct", None, float(scores[-1]), metrics)
    mode = "reception" if k % 2 == 0 else "transmission"
    return SlotDecision(mode, k // 2, best, metrics)


def select_reception(
    channels: SlotChannels,
    available: Sequence[bool],
    criterion: str,
    E_s: float,
    candidates: CandidateSet,
) -> SlotDecision:
    """Best SR link among ``available`` relays (buffer initialization phase)."""
    _check(criterion, "maxlink")
    avail = np.asarray(available, dtype=bool)
    if not avail.any():
        raise ProtocolStallError("no relay available for reception")
    metrics = link_metrics(channels, candidates, E_s)
    M = candidates.M
    sr = np.array([_score(m, criterion, E_s, M) for m in metrics[0:-1:2]])
    k = int(np.argmax(np.where(avail, sr, -np.inf)))
    return SlotDecision("reception", k, float(sr[k]), metrics)
