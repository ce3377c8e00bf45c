"""Rayleigh block fading, AWGN and imperfect channel estimates.

All randomness flows through explicit ``numpy.random.Generator`` objects.
:func:`slot_rng` derives an independent stream for every (cell, slot,
purpose) triple, so realizations never depend on execution order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UsageError

__all__ = [
    "CSIModel",
    "ChannelMatrix",
    "LinkEstimate",
    "SlotChannels",
    "complex_gaussian",
    "draw_noise",
    "draw_slot_channels",
    "slot_rng",
]


@dataclass(frozen=True)
class CSIModel:
    """Channel-estimation error model; ``beta == 0`` is perfect CSI.

    The error variance is ``beta * E**-alpha`` where ``E`` is the per-link
    energy (``E_s`` on relay links, ``2 E_s`` on the direct link).

    ``placement`` says which matrix carries the error term:

    * ``"channel"``: the estimate is a unit-power Rayleigh draw and the
      propagation channel is ``estimate + error`` (error independent of
      what the receiver knows).
    * ``"estimate"``: the propagation channel is the unit-power draw and the
      receiver sees ``channel + error``.
    """

    beta: float = 0.0
    alpha: float = 0.0
    placement: str = "channel"

    def __post_init__(self):
        if self.placement not in ("channel", "estimate"):
            raise ConfigurationError(f"unknown CSI error placement {self.placement!r}")
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ConfigurationError(f"beta must be >= 0, got {self.beta}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def perfect(cls) -> "CSIModel":
        return cls(0.0, 0.0)

    @property
    def is_perfect(self) -> bool:
        return self.beta == 0.0

    def error_variance(self, energy: float) -> float:
        if self.is_perfect:
            return 0.0
        return self.beta * energy ** (-self.alpha)


@dataclass(frozen=True)
class ChannelMatrix:
    entries: np.ndarray
    link_kind: str  # "SR", "RD" or "SD"
    relay: int | None = None  # 0-based relay index for SR/RD


@dataclass(frozen=True)
class LinkEstimate:
    true_H: ChannelMatrix
    estimated_H: ChannelMatrix
    sigma_e_sq: float


@dataclass(frozen=True)
class SlotChannels:
    sr: tuple[LinkEstimate, ...]
    rd: tuple[LinkEstimate, ...]
    sd: LinkEstimate

    @property
    def N(self) -> int:
        return len(self.sr)

    def estimated_stack(self) -> np.ndarray:
        """(2N+1, M, M) estimates ordered SR_1, RD_1, ..., SR_N, RD_N, SD."""
        mats = []
        for s, r in zip(self.sr, self.rd):
            mats += [s.estimated_H.entries, r.estimated_H.entries]
        mats.append(self.sd.estimated_H.entries)
        return np.stack(mats)


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples, variance split evenly."""
    scale = np.sqrt(variance / 2.0)
    z = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    return scale * (z[..., 0] + 1j * z[..., 1])


def _link(rng, M, kind, relay, sigma_e_sq, placement) -> LinkEstimate:
    H = complex_gaussian(rng, (M, M))
    base = ChannelMatrix(H, kind, relay)
    if sigma_e_sq == 0.0:
        return LinkEstimate(base, base, 0.0)
    other = ChannelMatrix(H + complex_gaussian(rng, (M, M), sigma_e_sq), kind, relay)
    if placement == "channel":
        return LinkEstimate(other, base, sigma_e_sq)
    return LinkEstimate(base, other, sigma_e_sq)


def draw_slot_channels(
    rng: np.random.Generator, N: int, M: int, csi: CSIModel, E_s: float
) -> SlotChannels:
    """Draw all 2N+1 link matrices (and their estimates) for one slot.

    Draw order is SR_1, RD_1, ..., SR_N, RD_N, SD; each link draws its
    unit-power matrix and then, under imperfect CSI, its error matrix.
    """
    if N < 1 or M < 1:
        raise UsageError(f"need N >= 1 and M >= 1, got N={N}, M={M}")
    if E_s <= 0:
        raise UsageError(f"E_s must be positive, got {E_s}")
    coop = csi.error_variance(E_s)
    direct = csi.error_variance(2.0 * E_s)
    sr, rd = [], []
    for i in range(N):
        sr.append(_link(rng, M, "SR", i, coop, csi.placement))
        rd.append(_link(rng, M, "RD", i, coop, csi.placement))
    sd = _link(rng, M, "SD", None, direct, csi.placement)
    return SlotChannels(tuple(sr), tuple(rd), sd)


def draw_noise(rng: np.random.Generator, M: int, N_0: float, size: int | None = None) -> np.ndarray:
    """AWGN with per-entry variance ``N_0``; shape (M,) or (size, M)."""
    if not N_0 > 0:
        raise UsageError(f"N_0 must be positive, got {N_0}")
    shape = (M,) if size is None else (size, M)
    return complex_gaussian(rng, shape, N_0)


def slot_rng(seed: int, cell: tuple[int, ...], slot: int, stream: int) -> np.random.Generator:
    """Generator for one (cell, slot, stream) triple of a run seeded by ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(*cell, int(slot), int(stream)))
    return np.random.Generator(np.random.PCG64(ss))
