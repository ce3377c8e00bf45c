"""Exhaustive-search maximum-likelihood detection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import CandidateSet
from .errors import UsageError

__all__ = ["DetectionProblem", "ml_detect", "ml_detect_block", "ml_metrics"]


@dataclass(frozen=True)
class DetectionProblem:
    received: np.ndarray  # (M,) complex
    estimated_H: np.ndarray  # (M, M) complex
    gain: float
    candidates: CandidateSet

    def __post_init__(self):
        if not self.gain > 0:
            raise UsageError(f"gain must be positive, got {self.gain}")


def ml_metrics(received: np.ndarray, H: np.ndarray, gain: float, candidates: CandidateSet) -> np.ndarray:
    """Squared distances ``||y - gain*H*x'||^2`` for every candidate.

    ``received`` may be (M,) or (T, M); the result is (C,) or (T, C).
    """
    noiseless = gain * (candidates.vectors @ H.T)  # (C, M)
    diff = np.asarray(received)[..., None, :] - noiseless
    return (diff.real ** 2 + diff.imag ** 2).sum(axis=-1)


def ml_detect_block(received: np.ndarray, H: np.ndarray, gain: float, candidates: CandidateSet) -> np.ndarray:
    """Candidate index of the ML decision for each row of ``received`` (T, M).

    Ties go to the lowest candidate index (``argmin`` keeps the first).
    """
    return np.argmin(ml_metrics(received, H, gain, candidates), axis=-1)


def ml_detect(problem: DetectionProblem) -> tuple[int, np.ndarray]:
    """Return ``(index, bit label)`` of the ML candidate for one received vector."""
    k = int(ml_detect_block(problem.received, problem.estimated_H, problem.gain, problem.candidates))
    return k, problem.candidates.labels[k]
