"""Constellations, bit labeling and candidate symbol vectors.

Symbols are stored in bit-label order: ``symbols[k]`` carries the label
whose MSB-first binary expansion is ``k``.  Candidate vectors are then the
lexicographic enumeration of the concatenated per-antenna labels, antenna 0
most significant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, UsageError

__all__ = [
    "Constellation",
    "CandidateSet",
    "DifferenceSet",
    "build_constellation",
    "enumerate_candidates",
    "difference_set",
    "difference_vectors",
    "map_bits_to_vector",
    "map_vector_to_bits",
]

_SQRT_HALF = 1.0 / np.sqrt(2.0)

# label -> point; QPSK is Gray: first bit picks the real sign, second the imaginary sign
_POINTS = {
    "bpsk": np.array([1.0, -1.0], dtype=complex),
    "qpsk": np.array(
        [1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=complex
    ) * _SQRT_HALF,
}


@dataclass(frozen=True)
class Constellation:
    kind: str
    symbols: np.ndarray = field(repr=False)
    bits_per_symbol: int

    @property
    def size(self) -> int:
        """Number of constellation points, N_s."""
        return len(self.symbols)

    def labels(self) -> np.ndarray:
        """(N_s, bits_per_symbol) array of bit labels, row k labels symbols[k]."""
        k = np.arange(self.size)
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return ((k[:, None] >> shifts) & 1).astype(np.uint8)


@dataclass(frozen=True)
class CandidateSet:
    constellation: Constellation
    M: int
    vectors: np.ndarray = field(repr=False)  # (N_s**M, M) complex
    labels: np.ndarray = field(repr=False)  # (N_s**M, M*bits_per_symbol) uint8

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class DifferenceSet:
    differences: tuple[complex, ...]

    @property
    def W(self) -> int:
        return len(self.differences)


def build_constellation(kind: str) -> Constellation:
    key = str(kind).lower()
    if key not in _POINTS:
        raise ConfigurationError(f"unsupported constellation {kind!r}; expected 'bpsk' or 'qpsk'")
    symbols = _POINTS[key].copy()
    symbols.setflags(write=False)
    return Constellation(key, symbols, int(np.log2(len(symbols))))


@lru_cache(maxsize=None)
def _enumerate(kind: str, M: int) -> CandidateSet:
    const = build_constellation(kind)
    idx = np.array(list(itertools.product(range(const.size), repeat=M)), dtype=np.intp)
    vectors = const.symbols[idx]
    labels = const.labels()[idx].reshape(len(idx), M * const.bits_per_symbol)
    vectors.setflags(write=False)
    labels.setflags(write=False)
    return CandidateSet(const, M, vectors, labels)


def enumerate_candidates(constellation: Constellation, M: int) -> CandidateSet:
    """All N_s**M transmit vectors, ordered lexicographically by bit label."""
    if M < 1:
        raise UsageError(f"antenna count must be >= 1, got {M}")
    return _enumerate(constellation.kind, int(M))


def _check_bits(bits, constellation: Constellation, M: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1 or len(bits) != M * constellation.bits_per_symbol:
        raise UsageError(
            f"expected {M * constellation.bits_per_symbol} bits, got shape {bits.shape}"
        )
    if np.any(bits > 1):
        raise UsageError("bits must be 0 or 1")
    return bits


def bits_to_index(bits: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Integer label of each group of ``bits_per_symbol`` trailing-axis bits."""
    bits = np.asarray(bits, dtype=np.intp)
    grouped = bits.reshape(bits.shape[:-1] + (-1, bits_per_symbol))
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1)
    return grouped @ weights


def index_to_bits(index: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Inverse of :func:`bits_to_index`: symbol labels -> flattened bits."""
    index = np.asarray(index, dtype=np.intp)
    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    bits = (index[..., None] >> shifts) & 1
    return bits.reshape(index.shape[:-1] + (-1,)).astype(np.uint8)


def map_bits_to_vector(bits, constellation: Constellation, M: int) -> np.ndarray:
    bits = _check_bits(bits, constellation, M)
    return constellation.symbols[bits_to_index(bits, constellation.bits_per_symbol)]


def map_vector_to_bits(vector, constellation: Constellation, M: int) -> np.ndarray:
    """Bit label of a constellation vector (nearest point per antenna)."""
    vector = np.asarray(vector, dtype=complex)
    if vector.shape != (M,):
        raise UsageError(f"expected a length-{M} symbol vector, got shape {vector.shape}")
    idx = np.argmin(np.abs(vector[:, None] - constellation.symbols[None, :]), axis=1)
    return index_to_bits(idx, constellation.bits_per_symbol)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    # flip so that the first nonzero real/imag coordinate is positive
    flat = np.column_stack([v.real, v.imag]).ravel()
    nz = flat[np.abs(flat) > 1e-12]
    return -v if nz.size and nz[0] < 0 else v


def _key(v: np.ndarray) -> tuple:
    return tuple(np.round(np.column_stack([v.real, v.imag]).ravel(), 9) + 0.0)


def difference_set(constellation: Constellation) -> DifferenceSet:
    """Distinct nonzero symbol differences, deduplicated up to sign."""
    seen: dict[tuple, complex] = {}
    for a, b in itertools.permutations(constellation.symbols, 2):
        d = _canonical_sign(np.array([a - b]))
        seen.setdefault(_key(d), complex(d[0]))
    return DifferenceSet(tuple(seen.values()))


@lru_cache(maxsize=None)
def _difference_vectors(kind: str, M: int) -> np.ndarray:
    cands = _enumerate(kind, M)
    seen: dict[tuple, np.ndarray] = {}
    n = len(cands)
    for l in range(n - 1):
        for m in range(l + 1, n):
            d = _canonical_sign(cands.vectors[l] - cands.vectors[m])
            seen.setdefault(_key(d), d)
    out = np.array(list(seen.values()))
    out.setflags(write=False)
    return out


def difference_vectors(candidates: CandidateSet) -> np.ndarray:
    """Distinct candidate differences x_l - x_n, one representative per +/- pair.

    Every unordered candidate pair maps to exactly one row up to sign, so the
    minimum of ``||H e||^2`` over the rows equals the minimum over all pairs.
    """
    return _difference_vectors(candidates.constellation.kind, candidates.M)
