"""Buffer-aided relay network state machine.

One slot is one packet duration: the selected transmitter sends M packets in
parallel (one per antenna) over ``symbols_per_packet`` channel uses of a
single channel draw.  Relays decode-and-forward without error detection, so
relay decoding errors reach the destination.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .channel import CSIModel, LinkEstimate, SlotChannels, draw_noise, draw_slot_channels
from .constellation import (
    CandidateSet,
    build_constellation,
    bits_to_index,
    enumerate_candidates,
    index_to_bits,
)
from .detection import ml_detect_block
from .errors import ConfigurationError, UsageError
from .selection import (
    CRITERIA,
    PROTOCOLS,
    SlotDecision,
    coop_gain,
    decide_slot,
    direct_gain,
    select_reception,
)

__all__ = [
    "Packet",
    "RelayState",
    "SlotOutcome",
    "Network",
    "initialize_buffers",
    "run_slot",
    "execute_decision",
    "transmit_packets",
]


@dataclass
class Packet:
    id: int
    source_bits: np.ndarray
    origin_slot: int
    relay_bits: np.ndarray | None = None


class RelayState:
    """FIFO packet buffer holding at most ``capacity`` packets."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.buffer: deque[Packet] = deque()

    @property
    def occupancy(self) -> int:
        return len(self.buffer)

    @property
    def free(self) -> int:
        return self.capacity - len(self.buffer)

    def push(self, packets: list[Packet]) -> None:
        if len(packets) > self.free:
            raise UsageError(f"buffer overflow: {len(packets)} packets, {self.free} free")
        self.buffer.extend(packets)

    def pop(self, count: int) -> list[Packet]:
        if count > len(self.buffer):
            raise UsageError(f"buffer underflow: {count} requested, {len(self.buffer)} stored")
        return [self.buffer.popleft() for _ in range(count)]


@dataclass
class SlotOutcome:
    decision: SlotDecision
    delivered: list[tuple[int, np.ndarray]] = field(default_factory=list)
    bit_errors: int = 0
    bits_delivered: int = 0


class Network:
    """Source, N relays with buffers of J packets, destination; M antennas each."""

    def __init__(
        self,
        N: int,
        M: int,
        J: int,
        constellation: str = "bpsk",
        criterion: str = "mmd",
        protocol: str = "switched",
        symbols_per_packet: int = 100,
        csi: CSIModel | None = None,
        N_0: float = 1.0,
    ):
        if N < 1 or M < 1 or symbols_per_packet < 1:
            raise ConfigurationError("N, M and symbols_per_packet must be positive")
        if J < 2 * M:
            raise ConfigurationError(f"buffer size J={J} must be at least 2M={2 * M}")
        if (J // 2) % M:
            raise ConfigurationError(
                f"half-full buffer ({J // 2} packets) is not reachable in batches of M={M}"
            )
        if criterion not in CRITERIA or protocol not in PROTOCOLS:
            raise ConfigurationError(f"unknown criterion/protocol {criterion!r}/{protocol!r}")
        if not N_0 > 0:
            raise ConfigurationError(f"N_0 must be positive, got {N_0}")
        self.N, self.M, self.J = N, M, J
        self.constellation = build_constellation(constellation)
        self.candidates: CandidateSet = enumerate_candidates(self.constellation, M)
        self.criterion, self.protocol = criterion, protocol
        self.symbols_per_packet = symbols_per_packet
        self.csi = csi if csi is not None else CSIModel.perfect()
        self.N_0 = N_0
        self.relays = [RelayState(J) for _ in range(N)]
        self.next_id = 0
        self.created_main = 0  # packets created after initialization
        self.delivered_ids: list[int] = []
        self.slot = 0

    @property
    def bits_per_packet(self) -> int:
        return self.symbols_per_packet * self.constellation.bits_per_symbol

    def occupancy(self) -> list[int]:
        return [r.occupancy for r in self.relays]

    def buffered(self) -> int:
        return sum(r.occupancy for r in self.relays)

    def new_packets(self, rng: np.random.Generator, count: int) -> list[Packet]:
        bits = rng.integers(0, 2, size=(count, self.bits_per_packet), dtype=np.uint8)
        out = [Packet(self.next_id + i, bits[i], self.slot) for i in range(count)]
        self.next_id += count
        return out

    def draw_channels(self, rng: np.random.Generator, E_s: float) -> SlotChannels:
        return draw_slot_channels(rng, self.N, self.M, self.csi, E_s)


def transmit_packets(
    rng: np.random.Generator,
    network: Network,
    bits: np.ndarray,
    link: LinkEstimate,
    gain: float,
) -> np.ndarray:
    """Send M packets (rows of ``bits``) over ``link`` and ML-decode them.

    The signal propagates through the true channel; the receiver detects with
    the estimate.  Returns the decoded bits, same shape as ``bits``.
    """
    c = network.constellation
    M = network.M
    if bits.shape != (M, network.bits_per_packet):
        raise UsageError(f"expected ({M}, {network.bits_per_packet}) bits, got {bits.shape}")
    sym_idx = bits_to_index(bits, c.bits_per_symbol)  # (M, T)
    x = c.symbols[sym_idx].T  # (T, M), row t is the t-th transmit vector
    y = gain * (x @ link.true_H.entries.T) + draw_noise(rng, M, network.N_0, size=x.shape[0])
    k = ml_detect_block(y, link.estimated_H.entries, gain, network.candidates)
    # candidate index -> per-antenna symbol labels, antenna 0 most significant
    Ns = c.size
    digits = (k[None, :] // Ns ** np.arange(M - 1, -1, -1)[:, None]) % Ns
    return index_to_bits(digits, c.bits_per_symbol)


def _deliver(outcome: SlotOutcome, packets: list[Packet], decoded: np.ndarray, network: Network) -> None:
    for p, d in zip(packets, decoded):
        outcome.delivered.append((p.id, d))
        outcome.bit_errors += int(np.count_nonzero(d != p.source_bits))
        outcome.bits_delivered += d.size
        network.delivered_ids.append(p.id)


def execute_decision(
    rng: np.random.Generator,
    network: Network,
    decision: SlotDecision,
    channels: SlotChannels,
    E_s: float,
) -> SlotOutcome:
    """Carry out a slot decision: move packets, detect, count bit errors."""
    M = network.M
    out = SlotOutcome(decision)
    if decision.mode == "direct":
        packets = network.new_packets(rng, M)
        network.created_main += M
        bits = np.stack([p.source_bits for p in packets])
        decoded = transmit_packets(rng, network, bits, channels.sd, direct_gain(E_s, M))
        _deliver(out, packets, decoded, network)
    elif decision.mode == "reception":
        relay = network.relays[decision.relay]
        packets = network.new_packets(rng, M)
        network.created_main += M
        bits = np.stack([p.source_bits for p in packets])
        decoded = transmit_packets(rng, network, bits, channels.sr[decision.relay], coop_gain(E_s, M))
        for p, d in zip(packets, decoded):
            p.relay_bits = d
        relay.push(packets)
    elif decision.mode == "transmission":
        packets = network.relays[decision.relay].pop(M)
        bits = np.stack([p.relay_bits for p in packets])
        decoded = transmit_packets(rng, network, bits, channels.rd[decision.relay], coop_gain(E_s, M))
        _deliver(out, packets, decoded, network)
    else:
        raise UsageError(f"unknown mode {decision.mode!r}")
    return out


def run_slot(rng: np.random.Generator, network: Network, E_s: float) -> SlotOutcome:
    """Draw the slot's channels, decide the mode and execute it.

    Channels are drawn first, so networks sharing a slot stream see the same
    channel realizations whatever they decide.
    """
    channels = network.draw_channels(rng, E_s)
    decision = decide_slot(
        channels,
        network.occupancy(),
        network.J,
        network.criterion,
        network.protocol,
        E_s,
        network.candidates,
    )
    outcome = execute_decision(rng, network, decision, channels, E_s)
    network.slot += 1
    return outcome


def initialize_buffers(rng: np.random.Generator, network: Network, E_s: float) -> int:
    """Fill every relay to floor(J/2) packets with reception-only slots.

    Each slot the source sends M packets to the relay, among those still
    below the target, whose SR link scores best under the network's
    criterion.  Returns the number of slots used.  Packets created here do
    not count towards ``created_main``.
    """
    if network.buffered():
        raise UsageError("buffers must be empty before initialization")
    M = network.M
    target = network.J // 2
    slots = 0
    while True:
        available = [r.occupancy + M <= target for r in network.relays]
        if not any(available):
            break
        channels = network.draw_channels(rng, E_s)
        decision = select_reception(channels, available, network.criterion, E_s, network.candidates)
        relay = network.relays[decision.relay]
        packets = network.new_packets(rng, M)
        bits = np.stack([p.source_bits for p in packets])
        decoded = transmit_packets(rng, network, bits, channels.sr[decision.relay], coop_gain(E_s, M))
        for p, d in zip(packets, decoded):
            p.relay_bits = d
        relay.push(packets)
        slots += 1
    return slots
