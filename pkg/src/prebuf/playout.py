"""Client play-out buffer dynamics.

Each slot the player needs a fixed number of bits; whatever arrived on top
of that is carried over, bounded by the maximum buffer size.  A slot where
buffered plus received bits fall short is an outage: playback stalls for
that slot and the buffered bits are retained (HLS-style stop and refill,
no partial frames).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VideoSpec:
    """One constant-rate video stream sliced into fixed-duration slots."""

    bits_per_slot: float
    slot_duration_s: float
    num_slots: int
    max_carryover_bits: float
    avg_rate_bps: float | None = None

    def __post_init__(self) -> None:
        if self.bits_per_slot <= 0:
            raise ValueError("bits_per_slot must be positive")
        if self.slot_duration_s <= 0:
            raise ValueError("slot_duration_s must be positive")
        if self.num_slots < 1:
            raise ValueError("num_slots must be >= 1")
        if self.max_carryover_bits < 0:
            raise ValueError("max_carryover_bits must be >= 0")
        if self.avg_rate_bps is not None:
            implied = self.bits_per_slot / self.slot_duration_s
            if abs(self.avg_rate_bps - implied) / self.avg_rate_bps > 1e-6:
                raise ValueError(
                    f"avg_rate_bps {self.avg_rate_bps} inconsistent with "
                    f"bits_per_slot/slot_duration_s = {implied}")

    @property
    def total_bits(self) -> float:
        return self.bits_per_slot * self.num_slots


@dataclass(frozen=True)
class BufferTimeline:
    """Slot-by-slot result of feeding a received-bits plan to the player."""

    received_bits: np.ndarray
    carryover_bits: np.ndarray   # buffer content entering each slot, z_1 = 0
    played_bits: np.ndarray
    outage_flags: np.ndarray
    carryover_limit_exceeded: bool = False

    @property
    def num_outages(self) -> int:
        return int(np.count_nonzero(self.outage_flags))

    @property
    def final_carryover_bits(self) -> float:
        t = self.received_bits
        return float(t[-1] + self.carryover_bits[-1] - self.played_bits[-1])


def step_buffer(z_t: float, r_t: float, v: float):
    """Advance the buffer one slot; returns (z_next, played, outage).

    The outage comparison carries a 1e-9 relative slack so that plans
    satisfying the no-outage equalities up to floating-point rounding do
    not stall on sub-microbit shortfalls.
    """
    if z_t < 0 or r_t < 0 or v < 0:
        raise ValueError("buffer quantities must be non-negative")
    total = r_t + z_t
    if total >= v * (1.0 - 1e-9):
        return max(total - v, 0.0), v, False
    return total, 0.0, True


def simulate_playback(plan_received, spec: VideoSpec) -> BufferTimeline:
    """Fold the buffer recursion over a full received-bits plan.

    Ground truth for any allocation plan: a plan is good iff this reports
    zero outages.  Carry-over beyond spec.max_carryover_bits is flagged on
    the timeline (planner bug or hand-made plan), never clipped.
    """
    received = np.asarray(plan_received, dtype=float)
    if received.shape != (spec.num_slots,):
        raise ValueError(
            f"plan has {received.size} slots, expected {spec.num_slots}")
    if np.any(received < 0):
        raise ValueError("received bits must be non-negative")

    T = spec.num_slots
    carry = np.zeros(T)
    played = np.zeros(T)
    outage = np.zeros(T, dtype=bool)
    z = 0.0
    for t in range(T):
        carry[t] = z
        z, played[t], outage[t] = step_buffer(z, received[t],
                                              spec.bits_per_slot)
    limit = spec.max_carryover_bits + 1e-6 * spec.bits_per_slot
    exceeded = bool(np.any(carry > limit)) or z > limit
    return BufferTimeline(received, carry, played, outage, exceeded)
