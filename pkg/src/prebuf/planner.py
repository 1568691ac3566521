"""Per-user spectrum planning over the look-ahead window.

Compiles the buffer recursion plus channel capacities into a small LP:
variables x = [r_1..r_T, z_2..z_T], objective is the PRB-slots needed to
deliver the r's, equality rows force exactly one slot of video per slot,
and box bounds encode both the buffer cap and the residual spectrum left
in each slot.  The slot-local greedy with no look-ahead serves as the
comparison baseline.

Bits are scaled to megabits inside the LP to keep the matrix well
conditioned; plans are reported back in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simplex
from .link import ChannelTrace
from .playout import VideoSpec

_MBIT = 1e6


@dataclass(frozen=True)
class AllocationPlan:
    """Planned per-slot delivery for one user (bits, bits, PRBs)."""

    received_bits: np.ndarray     # r_t, length T
    carryover_bits: np.ndarray    # z_2 .. z_T, length T-1
    prbs: np.ndarray              # w_t = r_t / c_t, length T
    total_prb_slots: float
    feasible: bool


def build_buffer_matrix(T: int) -> np.ndarray:
    """Equality-constraint matrix over x = [r_1..r_T, z_2..z_T].

    Row t states that received plus carried-in minus carried-out bits
    equal one slot of video; the first and last rows have no carry-in and
    no carry-out respectively.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    A = np.zeros((T, 2 * T - 1))
    A[:, :T] = np.eye(T)
    for t in range(T - 1):
        A[t, T + t] = -1.0       # carry-out of slot t+1
        A[t + 1, T + t] = 1.0    # carry-in to slot t+2
    return A


def _check_inputs(spec: VideoSpec, trace: ChannelTrace, residual_prbs):
    residual = np.asarray(residual_prbs, dtype=float)
    if trace.num_slots != spec.num_slots:
        raise ValueError(
            f"trace covers {trace.num_slots} slots, video needs "
            f"{spec.num_slots}")
    if residual.shape != (spec.num_slots,):
        raise ValueError("residual_prbs length mismatch")
    if np.any(residual < 0):
        raise ValueError("residual_prbs must be non-negative")
    return residual


def _infeasible_plan(T: int) -> AllocationPlan:
    z = np.zeros(T)
    return AllocationPlan(z, np.zeros(max(T - 1, 0)), z.copy(), 0.0, False)


def _finish_plan(received_bits, carryover_bits, trace) -> AllocationPlan:
    prbs = received_bits / trace.bits_per_prb
    return AllocationPlan(received_bits, carryover_bits, prbs,
                          float(prbs.sum()), True)


def plan_anticipatory(spec: VideoSpec, trace: ChannelTrace,
                      residual_prbs) -> AllocationPlan:
    """Minimum-spectrum plan given predicted per-slot capacities."""
    residual = _check_inputs(spec, trace, residual_prbs)
    T = spec.num_slots
    c_mb = trace.bits_per_prb / _MBIT
    v_mb = spec.bits_per_slot / _MBIT
    z_mb = spec.max_carryover_bits / _MBIT

    objective = np.concatenate([1.0 / c_mb, np.zeros(T - 1)])
    upper = np.concatenate([c_mb * residual, np.full(T - 1, z_mb)])
    problem = simplex.LpProblem(
        objective=objective,
        eq_matrix=build_buffer_matrix(T),
        eq_rhs=np.full(T, v_mb),
        var_upper_bounds=upper,
    )
    # r_t = V, z = 0 is basic-feasible whenever no slot is capacity-short;
    # the r-columns form an identity basis, skipping simplex phase 1.
    hint = list(range(T)) if np.all(upper[:T] >= v_mb) else None
    sol = simplex.solve(problem, basis_hint=hint)
    if sol.status == "infeasible":
        return _infeasible_plan(T)
    if sol.status != "optimal":
        raise RuntimeError(f"planner LP reported {sol.status}")
    r = np.clip(sol.x[:T], 0.0, None) * _MBIT
    z = np.clip(sol.x[T:], 0.0, None) * _MBIT
    return _finish_plan(r, z, trace)


def plan_baseline(spec: VideoSpec, trace: ChannelTrace,
                  residual_prbs) -> AllocationPlan:
    """Slot-local greedy: fetch this slot's bits now or fall short.

    Models a scheduler with no knowledge of future channel conditions and
    no pre-buffering: each slot requests exactly one slot of video,
    truncated to the spectrum still available.  Short slots surface as
    outages in simulation; the plan is marked infeasible if any occurred.
    """
    residual = _check_inputs(spec, trace, residual_prbs)
    cap_bits = trace.bits_per_prb * residual
    r = np.minimum(spec.bits_per_slot, cap_bits)
    short = np.any(r < spec.bits_per_slot)
    prbs = r / trace.bits_per_prb
    return AllocationPlan(r, np.zeros(spec.num_slots - 1), prbs,
                          float(prbs.sum()), not bool(short))
