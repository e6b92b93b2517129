"""Rate expressions for the two-hop self-backhaul chain and direct access.

A slot is split between the in-band backhaul (fraction alpha, run by the
massive-MIMO site) and small-cell access (fraction 1 - alpha).  Uplink
training steals one symbol per slot from the trained hop; reuse-3 training
costs three symbols.  Direct access spends the same training overhead but
keeps the whole slot for data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrameConfig:
    bandwidth_hz: float = 10e6
    n_rb: int = 50
    rb_bandwidth_hz: float = 180e3
    slot_duration_s: float = 1e-3
    symbols_per_slot: int = 14

    @property
    def pilot_symbol_fraction(self) -> float:
        return 1.0 / self.symbols_per_slot


def pilot_overhead(frame: FrameConfig, reuse: int) -> float:
    """Fraction of the slot consumed by uplink training at the given reuse."""
    if reuse not in (1, 3):
        raise ValueError("pilot reuse must be 1 or 3")
    return reuse * frame.pilot_symbol_fraction


def backhaul_rate(frame: FrameConfig, alpha: float, pilot_fraction: float, sinr) -> np.ndarray:
    """Per-SC backhaul rate: alpha * (1 - overhead) * BW * log2(1 + SINR)."""
    _check_alpha(alpha)
    if not 0.0 <= pilot_fraction < 1.0:
        raise ValueError("pilot_fraction must be in [0, 1)")
    s = np.asarray(sinr, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINR must be non-negative")
    out = alpha * (1.0 - pilot_fraction) * frame.bandwidth_hz * np.log2(1.0 + s)
    return out if out.ndim else float(out)


def rr_allocate(rng: np.random.Generator, n_rb: int, n_users: int) -> np.ndarray:
    """Round-robin RB counts: floor share each, remainder by random draw."""
    if n_users <= 0:
        return np.zeros(0, dtype=int)
    counts = np.full(n_users, n_rb // n_users, dtype=int)
    remainder = n_rb % n_users
    if remainder:
        counts[rng.choice(n_users, size=remainder, replace=False)] += 1
    return counts


def access_rate(frame: FrameConfig, alpha: float, sinr_per_assigned_rb) -> float:
    """Access-hop rate over the RBs assigned to one UE (no pilot overhead)."""
    _check_alpha(alpha)
    s = np.asarray(sinr_per_assigned_rb, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINR must be non-negative")
    per_rb = frame.bandwidth_hz / frame.n_rb
    return float((1.0 - alpha) * per_rb * np.sum(np.log2(1.0 + s)))


def end_to_end_rate(backhaul_bps, n_ues_sharing, access_bps) -> np.ndarray:
    """Two-hop UE rate: min(backhaul share, access rate)."""
    share = np.asarray(backhaul_bps, dtype=float) / np.asarray(n_ues_sharing, dtype=float)
    out = np.minimum(share, np.asarray(access_bps, dtype=float))
    return out if out.ndim else float(out)


def da_rate(frame: FrameConfig, reuse: int, sinr) -> np.ndarray:
    """Direct-access rate with a single wideband SINR."""
    overhead = pilot_overhead(frame, reuse)
    s = np.asarray(sinr, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINR must be non-negative")
    out = (1.0 - overhead) * frame.bandwidth_hz * np.log2(1.0 + s)
    return out if out.ndim else float(out)


def da_rate_per_rb(frame: FrameConfig, reuse: int, sinr_per_rb) -> float:
    """Direct-access rate from per-RB SINRs, averaged in the rate domain.

    Coincides with :func:`da_rate` when all RBs share one SINR.
    """
    overhead = pilot_overhead(frame, reuse)
    s = np.asarray(sinr_per_rb, dtype=float)
    if s.shape[-1] != frame.n_rb:
        raise ValueError(f"expected {frame.n_rb} per-RB SINRs, got {s.shape[-1]}")
    per_rb = frame.bandwidth_hz / frame.n_rb
    out = (1.0 - overhead) * per_rb * np.sum(np.log2(1.0 + s), axis=-1)
    return out if out.ndim else float(out)


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
