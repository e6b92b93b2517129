"""Multi-user MIMO processing at the macro sites.

Pilot planning decides which attached nodes a sector trains in a slot and
which other sectors reuse the same pilot codebook (and therefore leak into
the least-squares channel estimate).  Zero-forcing precoding splits the
sector's downlink power equally across the trained streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import N_SECTORS_PER_SITE


class SingularChannelError(RuntimeError):
    """Estimated channel matrix too ill-conditioned to invert."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts) + 30.0


def thermal_noise_dbm(bandwidth_hz: float, noise_figure_db: float,
                      psd_dbm_hz: float = -174.0) -> float:
    """Receiver noise power over a bandwidth."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return psd_dbm_hz + 10.0 * np.log10(bandwidth_hz) + noise_figure_db


# ---------------------------------------------------------------------------
# pilot planning


@dataclass
class PilotPlan:
    """Per-sector training schedule for one slot.

    ``trained[i]`` lists the node ids sector i trains, ``pilot_index[i]``
    their codebook indices, and ``contaminators[i]`` the sectors whose
    simultaneous training leaks into sector i's estimate.
    """
    scheme: str
    codebook_size: int
    overhead: float
    trained: list[np.ndarray]
    pilot_index: list[np.ndarray]
    contaminators: list[np.ndarray]

    def pilot_user(self) -> np.ndarray:
        """Node id on each pilot per sector, -1 where a pilot is idle."""
        n = len(self.trained)
        width = max([self.codebook_size] + [len(t) for t in self.trained])
        table = np.full((n, width), -1, dtype=int)
        for i, (nodes, pilots) in enumerate(zip(self.trained, self.pilot_index)):
            table[i, pilots] = nodes
        return table


def plan_pilots(rng: np.random.Generator, members: list[np.ndarray], scheme: str,
                codebook_size: int, pilot_fraction: float,
                max_trained: int | None = None) -> PilotPlan:
    """Build the training schedule for one slot.

    scheme "orthogonal": every sector trains on its own time resource
    (no contamination); up to ``max_trained`` nodes (spatial DoF budget,
    training accumulates over slots).
    scheme "reuse1": all sectors share the codebook simultaneously; up to
    ``codebook_size`` nodes; every other sector contaminates.
    scheme "reuse3": the three sectors of a site train on disjoint thirds
    of the slot; contamination only between same-index sectors of
    different sites; overhead triples.

    Oversubscribed sectors train a uniform random subset.
    """
    n_sectors = len(members)
    if scheme == "orthogonal":
        cap = codebook_size if max_trained is None else max_trained
        overhead = pilot_fraction
    elif scheme == "reuse1":
        cap = codebook_size
        overhead = pilot_fraction
    elif scheme == "reuse3":
        cap = codebook_size
        overhead = 3.0 * pilot_fraction
    else:
        raise ValueError(f"unknown pilot scheme {scheme!r}")
    if cap > codebook_size and scheme != "orthogonal":
        raise ValueError("cannot train more nodes than pilots in one slot")

    trained, pilots = [], []
    for nodes in members:
        nodes = np.asarray(nodes, dtype=int)
        if len(nodes) > cap:
            nodes = np.sort(rng.choice(nodes, size=cap, replace=False))
        trained.append(nodes)
        if scheme == "orthogonal":
            # time-multiplexed training: indices are positional only
            pilots.append(np.arange(len(nodes)))
        else:
            # random pilot-to-node pairing decides who collides with whom
            pilots.append(rng.permutation(codebook_size)[:len(nodes)])

    contaminators: list[np.ndarray] = []
    for i in range(n_sectors):
        if scheme == "orthogonal":
            contaminators.append(np.zeros(0, dtype=int))
        elif scheme == "reuse1":
            contaminators.append(np.array([j for j in range(n_sectors) if j != i], dtype=int))
        else:  # reuse3: same position within the site, other sites only
            local = i % N_SECTORS_PER_SITE
            contaminators.append(np.array(
                [j for j in range(n_sectors)
                 if j != i and j % N_SECTORS_PER_SITE == local
                 and j // N_SECTORS_PER_SITE != i // N_SECTORS_PER_SITE], dtype=int))
    return PilotPlan(scheme=scheme, codebook_size=codebook_size, overhead=overhead,
                     trained=trained, pilot_index=pilots, contaminators=contaminators)


# ---------------------------------------------------------------------------
# channel estimation


def ls_estimate(true_channels: np.ndarray, contaminant_channels,
                ul_power_w: float, noise_var_w: float,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Least-squares estimate after correlating with the pilot codebook.

    ``true_channels`` is (M, L) for the sector's own trained nodes;
    ``contaminant_channels`` is an iterable of (M, L) arrays, column l
    holding the channel to the node that reuses pilot l elsewhere (zero
    columns where the pilot is idle there).  The estimate is the exact sum
    of the true matrix, the contaminant matrices, and white noise with
    per-entry variance noise_var / ul_power.
    """
    h_hat = np.array(true_channels, dtype=complex)
    for cont in contaminant_channels:
        h_hat = h_hat + cont
    if noise_var_w > 0.0:
        if ul_power_w <= 0.0:
            raise ValueError("uplink power must be positive for a noisy estimate")
        if rng is None:
            raise ValueError("noisy estimation needs an rng")
        std = np.sqrt(noise_var_w / ul_power_w / 2.0)
        h_hat = h_hat + std * (rng.standard_normal(h_hat.shape)
                               + 1j * rng.standard_normal(h_hat.shape))
    return h_hat


# ---------------------------------------------------------------------------
# precoding


@dataclass
class PrecodeResult:
    """Zero-forcing precoder with its power bookkeeping.

    ``weights`` has shape (M, L); column l carries stream l including its
    power, so sum_l ||w_l||^2 equals the sector power budget.
    ``stream_power_w`` are the per-stream radiated powers and
    ``effective_amp`` the real diagonal of H_hat^H W (received amplitude
    each trained node would see under the estimated channel).
    """
    weights: np.ndarray
    stream_power_w: np.ndarray
    effective_amp: np.ndarray
    total_power_w: float


def zf_precode(h_hat: np.ndarray, total_power_w: float,
               normalization: str = "per_stream_power",
               condition_limit: float = 1e12) -> PrecodeResult:
    """Zero-forcing precoder over the estimated channels.

    "per_stream_power": every stream radiates total_power / L (default).
    "equal_gain": all streams see the same effective amplitude, with the
    column norms absorbing the difference; total power is preserved.
    """
    h_hat = np.asarray(h_hat, dtype=complex)
    m, n_streams = h_hat.shape
    if n_streams == 0:
        return PrecodeResult(np.zeros((m, 0), dtype=complex), np.zeros(0), np.zeros(0),
                             total_power_w)
    if n_streams > m:
        raise SingularChannelError(f"{n_streams} streams exceed {m} antennas")
    if total_power_w <= 0:
        raise ValueError("total power must be positive")
    cond = np.linalg.cond(h_hat)
    if not np.isfinite(cond) or cond > condition_limit:
        raise SingularChannelError(f"condition number {cond:.3e} exceeds limit")
    raw = np.linalg.pinv(h_hat).conj().T          # H (H^H H)^-1, shape (M, L)
    col_norm = np.linalg.norm(raw, axis=0)
    if normalization == "per_stream_power":
        rho = np.full(n_streams, total_power_w / n_streams)
        weights = raw / col_norm * np.sqrt(rho)
        effective = np.sqrt(rho) / col_norm
    elif normalization == "equal_gain":
        scale = total_power_w / np.sum(col_norm ** 2)
        weights = raw * np.sqrt(scale)
        rho = scale * col_norm ** 2
        effective = np.full(n_streams, np.sqrt(scale))
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return PrecodeResult(weights=weights, stream_power_w=rho,
                         effective_amp=effective, total_power_w=total_power_w)


# ---------------------------------------------------------------------------
# SINR evaluation


@dataclass
class DownlinkSinr:
    """Per-stream downlink SINR with its interference decomposition."""
    sector: np.ndarray        # serving sector of each stream
    node: np.ndarray          # receiving node id of each stream
    signal_w: np.ndarray
    intra_w: np.ndarray
    inter_w: np.ndarray
    noise_w: float

    @property
    def sinr(self) -> np.ndarray:
        return self.signal_w / (self.intra_w + self.inter_w + self.noise_w)


def downlink_sinr(channels: np.ndarray, precoders: list, noise_w: float) -> DownlinkSinr:
    """Evaluate every stream's SINR at its receiving node.

    ``channels`` is (n_sectors, n_nodes, M): true channel from each sector
    to each candidate node, already carrying large-scale gain.
    ``precoders`` is a list of (PrecodeResult, node_ids) per sector; the
    precoder columns line up with node_ids.  Interference sums over every
    other stream in the network (same sector and all others).
    """
    n_sectors = channels.shape[0]
    if len(precoders) != n_sectors:
        raise ValueError("one precoder entry per sector required")
    # received power at every node from every stream of every sector
    rx_power = []
    for s, (pre, node_ids) in enumerate(precoders):
        if pre.weights.shape[1]:
            amp = channels[s].conj() @ pre.weights      # (n_nodes, L_s)
            rx_power.append(np.abs(amp) ** 2)
        else:
            rx_power.append(np.zeros((channels.shape[1], 0)))
    total_at_node = sum(p.sum(axis=1) for p in rx_power)  # (n_nodes,)

    sec_idx, node_idx, sig, intra, inter = [], [], [], [], []
    for s, (pre, node_ids) in enumerate(precoders):
        for col, node in enumerate(np.asarray(node_ids, dtype=int)):
            p_own = rx_power[s][node, col]
            p_sector = rx_power[s][node].sum()
            sec_idx.append(s)
            node_idx.append(node)
            sig.append(p_own)
            intra.append(p_sector - p_own)
            inter.append(total_at_node[node] - p_sector)
    return DownlinkSinr(sector=np.array(sec_idx, dtype=int), node=np.array(node_idx, dtype=int),
                        signal_w=np.array(sig), intra_w=np.maximum(np.array(intra), 0.0),
                        inter_w=np.maximum(np.array(inter), 0.0), noise_w=noise_w)


def access_sinr(serving_power_w, interference_power_w, noise_w: float):
    """Plain SINR of a single-antenna link."""
    s = np.asarray(serving_power_w, dtype=float)
    i = np.asarray(interference_power_w, dtype=float)
    if noise_w < 0 or np.any(s < 0) or np.any(i < 0):
        raise ValueError("powers must be non-negative")
    out = s / (i + noise_w)
    return out if out.ndim else float(out)
