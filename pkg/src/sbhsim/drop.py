"""One-drop simulation: geometry, association, MIMO, and per-node rates.

A drop is one joint realization of node positions, LoS states, shadowing,
and small-scale fading.  Every random stage pulls from its own keyed
substream of (master seed, drop index), so drops are independent,
reproducible in any execution order, and comparable across architectures
(UE positions share a stream regardless of deployment kind).

Rates are returned in architecture-neutral form: backhaul and access
spectral throughputs before the time split, so a whole alpha grid can be
evaluated from a single simulated drop (common random numbers).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import channel as ch
from . import mimo, rates, scenario
from .config import CampaignConfig
from .rng import substream

MAX_FADING_RETRIES = 5


# ---------------------------------------------------------------------------
# large-scale link state


@dataclass
class SectorLinks:
    """Large-scale state of every (sector, node) pair."""
    gain_db: np.ndarray   # pathloss + shadowing + both antenna gains
    los: np.ndarray       # bool, shared by co-sited sectors
    d2d_m: np.ndarray
    d3d_m: np.ndarray
    aod_rad: np.ndarray   # departure azimuth relative to the sector boresight


@dataclass
class PointLinks:
    """Large-scale state of every (small cell, UE) pair."""
    gain_db: np.ndarray
    los: np.ndarray
    d3d_m: np.ndarray


def sector_links(layout: scenario.NetworkLayout, profile: ch.LinkProfile,
                 node_xy: np.ndarray, height_diff_m: float,
                 rx_gain_dbi: float, rng_los: np.random.Generator,
                 rng_shadow: np.random.Generator) -> SectorLinks:
    """BS-side links: LoS and shadowing drawn per site, gains per sector."""
    n = node_xy.shape[0]
    n_sec = layout.n_sectors
    if n == 0:
        empty = np.zeros((n_sec, 0))
        return SectorLinks(empty, empty.astype(bool), empty, empty, empty)
    disp = scenario.wrap_displacement(layout, layout.site_xy, node_xy)
    d2d = np.linalg.norm(disp, axis=-1)
    d3d = np.hypot(d2d, height_diff_m)
    az = np.arctan2(disp[..., 1], disp[..., 0])

    los = ch.draw_los(rng_los, profile, d2d)
    sigma = np.where(los, profile.shadow_sigma_los_db, profile.shadow_sigma_nlos_db)
    shadow = sigma * ch.shadowing(rng_shadow, 1.0, layout.n_sites, n_nodes=n)
    base = -ch.pathloss_db(profile, los, d3d) + shadow

    pat = ch.SECTOR_PATTERN
    v_gain = ch.vertical_gain_db(pat, d3d, height_diff_m)
    per_sector = np.stack(
        [base + pat.max_gain_dbi + v_gain + ch.horizontal_gain_db(pat, az, s)
         for s in range(scenario.N_SECTORS_PER_SITE)], axis=1)

    def expand(a):
        return np.repeat(a, scenario.N_SECTORS_PER_SITE, axis=0)

    aod = az[:, None, :] - np.reshape(scenario.BORESIGHTS_RAD, (1, 3, 1))
    aod = (aod + np.pi) % (2.0 * np.pi) - np.pi
    return SectorLinks(
        gain_db=per_sector.reshape(n_sec, n) + rx_gain_dbi,
        los=expand(los), d2d_m=expand(d2d), d3d_m=expand(d3d),
        aod_rad=aod.reshape(n_sec, n))


def access_links(layout: scenario.NetworkLayout, profile: ch.LinkProfile,
                 sc_xy: np.ndarray, sc_orientation_rad: np.ndarray,
                 ue_xy: np.ndarray, pattern: ch.AntennaPattern,
                 rng_los: np.random.Generator,
                 rng_shadow: np.random.Generator,
                 shadow_correlation: float = 0.5) -> PointLinks:
    """Small-cell to UE links; shadowing correlated across cells at the UE."""
    n_sc, n_ue = sc_xy.shape[0], ue_xy.shape[0]
    if n_sc == 0 or n_ue == 0:
        empty = np.zeros((n_sc, n_ue))
        return PointLinks(empty, empty.astype(bool), empty)
    hd = layout.sc_height_m - layout.ue_height_m
    disp = scenario.wrap_displacement(layout, sc_xy, ue_xy)
    d2d = np.linalg.norm(disp, axis=-1)
    d3d = np.hypot(d2d, hd)
    az = np.arctan2(disp[..., 1], disp[..., 0])

    los = ch.draw_los(rng_los, profile, d2d)
    sigma = np.where(los, profile.shadow_sigma_los_db, profile.shadow_sigma_nlos_db)
    shadow = sigma * ch.shadowing(rng_shadow, 1.0, n_sc,
                                  correlation=shadow_correlation, n_nodes=n_ue)
    gain = (-ch.pathloss_db(profile, los, d3d) + shadow
            + ch.downtilted_antenna_gain(pattern, d2d, hd, az,
                                         sc_orientation_rad[:, None]))
    return PointLinks(gain_db=gain, los=los, d3d_m=d3d)


# ---------------------------------------------------------------------------
# association snapshot


@dataclass
class DropGeometry:
    """Positions, large-scale links, and associations of one drop."""
    deployment: scenario.Deployment
    bs_sc: SectorLinks | None
    sc_ue: PointLinks | None
    bs_ue: SectorLinks | None
    sc_serving_sector: np.ndarray        # per SC
    ue_serving_sc: np.ndarray            # per UE (self-backhaul kinds)
    ue_serving_sector: np.ndarray        # per UE (direct access)
    sc_members: list[np.ndarray]         # UE ids per SC
    sc_load: np.ndarray                  # member count per SC
    active_sc: np.ndarray                # bool per SC


def _profiles(cfg: CampaignConfig) -> tuple[ch.LinkProfile, ch.LinkProfile, ch.LinkProfile]:
    bs_sc = ch.BS_SC_PROFILE
    if not cfg.radio.site_planning:
        bs_sc = dataclasses.replace(bs_sc, site_planning_trials=1,
                                    site_planning_nlos_bonus_db=0.0)
    return bs_sc, ch.SC_UE_PROFILE, ch.BS_UE_PROFILE


def build_geometry(layout: scenario.NetworkLayout, cfg: CampaignConfig,
                   drop_index: int) -> DropGeometry:
    seed = cfg.master_seed
    dep = scenario.build_deployment(
        layout, cfg.deployment.kind,
        substream(seed, "ue", drop_index), substream(seed, "sc", drop_index),
        cfg.deployment.mean_ue_per_sector, cfg.deployment.mean_sc_per_sector,
        cfg.deployment.sc_ue_offset_m, cfg.deployment.min_bs_sc_distance_m)
    p_bs_sc, p_sc_ue, p_bs_ue = _profiles(cfg)
    n_ue, n_sc = dep.n_ues, dep.n_scs

    bs_sc = sc_ue = bs_ue = None
    sc_serving = np.zeros(n_sc, dtype=int)
    ue_sc = np.full(n_ue, -1, dtype=int)
    ue_sector = np.full(n_ue, -1, dtype=int)
    members: list[np.ndarray] = [np.zeros(0, dtype=int) for _ in range(n_sc)]

    if dep.kind == "direct_access":
        bs_ue = sector_links(layout, p_bs_ue, dep.ue_xy, layout.bs_height_m - layout.ue_height_m,
                             0.0, substream(seed, "los_bs_ue", drop_index),
                             substream(seed, "shw_bs_ue", drop_index))
        if n_ue:
            ue_sector = scenario.associate(bs_ue.gain_db)
    else:
        bs_sc = sector_links(layout, p_bs_sc, dep.sc_xy, layout.bs_height_m - layout.sc_height_m,
                             cfg.radio.sc_backhaul_gain_dbi,
                             substream(seed, "los_bs_sc", drop_index),
                             substream(seed, "shw_bs_sc", drop_index))
        sc_ue = access_links(layout, p_sc_ue, dep.sc_xy, dep.sc_orientation_rad,
                             dep.ue_xy, cfg.radio.sc_access_pattern,
                             substream(seed, "los_sc_ue", drop_index),
                             substream(seed, "shw_sc_ue", drop_index))
        if n_sc:
            sc_serving = scenario.associate(bs_sc.gain_db)
            if n_ue:
                ue_sc = scenario.associate(sc_ue.gain_db)
                members = scenario.members_by_server(ue_sc, n_sc)

    load = np.array([len(m) for m in members], dtype=int)
    return DropGeometry(
        deployment=dep, bs_sc=bs_sc, sc_ue=sc_ue, bs_ue=bs_ue,
        sc_serving_sector=sc_serving, ue_serving_sc=ue_sc,
        ue_serving_sector=ue_sector, sc_members=members, sc_load=load,
        active_sc=load > 0)


def central_site_mask(layout: scenario.NetworkLayout, geo: DropGeometry) -> np.ndarray:
    """UEs whose serving chain hangs off site 0 (the statistics site)."""
    site_of_sector = layout.sector_site()
    if geo.deployment.kind == "direct_access":
        served = geo.ue_serving_sector >= 0
        out = np.zeros(geo.deployment.n_ues, dtype=bool)
        out[served] = site_of_sector[geo.ue_serving_sector[served]] == 0
        return out
    if geo.deployment.n_scs == 0:
        return np.zeros(geo.deployment.n_ues, dtype=bool)
    sc_site = site_of_sector[geo.sc_serving_sector]
    return sc_site[geo.ue_serving_sc] == 0


# ---------------------------------------------------------------------------
# self-backhaul drop


@dataclass
class SbhDropResult:
    """Alpha-free outputs of one self-backhauled drop.

    Multiply backhaul terms by alpha and access terms by (1 - alpha) to get
    rates; end-to-end is min(alpha * backhaul_share, (1 - alpha) * access).
    Collected arrays cover the UEs of the statistics site only.
    """
    ue_access_bps: np.ndarray      # per collected UE, at full access time
    ue_backhaul_share_bps: np.ndarray  # serving SC backhaul / its load
    ue_load: np.ndarray            # members on each collected UE's serving SC
    ue_access_los: np.ndarray
    ue_backhaul_los: np.ndarray
    sc_backhaul_bps: np.ndarray    # per collected active SC, at full backhaul time
    sc_load: np.ndarray            # members of those SCs
    n_sc_central: int
    n_active_central: int
    n_ue_central: int
    fading_retries: int

    def e2e_bps(self, alpha: float) -> np.ndarray:
        return np.minimum(alpha * self.ue_backhaul_share_bps,
                          (1.0 - alpha) * self.ue_access_bps)


def _backhaul_mimo(layout, cfg: CampaignConfig, geo: DropGeometry,
                   drop_index: int, attempt: int) -> np.ndarray:
    """Per-SC backhaul throughput at alpha = 1 (zero for idle/untrained SCs)."""
    seed = cfg.master_seed
    rad, frame = cfg.radio, cfg.frame
    n_sc = geo.deployment.n_scs
    se = np.zeros(n_sc)
    active_ids = np.flatnonzero(geo.active_sc)
    if active_ids.size == 0:
        return se

    sec_members = scenario.members_by_server(geo.sc_serving_sector[active_ids],
                                             layout.n_sectors)
    sec_members = [active_ids[m] for m in sec_members]
    plan = mimo.plan_pilots(substream(seed, "pilot_bh", drop_index), sec_members,
                            "orthogonal", rad.codebook_size,
                            frame.pilot_symbol_fraction, max_trained=rad.m_antennas)

    # true channels from every sector to every active SC, one wideband draw
    links = geo.bs_sc
    pos = active_ids
    k_db = ch.rician_k_db(links.d3d_m[:, pos], rad.rician_k_intercept_db,
                          rad.rician_k_slope_db_per_m)
    rng_fad = substream(seed, "fad_bh", drop_index, attempt)
    small = ch.small_scale(rng_fad, k_db, rad.m_antennas,
                           rad.antenna_spacing_wavelengths, links.aod_rad[:, pos])
    h = ch.composite_channel(links.gain_db[:, pos], small)   # (S, A, M)

    col_of = {sc: i for i, sc in enumerate(active_ids)}
    noise_est = mimo.dbm_to_watts(
        mimo.thermal_noise_dbm(frame.bandwidth_hz, rad.bs_noise_figure_db))
    p_ul = mimo.dbm_to_watts(rad.ue_ul_power_dbm)
    rng_est = substream(seed, "est_bh", drop_index, attempt)
    p_dl = mimo.dbm_to_watts(rad.bs_power_dbm)

    precoders = []
    for s in range(layout.n_sectors):
        nodes = plan.trained[s]
        cols = [col_of[n] for n in nodes]
        h_true = h[s][cols].T                                # (M, L)
        h_hat = mimo.ls_estimate(h_true, [], p_ul, noise_est, rng_est)
        precoders.append((mimo.zf_precode(h_hat, p_dl), np.array(cols, dtype=int)))

    noise_dl = mimo.dbm_to_watts(
        mimo.thermal_noise_dbm(frame.bandwidth_hz, rad.sc_noise_figure_db))
    res = mimo.downlink_sinr(h, precoders, noise_dl)
    se[active_ids[res.node]] = rates.backhaul_rate(
        frame, 1.0, frame.pilot_symbol_fraction, res.sinr)
    return se


def _access_stage(layout, cfg: CampaignConfig, geo: DropGeometry,
                  collect: np.ndarray, drop_index: int) -> np.ndarray:
    """Per-collected-UE access throughput at full access time."""
    seed = cfg.master_seed
    rad, frame = cfg.radio, cfg.frame
    coll_ids = np.flatnonzero(collect)
    out = np.zeros(coll_ids.size)
    active_ids = np.flatnonzero(geo.active_sc)
    if coll_ids.size == 0 or active_ids.size == 0:
        return out

    links = geo.sc_ue
    k_db = ch.rician_k_db(links.d3d_m[np.ix_(active_ids, coll_ids)],
                          rad.rician_k_intercept_db, rad.rician_k_slope_db_per_m)
    q = frame.n_rb
    rng = substream(seed, "fad_acc", drop_index)
    fades = ch.siso_small_scale(rng, k_db[..., None],
                                shape=k_db.shape + (q,))
    gain = 10.0 ** (links.gain_db[np.ix_(active_ids, coll_ids)] / 10.0)
    p_rb = mimo.dbm_to_watts(rad.sc_power_dbm) / q
    rx = p_rb * gain[..., None] * np.abs(fades) ** 2         # (A, C, Q)
    total = rx.sum(axis=0)
    noise = mimo.dbm_to_watts(
        mimo.thermal_noise_dbm(frame.rb_bandwidth_hz, rad.ue_noise_figure_db))

    row_of = {sc: i for i, sc in enumerate(active_ids)}
    pos_of = {ue: i for i, ue in enumerate(coll_ids)}
    rng_rr = substream(seed, "rr", drop_index)
    for sc in active_ids:
        ues = geo.sc_members[sc]
        counts = rates.rr_allocate(rng_rr, q, len(ues))
        bounds = np.concatenate([[0], np.cumsum(counts)])
        for j, ue in enumerate(ues):
            if ue not in pos_of:
                continue
            c = pos_of[ue]
            sl = slice(bounds[j], bounds[j + 1])
            serving = rx[row_of[sc], c, sl]
            interf = total[c, sl] - serving
            sinr = mimo.access_sinr(serving, interf, noise)
            out[c] = rates.access_rate(frame, 0.0, sinr)
    return out


def run_sbh_drop(layout: scenario.NetworkLayout, cfg: CampaignConfig,
                 drop_index: int) -> SbhDropResult:
    if cfg.deployment.kind not in ("sbh_random", "sbh_adhoc"):
        raise ValueError("self-backhaul drop needs an SC deployment")
    geo = build_geometry(layout, cfg, drop_index)
    collect = central_site_mask(layout, geo)
    coll_ids = np.flatnonzero(collect)

    retries = 0
    while True:
        try:
            sc_bh = _backhaul_mimo(layout, cfg, geo, drop_index, retries)
            break
        except mimo.SingularChannelError:
            retries += 1
            if retries > MAX_FADING_RETRIES:
                raise
    access = _access_stage(layout, cfg, geo, collect, drop_index)

    serving_sc = geo.ue_serving_sc[coll_ids]
    share = np.where(geo.sc_load[serving_sc] > 0,
                     sc_bh[serving_sc] / np.maximum(geo.sc_load[serving_sc], 1), 0.0)
    site_of_sector = layout.sector_site()
    central_sc = site_of_sector[geo.sc_serving_sector] == 0 if geo.deployment.n_scs \
        else np.zeros(0, dtype=bool)
    central_active = central_sc & geo.active_sc

    acc_los = geo.sc_ue.los[serving_sc, coll_ids] if coll_ids.size else np.zeros(0, dtype=bool)
    bh_los = geo.bs_sc.los[geo.sc_serving_sector[serving_sc], serving_sc] \
        if coll_ids.size else np.zeros(0, dtype=bool)
    return SbhDropResult(
        ue_access_bps=access,
        ue_backhaul_share_bps=share,
        ue_load=geo.sc_load[serving_sc],
        ue_access_los=acc_los,
        ue_backhaul_los=bh_los,
        sc_backhaul_bps=sc_bh[central_active],
        sc_load=geo.sc_load[central_active],
        n_sc_central=int(central_sc.sum()),
        n_active_central=int(central_active.sum()),
        n_ue_central=coll_ids.size,
        fading_retries=retries)


# ---------------------------------------------------------------------------
# direct-access drop


@dataclass
class DaDropResult:
    """Per-scheme direct-access rates for the statistics site's UEs."""
    rates_bps: dict[str, np.ndarray]
    ue_los: np.ndarray
    n_ue_central: int
    fading_retries: int


def _da_plans(layout, cfg: CampaignConfig, geo: DropGeometry, schemes,
              drop_index: int) -> dict[str, mimo.PilotPlan]:
    members = scenario.members_by_server(geo.ue_serving_sector, layout.n_sectors)
    plans = {}
    for scheme in schemes:
        rng = substream(cfg.master_seed, "pilot_da", scheme, drop_index)
        plans[scheme] = mimo.plan_pilots(rng, members, scheme,
                                         cfg.radio.codebook_size,
                                         cfg.frame.pilot_symbol_fraction)
    return plans


def run_da_drop(layout: scenario.NetworkLayout, cfg: CampaignConfig,
                drop_index: int, schemes: tuple[str, ...] = ("reuse1",)) -> DaDropResult:
    """Direct massive-MIMO access, evaluated per resource block.

    All requested pilot schemes reuse the same propagation realization, so
    their comparison is paired.  UEs left untrained by an oversubscribed
    codebook score zero for that drop.
    """
    if cfg.deployment.kind != "direct_access":
        cfg = dataclasses.replace(cfg, deployment=dataclasses.replace(
            cfg.deployment, kind="direct_access"))
    for s in schemes:
        if s not in ("reuse1", "reuse3"):
            raise ValueError(f"unknown direct-access scheme {s!r}")
    geo = build_geometry(layout, cfg, drop_index)
    collect = central_site_mask(layout, geo)
    coll_ids = np.flatnonzero(collect)
    n_coll = coll_ids.size
    seed, rad, frame = cfg.master_seed, cfg.radio, cfg.frame
    q, m_ant = frame.n_rb, rad.m_antennas

    plans = _da_plans(layout, cfg, geo, schemes, drop_index)
    result_rates = {s: np.zeros(n_coll) for s in schemes}
    los = geo.bs_ue.los[geo.ue_serving_sector[coll_ids], coll_ids] \
        if n_coll else np.zeros(0, dtype=bool)
    if n_coll == 0:
        return DaDropResult(result_rates, los, 0, 0)

    # per-sector channel targets: own trained UEs (all schemes), pilot mates
    # in contaminating sectors, and the collected UEs
    tables = {s: plans[s].pilot_user() for s in schemes}
    needed: list[np.ndarray] = []
    for i in range(layout.n_sectors):
        ids = [coll_ids]
        for s in schemes:
            plan = plans[s]
            ids.append(plan.trained[i])
            for j in plan.contaminators[i]:
                mates = tables[s][j][plan.pilot_index[i]]
                ids.append(mates[mates >= 0])
        needed.append(np.unique(np.concatenate(ids)) if ids else coll_ids)

    p_rb = mimo.dbm_to_watts(rad.bs_power_dbm) / q
    noise_est = mimo.dbm_to_watts(
        mimo.thermal_noise_dbm(frame.rb_bandwidth_hz, rad.bs_noise_figure_db))
    p_ul_rb = mimo.dbm_to_watts(rad.ue_ul_power_dbm) / q
    noise_ue = mimo.dbm_to_watts(
        mimo.thermal_noise_dbm(frame.rb_bandwidth_hz, rad.ue_noise_figure_db))
    links = geo.bs_ue
    coll_pos = {ue: i for i, ue in enumerate(coll_ids)}

    retries = 0
    while True:
        try:
            total_rx = {s: np.zeros((n_coll, q)) for s in schemes}
            signal_rx = {s: np.zeros((n_coll, q)) for s in schemes}
            served = {s: np.zeros(n_coll, dtype=bool) for s in schemes}
            for i in range(layout.n_sectors):
                ids = needed[i]
                idx_of = {u: k for k, u in enumerate(ids)}
                k_db = ch.rician_k_db(links.d3d_m[i, ids], rad.rician_k_intercept_db,
                                      rad.rician_k_slope_db_per_m)
                rng_fad = substream(seed, "fad_da", drop_index, retries, i)
                small = ch.small_scale(
                    rng_fad, np.broadcast_to(k_db[:, None], (ids.size, q)),
                    m_ant, rad.antenna_spacing_wavelengths,
                    links.aod_rad[i, ids][:, None])
                h = ch.composite_channel(links.gain_db[i, ids], small)  # (U, Q, M)

                h_coll = h[[idx_of[u] for u in coll_ids]]               # (C, Q, M)
                for scheme in schemes:
                    plan = plans[scheme]
                    own = plan.trained[i]
                    if own.size == 0:
                        continue
                    own_rows = [idx_of[u] for u in own]
                    h_true = np.transpose(h[own_rows], (1, 2, 0))       # (Q, M, L)
                    cont = np.zeros_like(h_true)
                    for j in plan.contaminators[i]:
                        mates = tables[scheme][j][plan.pilot_index[i]]
                        valid = mates >= 0
                        if not valid.any():
                            continue
                        rows = [idx_of[u] for u in mates[valid]]
                        cont[:, :, valid] += np.transpose(h[rows], (1, 2, 0))
                    rng_est = substream(seed, "est_da", scheme, drop_index, retries, i)
                    noise_amp = np.sqrt(noise_est / p_ul_rb / 2.0)
                    h_hat = h_true + cont + noise_amp * (
                        rng_est.standard_normal(h_true.shape)
                        + 1j * rng_est.standard_normal(h_true.shape))

                    amps = np.empty((q, n_coll, own.size), dtype=complex)
                    for rb in range(q):
                        pre = mimo.zf_precode(h_hat[rb], p_rb)
                        amps[rb] = h_coll[:, rb, :].conj() @ pre.weights
                    rx = np.transpose(np.abs(amps) ** 2, (1, 0, 2))     # (C, Q, L)
                    total_rx[scheme] += rx.sum(axis=2)
                    for col, ue in enumerate(own):
                        c = coll_pos.get(ue)
                        if c is not None:
                            signal_rx[scheme][c] = rx[c, :, col]
                            served[scheme][c] = True
            break
        except mimo.SingularChannelError:
            retries += 1
            if retries > MAX_FADING_RETRIES:
                raise

    for scheme in schemes:
        sig = signal_rx[scheme]
        interf = np.maximum(total_rx[scheme] - sig, 0.0)
        sinr = sig / (interf + noise_ue)
        reuse = 1 if scheme == "reuse1" else 3
        vals = rates.da_rate_per_rb(frame, reuse, sinr)
        result_rates[scheme] = np.where(served[scheme], vals, 0.0)
    return DaDropResult(result_rates, los, n_coll, retries)


# ---------------------------------------------------------------------------
# association-only statistics (no fading, no MIMO)


def association_stats(layout: scenario.NetworkLayout, cfg: CampaignConfig,
                      drop_index: int) -> dict:
    """Cheap per-drop statistics from geometry and association alone.

    For SC deployments: activation counts of the statistics site's small
    cells, the load on every collected UE's serving cell, and the serving
    links' LoS states.  For direct access: the serving sector's LoS state.
    """
    geo = build_geometry(layout, cfg, drop_index)
    collect = central_site_mask(layout, geo)
    coll_ids = np.flatnonzero(collect)
    site_of_sector = layout.sector_site()

    if geo.deployment.kind == "direct_access":
        los = geo.bs_ue.los[geo.ue_serving_sector[coll_ids], coll_ids] \
            if coll_ids.size else np.zeros(0, dtype=bool)
        return {"kind": "direct_access", "n_ue": coll_ids.size,
                "serving_los": los}

    central_sc = site_of_sector[geo.sc_serving_sector] == 0 if geo.deployment.n_scs \
        else np.zeros(0, dtype=bool)
    serving_sc = geo.ue_serving_sc[coll_ids]
    acc_los = geo.sc_ue.los[serving_sc, coll_ids] if coll_ids.size \
        else np.zeros(0, dtype=bool)
    bh_los = geo.bs_sc.los[geo.sc_serving_sector[serving_sc], serving_sc] \
        if coll_ids.size else np.zeros(0, dtype=bool)
    return {
        "kind": geo.deployment.kind,
        "n_sc": int(central_sc.sum()),
        "n_active": int((central_sc & geo.active_sc).sum()),
        "n_ue": coll_ids.size,
        "ue_load": geo.sc_load[serving_sc],
        "access_los": acc_los,
        "backhaul_los": bh_los,
    }
