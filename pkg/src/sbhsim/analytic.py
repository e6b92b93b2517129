"""Closed-form average-rate calculator for the self-backhauled network.

Companion to the Monte-Carlo simulator: activation probability and load of
the small-cell tier, the wideband backhaul SIR of a planned (LoS) backhaul
link inside one sector, and the access-rate coverage of a UE served by the
nearest small cell in a Poisson field of interferers.  All integrals use
deterministic Gauss-Legendre rules with doubling-based error control, so
outputs are reproducible bit for bit.

Conventions: distances in meters, densities in 1/m^2, powers in watts,
rates in bit/s.  "Density multiplier" scales the small-cell density
relative to the UE density.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .channel import (AntennaPattern, LinkProfile, BS_SC_PROFILE, SC_UE_PROFILE,
                      SECTOR_PATTERN, los_probability)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Deterministic quadrature controls.

    Improper integrals are truncated where an analytic bound on the tail
    (power-law or Gaussian decay of the integrand) drops below
    ``tail_fraction`` times the relative tolerance.
    """
    rel_tol: float = 1e-6
    abs_tol: float = 0.0
    start_nodes: int = 64
    max_nodes: int = 8192
    tail_fraction: float = 0.1


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=64)
def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gl_rescaled(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gl_nodes(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def integrate_adaptive(f, a: float, b: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integrate a vectorized function with node-doubling error control."""
    if b <= a:
        return 0.0
    n = quad.start_nodes
    x, w = _gl_rescaled(n, a, b)
    est = float(w @ f(x))
    while True:
        n *= 2
        if n > quad.max_nodes:
            raise QuadratureError(
                f"no convergence on [{a:g}, {b:g}]: last={est:.6e} at {n // 2} nodes")
        x, w = _gl_rescaled(n, a, b)
        new = float(w @ f(x))
        if abs(new - est) <= max(quad.rel_tol * abs(new), quad.abs_tol):
            return new
        est = new


# ---------------------------------------------------------------------------
# small-cell tier activation and load


def activation_probability(ue_sc_density_ratio) -> np.ndarray:
    """Probability that a small cell serves at least one UE.

    Void-probability fit for a Poisson cell layout with Poisson users:
    1 - (1 + ratio / 3.5)^-3.5.
    """
    x = np.asarray(ue_sc_density_ratio, dtype=float)
    if np.any(x < 0):
        raise ValueError("density ratio must be non-negative")
    out = 1.0 - (1.0 + x / 3.5) ** (-3.5)
    return out if out.ndim else float(out)


def mean_load(ue_sc_density_ratio) -> np.ndarray:
    """Mean UEs sharing the small cell that serves a typical UE."""
    x = np.asarray(ue_sc_density_ratio, dtype=float)
    out = 1.0 + 1.28 * x
    return out if out.ndim else float(out)


def mean_ues_per_active_sc(ue_sc_density_ratio) -> np.ndarray:
    """Mean UEs attached to a typical active small cell."""
    x = np.asarray(ue_sc_density_ratio, dtype=float)
    out = x / activation_probability(x)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class AnalyticParams:
    """Inputs of the closed-form model (one deployment configuration)."""
    m_antennas: int = 64
    bs_power_w: float = 10.0 ** ((46.0 - 30.0) / 10.0)
    sc_power_w: float = 10.0 ** ((30.0 - 30.0) / 10.0)
    sc_backhaul_gain_dbi: float = 5.0
    sc_access_gain_dbi: float = 10.0
    sector_pattern: AntennaPattern = SECTOR_PATTERN
    bs_sc_profile: LinkProfile = BS_SC_PROFILE
    sc_ue_profile: LinkProfile = SC_UE_PROFILE
    bs_sc_height_diff_m: float = 27.0
    sc_ue_height_diff_m: float = 3.5
    isd_m: float = 500.0
    min_backhaul_dist_m: float = 35.0
    mean_sc_per_sector: float = 16.0
    mean_ue_per_sector: float = 16.0
    adhoc: bool = False
    adhoc_offset_m: float = 0.0
    los_decay_scale_m: float = 82.0  # D of exp(-(x/D)^2), fit to the access curve
    bandwidth_hz: float = 10e6

    @property
    def cell_center_dist_m(self) -> float:
        return self.isd_m / 2.0

    @property
    def ring_radius_m(self) -> float:
        return 1.5 * self.isd_m

    @property
    def sector_density(self) -> float:
        cell_r = self.isd_m / np.sqrt(3.0)
        return 3.0 / (1.5 * np.sqrt(3.0) * cell_r ** 2)

    @property
    def sc_density(self) -> float:
        return self.mean_sc_per_sector * self.sector_density

    @property
    def ue_density(self) -> float:
        return self.mean_ue_per_sector * self.sector_density

    @property
    def activation(self) -> float:
        if self.adhoc:
            return 1.0
        return float(activation_probability(self.ue_density / self.sc_density))

    @property
    def active_sc_density(self) -> float:
        return self.activation * self.sc_density

    @property
    def mean_active_sc_per_sector(self) -> float:
        return self.active_sc_density / self.sector_density

    @property
    def load(self) -> float:
        if self.adhoc:
            return 1.0
        return float(mean_load(self.ue_density / self.sc_density))


def _pathgain(profile: LinkProfile, los: bool, dist):
    a = profile.intercept_linear(los)
    eta = profile.los_exponent if los else profile.nlos_exponent
    return a * np.asarray(dist, dtype=float) ** (-eta)


def _db_to_lin(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


# ---------------------------------------------------------------------------
# backhaul SIR and rate


def _vertical_gain_lin(pattern: AntennaPattern, horiz_dist, height_diff):
    elev = np.degrees(np.arctan2(height_diff, np.asarray(horiz_dist, dtype=float)))
    dev = (elev - pattern.downtilt_deg) / pattern.v_beamwidth_deg
    return _db_to_lin(-np.minimum(12.0 * dev * dev, pattern.floor_v_db))


def _horizontal_gain_lin(pattern: AntennaPattern, theta_rad, sector: int):
    theta = (np.degrees(np.asarray(theta_rad, dtype=float)) - 120.0 * sector + 180.0) % 360.0 - 180.0
    dev = theta / pattern.h_beamwidth_deg
    return _db_to_lin(-np.minimum(12.0 * dev * dev, pattern.floor_h_db))


@lru_cache(maxsize=8)
def _mean_horizontal_gain(pattern: AntennaPattern) -> float:
    """Azimuth-averaged linear gain of a site's three co-located sectors."""
    theta, w = _gl_rescaled(512, 0.0, 2.0 * np.pi)
    total = sum(_horizontal_gain_lin(pattern, theta, s) for s in range(3))
    return float(w @ total) / (2.0 * np.pi)


def backhaul_sir(params: AnalyticParams, dist_m, azimuth_rad,
                 mean_active_sc: float | None = None) -> np.ndarray:
    """Wideband SIR of a planned backhaul link inside the serving sector.

    ``dist_m`` is the ground distance from the site.  The serving site
    beamforms to ``mean_active_sc`` small cells with zero-forcing, which
    leaves the per-stream array gain (M - L + 1) / L on a LoS pathloss
    link.  Interference is the sum of the two co-sited sectors (same
    distance, sidelobe horizontal gain) and an annulus of surrounding
    sites treated as an unplanned NLoS field with azimuth-averaged
    horizontal gain.
    """
    mu = params.mean_active_sc_per_sector if mean_active_sc is None else mean_active_sc
    if mu <= 0:
        raise ValueError("mean active SC count must be positive")
    if mu > params.m_antennas:
        raise ValueError("active SCs exceed spatial degrees of freedom")
    r = np.asarray(dist_m, dtype=float)
    theta = np.asarray(azimuth_rad, dtype=float)
    rc = params.cell_center_dist_m
    if np.any(r <= 0) or np.any(r > rc):
        raise ValueError("backhaul ground distance must lie in (0, half the ISD]")
    pat = params.sector_pattern
    hd = params.bs_sc_height_diff_m
    p_elem = params.bs_power_w
    g_max = _db_to_lin(pat.max_gain_dbi)
    g_sc = _db_to_lin(params.sc_backhaul_gain_dbi)

    prefactor = (params.m_antennas - mu + 1.0) / mu
    beam = _vertical_gain_lin(pat, r, hd)
    d3 = np.hypot(r, hd)
    serve = (prefactor * p_elem * g_max * g_sc * beam
             * _horizontal_gain_lin(pat, theta, 0)
             * _pathgain(params.bs_sc_profile, True, d3))

    own_site = (p_elem * g_max * g_sc * beam
                * (_horizontal_gain_lin(pat, theta, 1) + _horizontal_gain_lin(pat, theta, 2))
                * _pathgain(params.bs_sc_profile, True, d3))

    # surrounding sites: radial integral over [2 Rc - r, ring radius - r]
    near = 2.0 * rc - r
    width = params.ring_radius_m - 2.0 * rc
    t, wt = _gl_nodes(128)
    u = near[..., None] + 0.5 * width * (t + 1.0)
    gv = _vertical_gain_lin(pat, u, hd)
    profile_gain = gv * _pathgain(params.bs_sc_profile, False, np.hypot(u, hd)) * u
    radial = (profile_gain @ wt) * 0.5 * width
    ring = (2.0 * np.pi * params.sector_density * p_elem * g_max * g_sc
            * _mean_horizontal_gain(pat) * radial)
    out = serve / (own_site + ring)
    return out if out.ndim else float(out)


def avg_backhaul_rate(params: AnalyticParams, alpha: float,
                      mean_active_sc: float | None = None,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Mean backhaul rate of a planned link, averaged over the sector.

    Link distance uniform on [min distance, half ISD], azimuth uniform on
    the sector wedge; rate alpha * BW * log2(1 + SIR).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    if alpha == 0.0:
        return 0.0
    r_lo, r_hi = params.min_backhaul_dist_m, params.cell_center_dist_m
    th_hi = np.pi / 3.0

    def mean_over_theta(n_theta: int):
        theta, wt = _gl_rescaled(n_theta, -th_hi, th_hi)

        def inner(r):
            sir = backhaul_sir(params, r[:, None], theta[None, :], mean_active_sc)
            return np.log2(1.0 + sir) @ wt / (2.0 * th_hi)

        return inner

    n = quad.start_nodes
    est = None
    while n <= quad.max_nodes:
        inner = mean_over_theta(n)
        r, wr = _gl_rescaled(n, r_lo, r_hi)
        new = float(wr @ inner(r)) / (r_hi - r_lo)
        if est is not None and abs(new - est) <= max(quad.rel_tol * abs(new), quad.abs_tol):
            return alpha * params.bandwidth_hz * new
        est = new
        n *= 2
    raise QuadratureError("backhaul rate quadrature did not converge")


# ---------------------------------------------------------------------------
# access coverage and rate


def access_los_probability(dist_m, decay_scale_m: float) -> np.ndarray:
    """Gaussian-tail LoS curve exp(-(d/D)^2) used by the coverage integrals."""
    d = np.asarray(dist_m, dtype=float)
    out = np.exp(-((d / decay_scale_m) ** 2))
    return out if out.ndim else float(out)


def fit_los_decay_scale(profile: LinkProfile = SC_UE_PROFILE, d_max_m: float = 300.0) -> float:
    """Least-squares D of exp(-(d/D)^2) against a profile's LoS curve."""
    d = np.linspace(1.0, d_max_m, 600)
    target = np.asarray(los_probability(profile, d))

    def sse(scale):
        return np.sum((np.exp(-((d / scale) ** 2)) - target) ** 2)

    from scipy.optimize import minimize_scalar
    res = minimize_scalar(sse, bounds=(10.0, 500.0), method="bounded")
    return float(res.x)


def nlos_exclusion_radius(params: AnalyticParams, serving_dist_m: float) -> float:
    """Closest possible NLoS interferer given a LoS serving link.

    A NLoS small cell nearer than this would beat the serving pathgain and
    would have been selected instead.
    """
    a_l = params.sc_ue_profile.intercept_linear(True)
    a_nl = params.sc_ue_profile.intercept_linear(False)
    eta_l = params.sc_ue_profile.los_exponent
    eta_nl = params.sc_ue_profile.nlos_exponent
    return float((a_nl / a_l) ** (1.0 / eta_nl) * serving_dist_m ** (eta_l / eta_nl))


def _laplace_exponents(params: AnalyticParams, s, serving_dist_m: float,
                       interferer_density: float, quad: QuadratureSpec,
                       n_nodes: int) -> np.ndarray:
    """log of the aggregate-interference Laplace transform, vectorized in s.

    With exponential fades each interferer at distance u contributes the
    factor 1 / (1 + u^eta / c) with c = s * power * intercept, so the
    exponent is the field-density integral of that fraction.  The LoS
    field is cut off by its Gaussian occurrence probability; the NLoS
    field is integrated in the log domain (its fraction transitions at
    u* = c^(1/eta), which can sit orders of magnitude beyond the
    exclusion radius) plus an analytic power-law tail.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d_scale = params.los_decay_scale_m
    p_g = params.sc_power_w * _db_to_lin(params.sc_access_gain_dbi)
    prof = params.sc_ue_profile
    tol_exp = quad.rel_tol * quad.tail_fraction

    # LoS field on [x, x_hi]: tail bound pi lam D^2 exp(-(x_hi/D)^2)
    x_lo = serving_dist_m
    mass = np.pi * interferer_density * d_scale ** 2
    x_hi = max(d_scale * np.sqrt(np.log(max(mass / tol_exp, 2.0))), x_lo + d_scale)
    u, w = _gl_rescaled(n_nodes, x_lo, x_hi)
    c_los = s * p_g * prof.intercept_linear(True)
    # written as c / (c + u^eta) so a zero transform argument stays finite
    frac = c_los[:, None] / (c_los[:, None] + u ** prof.los_exponent)
    los_term = ((u * access_los_probability(u, d_scale)) * frac) @ w

    # NLoS field on [x1, U] in log distance, then the u^(2-eta) tail
    eta = prof.nlos_exponent
    c_nl = s * p_g * prof.intercept_linear(False)
    u_lo = max(nlos_exclusion_radius(params, serving_dist_m),
               params.sc_ue_height_diff_m)
    u_star = float(np.max(c_nl)) ** (1.0 / eta)
    u_hi = max(100.0 * u_star, u_lo + 10.0 * d_scale, 3.0 * u_lo)
    t, wt = _gl_rescaled(n_nodes, np.log(u_lo), np.log(u_hi))
    u = np.exp(t)
    frac = c_nl[:, None] / (c_nl[:, None] + u ** eta)
    pnlos = 1.0 - access_los_probability(u, d_scale)
    nlos_term = ((u * u * pnlos) * frac) @ wt
    nlos_term += c_nl * u_hi ** (2.0 - eta) / (eta - 2.0)

    return -2.0 * np.pi * interferer_density * (los_term + nlos_term)


def laplace_aggregate_interference(params: AnalyticParams, s, serving_dist_m: float,
                                   interferer_density: float,
                                   quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """Laplace transform of the out-of-cell interference at the UE.

    Interferers form a Poisson field outside the serving exclusion zone
    (LoS ones no closer than the serving distance, NLoS ones no closer
    than the pathgain crossover), each with an exponential fade.
    """
    if interferer_density < 0:
        raise ValueError("density must be non-negative")
    if serving_dist_m <= 0:
        raise ValueError("serving distance must be positive")
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < 0):
        raise ValueError("transform argument must be non-negative")
    if interferer_density == 0.0 or np.all(s_arr == 0.0):
        out = np.ones_like(s_arr)
        return out if np.ndim(s) else float(out[0])

    n = quad.start_nodes
    est = _laplace_exponents(params, s_arr, serving_dist_m, interferer_density, quad, n)
    while True:
        n *= 2
        if n > quad.max_nodes:
            raise QuadratureError("interference transform did not converge")
        new = _laplace_exponents(params, s_arr, serving_dist_m, interferer_density, quad, n)
        if np.all(np.abs(new - est) <= np.maximum(quad.rel_tol * np.abs(new), 1e-12)):
            out = np.exp(new)
            return out if np.ndim(s) else float(out[0])
        est = new


def rate_coverage(params: AnalyticParams, sir_threshold, serving_dist_m: float,
                  interferer_density: float,
                  quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """P[SIR > threshold] for a LoS serving link at a known distance.

    With an exponential serving fade this equals the interference Laplace
    transform evaluated at threshold / (serving mean power).
    """
    gamma = np.asarray(sir_threshold, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("threshold must be non-negative")
    p_g = params.sc_power_w * _db_to_lin(params.sc_access_gain_dbi)
    mean_rx = p_g * _pathgain(params.sc_ue_profile, True, serving_dist_m)
    out = laplace_aggregate_interference(params, gamma / mean_rx, serving_dist_m,
                                         interferer_density, quad)
    return out


def serving_distance_pdf(params: AnalyticParams, x) -> np.ndarray:
    """PDF of the 3-D distance to the nearest small cell (random layout).

    Rayleigh with the deployed SC density, shifted by the antenna height
    gap: support starts at the height difference.
    """
    x = np.asarray(x, dtype=float)
    lam = params.sc_density
    h = params.sc_ue_height_diff_m
    norm = np.exp(-lam * np.pi * h * h)
    pdf = 2.0 * np.pi * lam * x * np.exp(-lam * np.pi * x * x) / norm
    out = np.where(x >= h, pdf, 0.0)
    return out if out.ndim else float(out)


def avg_access_rate(params: AnalyticParams, alpha: float,
                    quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Mean access rate of a typical UE.

    The serving small cell shares its resources among ``load`` UEs, so the
    UE's spectral efficiency is log2(1 + SIR) / load; averaging its tail
    over the exponential serving fade and the interference field gives
    rate = (1 - alpha) * BW * integral over r of P[SIR > 2^(r * load) - 1].
    For the random layout the serving distance is further averaged over the
    nearest-cell distribution; the ad-hoc layout pins it at the paired
    offset.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    if alpha == 1.0:
        return 0.0
    load = params.load
    lam_int = params.active_sc_density
    h = params.sc_ue_height_diff_m

    if params.adhoc:
        x_nodes = np.array([float(np.hypot(params.adhoc_offset_m, h))])
        x_weights = np.array([1.0])
    else:
        lam = params.sc_density
        # truncate the Rayleigh tail where its residual mass is negligible
        mass_tol = quad.rel_tol * quad.tail_fraction
        x_hi = max(np.sqrt(np.log(1.0 / mass_tol) / (lam * np.pi)), 4.0 * h)
        x_nodes, x_weights = _gl_rescaled(256, h, x_hi)
        x_weights = x_weights * serving_distance_pdf(params, x_nodes)

    def coverage_profile(rate_nodes, n_quad):
        inner_quad = replace(quad, start_nodes=n_quad, max_nodes=max(quad.max_nodes, 4 * n_quad))
        gammas = 2.0 ** (rate_nodes * load) - 1.0
        total = np.zeros_like(rate_nodes)
        for x, wx in zip(x_nodes, x_weights):
            total += wx * rate_coverage(params, gammas, float(x), lam_int, inner_quad)
        return total

    # locate the effective support of the coverage tail in the rate variable
    r_hi = 2.0
    while coverage_profile(np.array([r_hi]), quad.start_nodes)[0] > 1e-9:
        r_hi *= 2.0
        if r_hi > 4096.0:
            raise QuadratureError("coverage tail does not vanish")

    n = quad.start_nodes
    est = None
    while n <= quad.max_nodes:
        r, w = _gl_rescaled(n, 0.0, r_hi)
        new = float(w @ coverage_profile(r, max(quad.start_nodes, 128)))
        if est is not None and abs(new - est) <= max(quad.rel_tol * abs(new), quad.abs_tol):
            return (1.0 - alpha) * params.bandwidth_hz * new
        est = new
        n *= 2
    raise QuadratureError("access rate quadrature did not converge")


# ---------------------------------------------------------------------------
# density sweeps


def density_sweep(params: AnalyticParams, multipliers, alpha: float,
                  quad: QuadratureSpec = DEFAULT_QUAD) -> list[dict]:
    """Backhaul and access averages as the SC density is scaled up.

    Each row scales the random deployment's SC density by one multiplier
    while UE density stays fixed.
    """
    rows = []
    for mult in multipliers:
        p = replace(params, mean_sc_per_sector=params.mean_sc_per_sector * float(mult))
        rows.append({
            "density_multiplier": float(mult),
            "activation_probability": p.activation,
            "mean_active_sc_per_sector": p.mean_active_sc_per_sector,
            "avg_backhaul_bps": avg_backhaul_rate(p, alpha, quad=quad),
            "avg_access_bps": avg_access_rate(p, alpha, quad=quad),
        })
    return rows


def adhoc_reference(params: AnalyticParams, alpha: float,
                    quad: QuadratureSpec = DEFAULT_QUAD) -> dict:
    """Fully-planned reference: one SC per UE at the paired offset."""
    p = replace(params, adhoc=True, mean_sc_per_sector=params.mean_ue_per_sector)
    return {
        "avg_backhaul_bps": avg_backhaul_rate(p, alpha, quad=quad),
        "avg_access_bps": avg_access_rate(p, alpha, quad=quad),
    }
