"""Link-level channel models.

Covers the three link classes of the simulated network (macro BS to small
cell, small cell to UE, macro BS to UE): distance-dependent LoS/NLoS state,
power-law pathloss, correlated log-normal shadowing, parametric antenna
patterns, and Rician small-scale fading with a correlated uniform linear
array at the macro BS.

All pathloss/gain bookkeeping is in dB; SINR computations downstream
convert to linear watts.  Distances are in meters unless a name says
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import j0


# ---------------------------------------------------------------------------
# link profiles


@dataclass(frozen=True)
class LinkProfile:
    """Large-scale propagation parameters for one link class.

    Intercepts are pathloss in dB at 1 km, so
    PL(d) = intercept + 10 * exponent * log10(d / 1 km).
    ``los_curve`` selects the LoS-probability family:

    - "macro":    min(0.018/R, 1) * (1 - exp(-R/c)) + exp(-R/c), R in km
    - "relay_ue": 0.5 - min(0.5, 5 exp(-0.156/R)) + min(0.5, 5 exp(-R/0.03))
    - "exp_square": exp(-(d/D)^2), d in m (analytic-model form)

    ``site_planning_trials`` > 1 models planned placement of the receiver
    (best of N candidate spots): LoS probability becomes 1 - (1-p)^N and
    NLoS pathloss is reduced by ``site_planning_nlos_bonus_db``.
    """

    name: str
    los_exponent: float
    nlos_exponent: float
    los_intercept_db: float   # dB at 1 km
    nlos_intercept_db: float  # dB at 1 km
    los_curve: str
    los_curve_scale: float    # "macro": c in km; "exp_square": D in m
    shadow_sigma_los_db: float
    shadow_sigma_nlos_db: float
    site_planning_trials: int = 1
    site_planning_nlos_bonus_db: float = 0.0

    def intercept_linear(self, los: bool) -> float:
        """Linear pathgain prefactor A with gain = A * d_m^-exponent."""
        icpt = self.los_intercept_db if los else self.nlos_intercept_db
        eta = self.los_exponent if los else self.nlos_exponent
        if not los:
            icpt = icpt - self.site_planning_nlos_bonus_db
        return 10.0 ** (-(icpt - 30.0 * eta) / 10.0)


# Defaults transcribed from the hexagonal-relay evaluation methodology the
# deployment is calibrated against (2 GHz carrier).  Exponents and curve
# shapes are load-bearing; intercepts and shadowing sigmas are plain config.
BS_SC_PROFILE = LinkProfile(
    name="bs_sc",
    los_exponent=2.35,
    nlos_exponent=3.63,
    los_intercept_db=100.7,
    nlos_intercept_db=125.2,
    los_curve="macro",
    los_curve_scale=0.072,
    shadow_sigma_los_db=6.0,
    shadow_sigma_nlos_db=6.0,
    site_planning_trials=3,
    site_planning_nlos_bonus_db=5.0,
)

SC_UE_PROFILE = LinkProfile(
    name="sc_ue",
    los_exponent=2.09,
    nlos_exponent=3.75,
    los_intercept_db=103.8,
    nlos_intercept_db=145.4,
    los_curve="relay_ue",
    los_curve_scale=0.0,
    shadow_sigma_los_db=10.0,
    shadow_sigma_nlos_db=10.0,
)

BS_UE_PROFILE = LinkProfile(
    name="bs_ue",
    los_exponent=2.42,
    nlos_exponent=4.28,
    los_intercept_db=103.4,
    nlos_intercept_db=131.1,
    los_curve="macro",
    los_curve_scale=0.063,
    shadow_sigma_los_db=8.0,
    shadow_sigma_nlos_db=8.0,
)


# ---------------------------------------------------------------------------
# LoS probability and pathloss


def los_probability(profile: LinkProfile, d_2d) -> np.ndarray:
    """Probability that the link at horizontal distance d_2d (m) is LoS."""
    d = np.asarray(d_2d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    r_km = d / 1000.0
    if profile.los_curve == "macro":
        c = profile.los_curve_scale
        with np.errstate(divide="ignore"):
            near = np.minimum(np.divide(0.018, r_km, out=np.full_like(r_km, np.inf), where=r_km > 0), 1.0)
        decay = np.exp(-r_km / c)
        p = near * (1.0 - decay) + decay
    elif profile.los_curve == "relay_ue":
        with np.errstate(divide="ignore", over="ignore"):
            inv = np.divide(0.156, r_km, out=np.full_like(r_km, np.inf), where=r_km > 0)
            far = np.minimum(0.5, 5.0 * np.exp(-inv))
        near = np.minimum(0.5, 5.0 * np.exp(-r_km / 0.03))
        p = 0.5 - far + near
    elif profile.los_curve == "exp_square":
        p = np.exp(-((d / profile.los_curve_scale) ** 2))
    else:
        raise ValueError(f"unknown los_curve {profile.los_curve!r}")
    p = np.clip(p, 0.0, 1.0)
    if profile.site_planning_trials > 1:
        p = 1.0 - (1.0 - p) ** profile.site_planning_trials
    return p if p.ndim else float(p)


def pathloss_db(profile: LinkProfile, is_los, d_3d) -> np.ndarray:
    """Pathloss in dB at 3-D distance d_3d, per LoS state."""
    d = np.asarray(d_3d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("pathloss needs strictly positive distance")
    los = np.asarray(is_los, dtype=bool)
    log_km = np.log10(d / 1000.0)
    pl_los = profile.los_intercept_db + 10.0 * profile.los_exponent * log_km
    pl_nlos = (profile.nlos_intercept_db - profile.site_planning_nlos_bonus_db
               + 10.0 * profile.nlos_exponent * log_km)
    out = np.where(los, pl_los, pl_nlos)
    return out if out.ndim else float(out)


def draw_los(rng: np.random.Generator, profile: LinkProfile, d_2d) -> np.ndarray:
    """Bernoulli LoS states for an array of horizontal distances."""
    p = np.asarray(los_probability(profile, d_2d))
    return rng.random(p.shape) < p


def shadowing(rng: np.random.Generator, sigma_db, n_servers: int,
              correlation: float = 0.0, n_nodes: int = 1) -> np.ndarray:
    """Log-normal shadowing draws in dB, shape (n_servers, n_nodes).

    ``correlation`` is the pairwise coefficient between the values a single
    node sees toward different servers, realised as
    sqrt(rho) * common(node) + sqrt(1-rho) * independent(server, node).
    ``sigma_db`` may be a scalar or an (n_servers, n_nodes) array (e.g. to
    give LoS and NLoS links different spreads).
    """
    if not 0.0 <= correlation <= 1.0:
        raise ValueError("correlation must be in [0, 1]")
    common = rng.standard_normal((1, n_nodes))
    indep = rng.standard_normal((n_servers, n_nodes))
    unit = np.sqrt(correlation) * common + np.sqrt(1.0 - correlation) * indep
    return np.asarray(sigma_db) * unit


# ---------------------------------------------------------------------------
# antenna patterns


@dataclass(frozen=True)
class AntennaPattern:
    """Parametric antenna pattern.

    kind "sector": three-sector macro pattern, quadratic rolloff in both
    planes with per-plane floors; boresights fixed at 0/120/240 degrees.
    kind "downtilted": small-cell access antenna pointing straight down,
    elliptical beam around the vertical axis.
    kind "omni": constant gain.
    """

    kind: str
    max_gain_dbi: float
    h_beamwidth_deg: float = 0.0
    v_beamwidth_deg: float = 0.0
    downtilt_deg: float = 0.0
    floor_h_db: float = 25.0
    floor_v_db: float = 20.0


SECTOR_PATTERN = AntennaPattern(
    kind="sector", max_gain_dbi=14.0, h_beamwidth_deg=70.0,
    v_beamwidth_deg=10.0, downtilt_deg=15.0, floor_h_db=25.0, floor_v_db=20.0)

PATCH_PATTERN = AntennaPattern(
    kind="downtilted", max_gain_dbi=5.0, h_beamwidth_deg=80.0,
    v_beamwidth_deg=80.0, downtilt_deg=90.0, floor_h_db=25.0, floor_v_db=25.0)

YAGI_PATTERN = AntennaPattern(
    kind="downtilted", max_gain_dbi=10.0, h_beamwidth_deg=58.0,
    v_beamwidth_deg=47.0, downtilt_deg=90.0, floor_h_db=25.0, floor_v_db=25.0)

OMNI_BACKHAUL_PATTERN = AntennaPattern(kind="omni", max_gain_dbi=5.0)


def _wrap_deg(angle_deg):
    return (np.asarray(angle_deg, dtype=float) + 180.0) % 360.0 - 180.0


def vertical_gain_db(pattern: AntennaPattern, d_3d, height_diff_m: float):
    """Vertical rolloff toward a ground node at 3-D distance d_3d.

    The depression angle is atan(dh / sqrt(r^2 - dh^2)); zero loss when it
    equals the electrical downtilt.
    """
    r = np.asarray(d_3d, dtype=float)
    if np.any(r <= height_diff_m):
        raise ValueError("3-D distance must exceed the antenna height difference")
    horiz = np.sqrt(r * r - height_diff_m * height_diff_m)
    elev_deg = np.degrees(np.arctan2(height_diff_m, horiz))
    dev = (elev_deg - pattern.downtilt_deg) / pattern.v_beamwidth_deg
    out = -np.minimum(12.0 * dev * dev, pattern.floor_v_db)
    return out if out.ndim else float(out)


def horizontal_gain_db(pattern: AntennaPattern, azimuth_rad, sector_index: int = 0):
    """Horizontal rolloff at the given azimuth from the sector-0 boresight."""
    theta = _wrap_deg(np.degrees(np.asarray(azimuth_rad, dtype=float)) - 120.0 * sector_index)
    dev = theta / pattern.h_beamwidth_deg
    out = -np.minimum(12.0 * dev * dev, pattern.floor_h_db)
    return out if out.ndim else float(out)


def sector_antenna_gain(pattern: AntennaPattern, azimuth_rad, d_3d,
                        height_diff_m: float, sector_index: int = 0):
    """Total sector gain in dBi (max gain + vertical + horizontal rolloff)."""
    if pattern.kind != "sector":
        raise ValueError("sector_antenna_gain needs a sector pattern")
    return (pattern.max_gain_dbi
            + vertical_gain_db(pattern, d_3d, height_diff_m)
            + horizontal_gain_db(pattern, azimuth_rad, sector_index))


def downtilted_antenna_gain(pattern: AntennaPattern, d_2d, height_diff_m: float,
                            azimuth_rad=0.0, orientation_rad=0.0):
    """Gain of a downward-pointing access antenna toward a ground node.

    The beam axis is straight down; off-axis attenuation combines the two
    principal-plane rolloffs in the antenna's local frame (horizontal plane
    rotated by ``orientation_rad``), capped at the front-back floor.
    """
    if pattern.kind != "downtilted":
        raise ValueError("downtilted_antenna_gain needs a downtilted pattern")
    if pattern.downtilt_deg != 90.0:
        raise ValueError("only straight-down tilt is modeled")
    d = np.asarray(d_2d, dtype=float)
    off_axis = np.arctan2(d, height_diff_m)  # 0 = directly below
    nu = np.asarray(azimuth_rad, dtype=float) - orientation_rad
    # local frame: z' along the beam axis, x'/y' spanning the two planes
    x_l = np.sin(off_axis) * np.cos(nu)
    y_l = np.sin(off_axis) * np.sin(nu)
    z_l = np.cos(off_axis)
    phi_deg = np.degrees(np.arctan2(x_l, z_l))
    theta_deg = np.degrees(np.arcsin(np.clip(y_l, -1.0, 1.0)))
    att_h = np.minimum(12.0 * (phi_deg / pattern.h_beamwidth_deg) ** 2, pattern.floor_h_db)
    att_v = np.minimum(12.0 * (theta_deg / pattern.v_beamwidth_deg) ** 2, pattern.floor_v_db)
    att = np.minimum(att_h + att_v, pattern.floor_h_db)
    out = pattern.max_gain_dbi - att
    return out if out.ndim else float(out)


def antenna_gain_dbi(pattern: AntennaPattern, **kwargs):
    if pattern.kind == "omni":
        return pattern.max_gain_dbi
    if pattern.kind == "sector":
        return sector_antenna_gain(pattern, **kwargs)
    if pattern.kind == "downtilted":
        return downtilted_antenna_gain(pattern, **kwargs)
    raise ValueError(f"unknown pattern kind {pattern.kind!r}")


# ---------------------------------------------------------------------------
# small-scale fading


@lru_cache(maxsize=8)
def _correlation_sqrt(m_antennas: int, spacing_wavelengths: float) -> np.ndarray:
    """Symmetric square root of the ring-scattering array correlation.

    Entry (m, n) of the correlation is J0(2 pi spacing |m - n|).  A tiny
    diagonal loading keeps the root real when the matrix is numerically
    on the PSD boundary.
    """
    idx = np.arange(m_antennas)
    corr = j0(2.0 * np.pi * spacing_wavelengths * np.abs(idx[:, None] - idx[None, :]))
    corr = corr + 1e-9 * np.eye(m_antennas)
    vals, vecs = np.linalg.eigh(corr)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def steering_vector(aod_rad, m_antennas: int, spacing_wavelengths: float) -> np.ndarray:
    """ULA response, unit-modulus entries; shape (..., m_antennas)."""
    m = np.arange(m_antennas)
    phase = -2j * np.pi * spacing_wavelengths * np.sin(np.asarray(aod_rad, dtype=float))[..., None] * m
    return np.exp(phase)


def rician_k_db(d_3d, intercept_db: float = 13.0, slope_db_per_m: float = -0.03):
    """Distance-dependent Rician K factor in dB."""
    return intercept_db + slope_db_per_m * np.asarray(d_3d, dtype=float)


def small_scale(rng: np.random.Generator, k_db, m_antennas: int,
                spacing_wavelengths: float, aod_rad) -> np.ndarray:
    """Unit-mean-power Rician array channel(s), shape (..., m_antennas).

    Deterministic component: steering vector at the departure azimuth.
    Diffuse component: correlated complex Gaussian (ring scattering).
    ``k_db`` and ``aod_rad`` broadcast against each other.
    """
    k_db = np.asarray(k_db, dtype=float)
    aod = np.asarray(aod_rad, dtype=float)
    k_db, aod = np.broadcast_arrays(k_db, aod)
    k_lin = 10.0 ** (k_db / 10.0)
    los_scale = np.sqrt(k_lin / (k_lin + 1.0))[..., None]
    diff_scale = np.sqrt(1.0 / (k_lin + 1.0))[..., None]
    shape = k_db.shape + (m_antennas,)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    colored = z @ _correlation_sqrt(m_antennas, spacing_wavelengths)
    return los_scale * steering_vector(aod, m_antennas, spacing_wavelengths) + diff_scale * colored


def siso_small_scale(rng: np.random.Generator, k_db, shape=None) -> np.ndarray:
    """Unit-mean-power scalar Rician coefficients."""
    k_db = np.asarray(k_db, dtype=float)
    if shape is None:
        shape = k_db.shape
    k_lin = np.broadcast_to(10.0 ** (k_db / 10.0), shape)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return np.sqrt(k_lin / (k_lin + 1.0)) + np.sqrt(1.0 / (k_lin + 1.0)) * z


def composite_channel(gain_db, small):
    """Scale unit-power small-scale coefficients by a large-scale gain.

    Extra trailing axes of ``small`` (antennas, resource blocks) broadcast
    against the gain's shape.
    """
    amp = 10.0 ** (np.asarray(gain_db, dtype=float) / 20.0)
    small = np.asarray(small)
    extra = small.ndim - amp.ndim
    if extra < 0:
        raise ValueError("small-scale array has fewer axes than the gain")
    return amp.reshape(amp.shape + (1,) * extra) * small
