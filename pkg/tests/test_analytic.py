import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

from sbhsim import analytic as an
from sbhsim import channel as ch
from sbhsim import scenario

PAR = an.AnalyticParams()


# ---------------------------------------------------------------------------
# quadrature engine


def test_integrate_adaptive_polynomial():
    got = an.integrate_adaptive(lambda x: x * x, 0.0, 1.0)
    assert got == pytest.approx(1.0 / 3.0, rel=1e-9)


def test_integrate_adaptive_empty_interval():
    assert an.integrate_adaptive(lambda x: x, 1.0, 1.0) == 0.0
    assert an.integrate_adaptive(lambda x: x, 2.0, 1.0) == 0.0


def test_integrate_adaptive_raises_when_starved():
    spec = an.QuadratureSpec(rel_tol=1e-12, start_nodes=8, max_nodes=32)
    with pytest.raises(an.QuadratureError):
        an.integrate_adaptive(lambda x: np.sin(5e4 * x), 0.0, 1.0, spec)


# ---------------------------------------------------------------------------
# activation and load


def test_activation_probability_frozen_points():
    assert an.activation_probability(1.0) == pytest.approx(0.5850513490, abs=1e-9)
    assert an.activation_probability(4.0) == pytest.approx(0.9305737459, abs=1e-9)
    assert an.activation_probability(0.25) == pytest.approx(0.2145315992, abs=1e-9)
    assert an.activation_probability(0.0) == 0.0


def test_activation_probability_monotone_and_bounded():
    x = np.linspace(0.0, 50.0, 400)
    p = an.activation_probability(x)
    assert (np.diff(p) > 0).all()
    assert p[-1] < 1.0
    with pytest.raises(ValueError):
        an.activation_probability(-0.1)


def test_mean_load_frozen():
    assert an.mean_load(1.0) == pytest.approx(2.28)
    assert an.mean_load(0.0) == pytest.approx(1.0)


def test_mean_ues_per_active_sc_frozen():
    assert an.mean_ues_per_active_sc(1.0) == pytest.approx(1.7092517, abs=1e-6)
    assert an.mean_ues_per_active_sc(4.0) == pytest.approx(4.2984234, abs=1e-6)


# ---------------------------------------------------------------------------
# parameter bookkeeping


def test_params_density_matches_layout():
    lay = scenario.build_layout(500.0, 7)
    assert PAR.sector_density == pytest.approx(lay.sector_density, rel=1e-12)
    assert PAR.sc_density == pytest.approx(16.0 * lay.sector_density, rel=1e-12)


def test_params_activation_chain():
    # default densities are equal, so the ratio is 1
    assert PAR.activation == pytest.approx(0.5850513490, abs=1e-9)
    assert PAR.mean_active_sc_per_sector == pytest.approx(16.0 * 0.5850513490, rel=1e-8)
    assert PAR.load == pytest.approx(2.28)


def test_params_adhoc_overrides():
    p = dataclasses.replace(PAR, adhoc=True)
    assert p.activation == 1.0
    assert p.load == 1.0


# ---------------------------------------------------------------------------
# backhaul SIR


def _lin(db):
    return 10.0 ** (db / 10.0)


def _oracle_backhaul_sir(params, r, theta, mu):
    """Independent evaluation: channel-module formulas plus scipy.quad."""
    pat = ch.SECTOR_PATTERN
    hd = params.bs_sc_height_diff_m
    pg = lambda los, d: 10.0 ** (-ch.pathloss_db(ch.BS_SC_PROFILE, los, d) / 10.0)
    vg = lambda u: _lin(ch.vertical_gain_db(pat, np.hypot(u, hd), hd))
    amp = _lin(pat.max_gain_dbi) * _lin(params.sc_backhaul_gain_dbi) * params.bs_power_w
    d3 = np.hypot(r, hd)
    serve = ((params.m_antennas - mu + 1.0) / mu * amp * vg(r)
             * _lin(ch.horizontal_gain_db(pat, theta, 0)) * pg(True, d3))
    own = amp * vg(r) * (_lin(ch.horizontal_gain_db(pat, theta, 1))
                         + _lin(ch.horizontal_gain_db(pat, theta, 2))) * pg(True, d3)
    gbar = quad(lambda t: sum(_lin(ch.horizontal_gain_db(pat, t, s)) for s in range(3)),
                0.0, 2.0 * np.pi, limit=200)[0] / (2.0 * np.pi)
    rc = params.cell_center_dist_m
    radial = quad(lambda u: vg(u) * pg(False, np.hypot(u, hd)) * u,
                  2.0 * rc - r, params.ring_radius_m - r, limit=400)[0]
    ring = 2.0 * np.pi * params.sector_density * amp * gbar * radial
    return serve / (own + ring)


def test_mean_horizontal_gain_frozen():
    # scipy.quad of the three-sector azimuth sum gives 0.6257360
    assert an._mean_horizontal_gain(ch.SECTOR_PATTERN) == pytest.approx(
        0.6257360, abs=1e-6)


@pytest.mark.parametrize("r,theta", [(100.0, 0.0), (35.0, 0.5), (250.0, -1.0)])
def test_backhaul_sir_matches_quad_oracle(r, theta):
    mu = PAR.mean_active_sc_per_sector
    got = an.backhaul_sir(PAR, r, theta)
    assert got == pytest.approx(_oracle_backhaul_sir(PAR, r, theta, mu), rel=1e-6)


def test_backhaul_sir_stream_count_scaling():
    # per-stream array gain (M - L + 1) / L; interference is L-independent
    s16 = an.backhaul_sir(PAR, 100.0, 0.0, mean_active_sc=16.0)
    s1 = an.backhaul_sir(PAR, 100.0, 0.0, mean_active_sc=1.0)
    assert s16 / s1 == pytest.approx((49.0 / 16.0) / 64.0, rel=1e-12)
    assert an.backhaul_sir(PAR, 100.0, 0.0, mean_active_sc=8.0) > s16


def test_backhaul_sir_validation():
    with pytest.raises(ValueError):
        an.backhaul_sir(PAR, 0.0, 0.0)
    with pytest.raises(ValueError):
        an.backhaul_sir(PAR, 300.0, 0.0)
    with pytest.raises(ValueError):
        an.backhaul_sir(PAR, 100.0, 0.0, mean_active_sc=0.0)
    with pytest.raises(ValueError):
        an.backhaul_sir(PAR, 100.0, 0.0, mean_active_sc=65.0)


def test_avg_backhaul_rate_linear_in_alpha():
    r_half = an.avg_backhaul_rate(PAR, 0.5)
    r_quarter = an.avg_backhaul_rate(PAR, 0.25)
    assert r_half > 0
    assert r_quarter == pytest.approx(0.5 * r_half, rel=1e-12)
    assert an.avg_backhaul_rate(PAR, 0.0) == 0.0
    with pytest.raises(ValueError):
        an.avg_backhaul_rate(PAR, 1.2)


# ---------------------------------------------------------------------------
# access coverage


def test_access_los_probability_shape():
    assert an.access_los_probability(0.0, 82.0) == 1.0
    assert an.access_los_probability(82.0, 82.0) == pytest.approx(np.exp(-1.0))
    d = np.linspace(0, 500, 100)
    assert (np.diff(an.access_los_probability(d, 82.0)) < 0).all()


def test_fit_los_decay_scale():
    assert an.fit_los_decay_scale() == pytest.approx(82.017, abs=0.1)
    # the frozen config value rounds that fit
    assert PAR.los_decay_scale_m == 82.0


def test_nlos_exclusion_radius_equal_pathgain():
    # at the exclusion radius the NLoS mean pathgain equals the serving
    # link's LoS pathgain, so no excluded interferer could have won
    prof = PAR.sc_ue_profile
    for x in (10.0, 50.0, 200.0):
        x1 = an.nlos_exclusion_radius(PAR, x)
        g_los = prof.intercept_linear(True) * x ** -prof.los_exponent
        g_nlos = prof.intercept_linear(False) * x1 ** -prof.nlos_exponent
        assert g_nlos == pytest.approx(g_los, rel=1e-10)


def _oracle_laplace(params, s, x, lam):
    """Independent evaluation of the interference transform via scipy.quad."""
    d_scale = params.los_decay_scale_m
    p_g = params.sc_power_w * _lin(params.sc_access_gain_dbi)
    prof = params.sc_ue_profile
    c_l = s * p_g * prof.intercept_linear(True)
    c_n = s * p_g * prof.intercept_linear(False)
    x1 = max(an.nlos_exclusion_radius(params, x), params.sc_ue_height_diff_m)
    plos = lambda u: np.exp(-((u / d_scale) ** 2))
    il = quad(lambda u: u * plos(u) / (1.0 + u ** prof.los_exponent / c_l),
              x, np.inf, limit=400)[0]
    inl = quad(lambda u: u * (1.0 - plos(u)) / (1.0 + u ** prof.nlos_exponent / c_n),
               x1, np.inf, limit=400)[0]
    return np.exp(-2.0 * np.pi * lam * (il + inl))


def test_laplace_edge_cases():
    lam = PAR.active_sc_density
    assert an.laplace_aggregate_interference(PAR, 0.0, 30.0, lam) == 1.0
    assert an.laplace_aggregate_interference(PAR, 1e9, 30.0, 0.0) == 1.0
    out = an.laplace_aggregate_interference(PAR, np.array([0.0, 1e6]), 30.0, lam)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(1.0)


def test_laplace_validation():
    lam = PAR.active_sc_density
    with pytest.raises(ValueError):
        an.laplace_aggregate_interference(PAR, -1.0, 30.0, lam)
    with pytest.raises(ValueError):
        an.laplace_aggregate_interference(PAR, 1.0, 0.0, lam)
    with pytest.raises(ValueError):
        an.laplace_aggregate_interference(PAR, 1.0, 30.0, -lam)


@pytest.mark.parametrize("s", [1e6, 1e9, 1e12])
def test_laplace_matches_quad_oracle(s):
    lam = PAR.active_sc_density
    got = an.laplace_aggregate_interference(PAR, s, 30.0, lam)
    assert got == pytest.approx(_oracle_laplace(PAR, s, 30.0, lam), abs=1e-6)


def test_laplace_matches_quad_oracle_off_defaults():
    lam = PAR.active_sc_density
    for x, mult in ((10.0, 1.0), (60.0, 0.5), (120.0, 2.0)):
        got = an.laplace_aggregate_interference(PAR, 1e10, x, lam * mult)
        assert got == pytest.approx(_oracle_laplace(PAR, 1e10, x, lam * mult), abs=1e-6)


def test_laplace_monotone():
    lam = PAR.active_sc_density
    s = np.array([1e5, 1e6, 1e7, 1e8])
    vals = an.laplace_aggregate_interference(PAR, s, 30.0, lam)
    assert (np.diff(vals) < 0).all()
    denser = an.laplace_aggregate_interference(PAR, 1e6, 30.0, 2.0 * lam)
    assert denser < vals[1]


def test_rate_coverage_behaviour():
    lam = PAR.active_sc_density
    gammas = np.array([1e-3, 0.1, 1.0, 10.0, 100.0])
    cov = an.rate_coverage(PAR, gammas, 30.0, lam)
    assert (np.diff(cov) < 0).all()
    assert cov[0] > 0.97
    assert cov[-1] < 0.1
    # a longer serving link loses both signal and exclusion area
    assert an.rate_coverage(PAR, 1.0, 80.0, lam) < an.rate_coverage(PAR, 1.0, 20.0, lam)


def test_serving_distance_pdf_normalized():
    h = PAR.sc_ue_height_diff_m
    assert an.serving_distance_pdf(PAR, h - 0.5) == 0.0
    total = quad(lambda x: an.serving_distance_pdf(PAR, x), h, 2000.0, limit=400)[0]
    assert total == pytest.approx(1.0, rel=1e-9)


def test_avg_access_rate_alpha_scaling():
    r1 = an.avg_access_rate(PAR, 0.5)
    r2 = an.avg_access_rate(PAR, 0.25)
    assert r1 > 0
    assert r2 == pytest.approx(1.5 * r1, rel=1e-12)
    assert an.avg_access_rate(PAR, 1.0) == 0.0
    with pytest.raises(ValueError):
        an.avg_access_rate(PAR, -0.1)


def test_avg_access_rate_adhoc_beats_random():
    # collocated serving SC (3.5 m) versus a ~100 m nearest-cell draw
    adhoc = dataclasses.replace(PAR, adhoc=True, adhoc_offset_m=0.0)
    assert an.avg_access_rate(adhoc, 0.5) > 2.0 * an.avg_access_rate(PAR, 0.5)


# ---------------------------------------------------------------------------
# sweeps


def test_density_sweep_rows():
    rows = an.density_sweep(PAR, [1.0, 4.0], alpha=0.5)
    assert [r["density_multiplier"] for r in rows] == [1.0, 4.0]
    for r in rows:
        assert set(r) == {"density_multiplier", "activation_probability",
                          "mean_active_sc_per_sector", "avg_backhaul_bps",
                          "avg_access_bps"}
    # denser SC tier: more idle SCs, more active SCs per sector in total,
    # better access, thinner per-SC backhaul
    assert rows[1]["activation_probability"] < rows[0]["activation_probability"]
    assert rows[1]["mean_active_sc_per_sector"] > rows[0]["mean_active_sc_per_sector"]
    assert rows[1]["avg_access_bps"] > rows[0]["avg_access_bps"]
    assert rows[1]["avg_backhaul_bps"] < rows[0]["avg_backhaul_bps"]


def test_adhoc_reference_keys():
    out = an.adhoc_reference(PAR, alpha=0.5)
    assert out["avg_backhaul_bps"] > 0
    assert out["avg_access_bps"] > 0
