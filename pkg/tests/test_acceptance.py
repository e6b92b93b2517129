"""Acceptance checks for the full simulator and the closed-form model.

Each test covers one release criterion end to end and prints a single
PASS/FAIL line with the measured numbers.  The heavy shared campaigns
(association statistics, the paired-deployment sweep, the direct-access
run) are session fixtures so several criteria can read one run.

Scale note: runs use the 7-site wraparound layout, which is statistically
equivalent to the 19-site reference per sector; drop counts follow the
stated budgets.
"""

from pathlib import Path

import numpy as np
import pytest

from conftest import adhoc_config, desk_config
from sbhsim import analytic as an
from sbhsim import campaign, channel as ch, mimo

ALPHAS = np.linspace(0.0, 1.0, 21)          # 0.05 grid
PAR = an.AnalyticParams()


def _report(num: int, label: str, ok: bool, detail: str) -> None:
    print(f"[criterion {num:02d}] {label}: {'PASS' if ok else 'FAIL'} ({detail})")


# ---------------------------------------------------------------------------
# shared campaigns


@pytest.fixture(scope="session")
def assoc_counts():
    """Pooled (n_sc, n_active, n_ue) at 1000 drops per density ratio."""
    out = {}
    for ratio in (0.25, 1.0, 4.0):
        cfg = desk_config(deployment__mean_ue_per_sector=16.0 * ratio, n_drops=1000)
        runs = campaign.run_association_campaign(cfg)
        out[ratio] = (sum(d["n_sc"] for d in runs),
                      sum(d["n_active"] for d in runs),
                      sum(d["n_ue"] for d in runs))
    return out


@pytest.fixture(scope="session")
def adhoc_campaign():
    """200 drops of the paired deployment at zero offset (yagi access)."""
    return campaign.run_sbh_campaign(adhoc_config(n_drops=200))


@pytest.fixture(scope="session")
def da_campaign():
    """200 direct-access drops, both pilot schemes on one realization."""
    return campaign.run_da_campaign(desk_config(n_drops=200),
                                    schemes=("reuse1", "reuse3"))


def _percentile_curve(camp, pct: float) -> np.ndarray:
    return np.array([campaign.nearest_rank_percentile(
        camp.stream("e2e", alpha=float(a)).pooled, pct) for a in ALPHAS])


# ---------------------------------------------------------------------------
# criteria


def test_criterion_01_zero_forcing_isolation():
    """Perfect CSI: intra-sector leakage at least 120 dB below the signal
    in at least 99.9% of streams (64 antennas, 16 streams)."""
    rng = np.random.default_rng(11)
    p_dl = mimo.dbm_to_watts(46.0)
    ratios_db = []
    for _ in range(300):
        h = (rng.standard_normal((64, 16))
             + 1j * rng.standard_normal((64, 16))) / np.sqrt(2.0)
        pre = mimo.zf_precode(h, p_dl)
        res = mimo.downlink_sinr(h.T[None], [(pre, np.arange(16))], noise_w=1e-15)
        with np.errstate(divide="ignore"):
            ratios_db.append(10.0 * np.log10(res.signal_w / res.intra_w))
    ratios_db = np.concatenate(ratios_db)
    frac = float(np.mean(ratios_db >= 120.0))
    ok = frac >= 0.999
    _report(1, "zero-forcing stream isolation", ok,
            f"{frac:.2%} of {ratios_db.size} streams >= 120 dB")
    assert ok, f"only {frac:.2%} of streams reached 120 dB isolation"


def test_criterion_02_power_conservation(monkeypatch):
    """Radiated stream powers sum to the sector budget (1e-9 relative) in
    every precode of every sector of every drop, both architectures."""
    real = mimo.zf_precode
    rel_err = []

    def recording(h_hat, total_power_w, *args, **kwargs):
        res = real(h_hat, total_power_w, *args, **kwargs)
        if res.stream_power_w.size:
            rel_err.append(abs(res.stream_power_w.sum() - total_power_w)
                           / total_power_w)
        return res

    monkeypatch.setattr(mimo, "zf_precode", recording)
    campaign.run_sbh_campaign(desk_config(n_drops=4))
    campaign.run_da_campaign(desk_config(n_drops=2), schemes=("reuse1",))
    worst = max(rel_err)
    ok = worst <= 1e-9 and len(rel_err) > 0
    _report(2, "sector power conservation", ok,
            f"max |sum(rho) - P|/P = {worst:.2e} over {len(rel_err)} precodes")
    assert ok, f"power budget violated: {worst:.2e}"


def test_criterion_03_activation_probability(assoc_counts):
    """Empirical small-cell activation within 0.03 of the closed form at
    UE/SC density ratios 0.25, 1, and 4 (1000 drops each)."""
    details, diffs = [], []
    for ratio, (n_sc, n_active, _) in assoc_counts.items():
        emp = n_active / n_sc
        ana = float(an.activation_probability(ratio))
        diffs.append(abs(emp - ana))
        details.append(f"x={ratio:g}: |{emp:.4f} - {ana:.4f}| = {diffs[-1]:.4f}")
    ok = all(d <= 0.03 for d in diffs)
    _report(3, "activation probability", ok, "; ".join(details))
    assert ok, "activation gap exceeds 0.03: " + "; ".join(details)


def test_criterion_04_mean_load_per_active_cell(assoc_counts):
    """Mean UEs per active small cell within 5% of ratio/activation at
    density ratios 1 and 4 (same 1000-drop run)."""
    details, rels = [], []
    for ratio in (1.0, 4.0):
        _, n_active, n_ue = assoc_counts[ratio]
        emp = n_ue / n_active
        ana = float(an.mean_ues_per_active_sc(ratio))
        rels.append(abs(emp - ana) / ana)
        details.append(f"x={ratio:g}: {emp:.4f} vs {ana:.4f} ({rels[-1]:.2%})")
    ok = all(r <= 0.05 for r in rels)
    _report(4, "mean load per active cell", ok, "; ".join(details))
    assert ok, "load gap exceeds 5%: " + "; ".join(details)


def _mc_rate_coverage(gammas, serving_m: float, density: float, n_reps: int,
                      r_max: float, seed: int, chunk: int = 2000) -> np.ndarray:
    """Brute-force Poisson-field coverage: direct interferer sampling.

    Mirrors the analytic field construction: LoS interferers no closer
    than the serving distance, NLoS ones no closer than the pathgain
    crossover, Gaussian-tail LoS thinning, exponential fades everywhere.
    """
    prof = PAR.sc_ue_profile
    p_g = PAR.sc_power_w * 10.0 ** (PAR.sc_access_gain_dbi / 10.0)
    a_l, a_nl = prof.intercept_linear(True), prof.intercept_linear(False)
    eta_l, eta_nl = prof.los_exponent, prof.nlos_exponent
    u_lo_nl = max(an.nlos_exclusion_radius(PAR, serving_m), PAR.sc_ue_height_diff_m)
    r_min = min(serving_m, u_lo_nl)
    area = np.pi * (r_max ** 2 - r_min ** 2)
    s_mean = p_g * a_l * serving_m ** (-eta_l)

    rng = np.random.default_rng(seed)
    hits = np.zeros(len(gammas))
    done = 0
    while done < n_reps:
        c = min(chunk, n_reps - done)
        counts = rng.poisson(density * area, size=c)
        kmax = int(counts.max())
        u = np.sqrt(r_min ** 2 + rng.random((c, kmax)) * (r_max ** 2 - r_min ** 2))
        valid = np.arange(kmax)[None, :] < counts[:, None]
        is_los = rng.random((c, kmax)) < np.exp(-((u / PAR.los_decay_scale_m) ** 2))
        keep = valid & np.where(is_los, u >= serving_m, u >= u_lo_nl)
        power = p_g * np.where(is_los, a_l * u ** (-eta_l), a_nl * u ** (-eta_nl))
        i_tot = np.sum(power * rng.exponential(size=(c, kmax)) * keep, axis=1)
        s = s_mean * rng.exponential(size=c)
        for k, g in enumerate(gammas):
            hits[k] += np.count_nonzero(s > g * i_tot)
        done += c
    return hits / n_reps


def test_criterion_05_rate_coverage_vs_monte_carlo():
    """Interference-transform coverage within 0.02 of a brute-force
    Poisson-field Monte Carlo (1e5 realizations) on a 3x3 grid of SIR
    thresholds and interferer densities."""
    gammas = (0.1, 1.0, 10.0)
    serving_m, r_max, tol = 30.0, 1500.0, 0.02
    prof = PAR.sc_ue_profile
    p_g = PAR.sc_power_w * 10.0 ** (PAR.sc_access_gain_dbi / 10.0)
    mean_rx = p_g * prof.intercept_linear(True) * serving_m ** (-prof.los_exponent)

    details, diffs = [], []
    for mult in (0.5, 1.0, 2.0):
        density = PAR.active_sc_density * mult
        # truncation must be negligible next to the band: bound the field
        # mass beyond r_max at the largest transform argument
        s_worst = max(gammas) / mean_rx
        tail_nlos = (2.0 * np.pi * density * s_worst * p_g
                     * prof.intercept_linear(False)
                     * r_max ** (2.0 - prof.nlos_exponent)
                     / (prof.nlos_exponent - 2.0))
        tail_los = (np.pi * density * PAR.los_decay_scale_m ** 2
                    * np.exp(-((r_max / PAR.los_decay_scale_m) ** 2)))
        assert tail_nlos + tail_los < tol / 10.0

        emp = _mc_rate_coverage(gammas, serving_m, density, 100_000,
                                r_max, seed=1000 + int(10 * mult))
        ana = np.array([an.rate_coverage(PAR, g, serving_m, density)
                        for g in gammas])
        for g, e, a in zip(gammas, emp, ana):
            diffs.append(abs(e - a))
            details.append(f"{mult:g}x/g={g:g}: {abs(e - a):.4f}")
    ok = all(d <= tol for d in diffs)
    _report(5, "coverage vs brute-force field", ok,
            f"max diff {max(diffs):.4f} over 9 points")
    assert ok, "coverage mismatch: " + "; ".join(details)


def test_criterion_06_time_split_sweep_structure(adhoc_campaign):
    """End-to-end rate is zero at both split endpoints, peaks strictly
    inside, the cell-edge optimum does not precede the median optimum,
    and both optima land within 0.1 of 0.85 and 0.75 (0.05 grid)."""
    p5 = _percentile_curve(adhoc_campaign, 5)
    p50 = _percentile_curve(adhoc_campaign, 50)
    i5, i50 = int(np.argmax(p5)), int(np.argmax(p50))
    a5, a50 = float(ALPHAS[i5]), float(ALPHAS[i50])

    ends_zero = p5[0] == 0.0 and p5[-1] == 0.0 and p50[0] == 0.0 and p50[-1] == 0.0
    interior = 0 < i5 < len(ALPHAS) - 1 and 0 < i50 < len(ALPHAS) - 1
    ordered = a5 >= a50
    banded = abs(a5 - 0.85) <= 0.1 + 1e-9 and abs(a50 - 0.75) <= 0.1 + 1e-9
    ok = ends_zero and interior and ordered and banded
    _report(6, "time-split sweep structure", ok,
            f"a*(p5)={a5:.2f}, a*(p50)={a50:.2f}, endpoints "
            f"({p5[0]:g}, {p5[-1]:g}) bps")
    assert ends_zero, "endpoint rates must be exactly zero"
    assert interior, "maximizer must be interior"
    assert ordered, f"a*(p5)={a5} < a*(p50)={a50}"
    assert banded, f"optima ({a5}, {a50}) outside the (0.85, 0.75) +/- 0.1 bands"


def test_criterion_07_architecture_ordering(adhoc_campaign, da_campaign):
    """Cell edge: the backhauled deployment at its optimal split beats
    direct access by 5x (reuse 1) and 15% (reuse 3).  Upper tail: direct
    access with reuse 3 beats the even split."""
    p5 = _percentile_curve(adhoc_campaign, 5)
    a_star = float(ALPHAS[int(np.argmax(p5))])
    sbh5 = float(np.max(p5))
    r1 = da_campaign.stream("reuse1").pooled
    r3 = da_campaign.stream("reuse3").pooled
    r1_5 = campaign.nearest_rank_percentile(r1, 5)
    r3_5 = campaign.nearest_rank_percentile(r3, 5)
    even = adhoc_campaign.stream("e2e", alpha=0.5).pooled

    edge_r1 = sbh5 > 0.0 and sbh5 >= 5.0 * r1_5
    edge_r3 = sbh5 >= 1.15 * r3_5
    tail_pairs = [(p, campaign.nearest_rank_percentile(r3, p),
                   campaign.nearest_rank_percentile(even, p))
                  for p in (75, 85, 95)]
    tail = all(da_v > sbh_v for _, da_v, sbh_v in tail_pairs)
    ok = edge_r1 and edge_r3 and tail
    _report(7, "architecture ordering", ok,
            f"p5: sbh(a*={a_star:.2f})={sbh5 / 1e6:.2f}M vs r1={r1_5 / 1e6:.2f}M, "
            f"r3={r3_5 / 1e6:.2f}M; upper tail "
            + ", ".join(f"p{p}: {d / 1e6:.1f}M>{s / 1e6:.1f}M"
                        for p, d, s in tail_pairs))
    assert edge_r1, f"cell edge: {sbh5:.3g} < 5 * {r1_5:.3g}"
    assert edge_r3, f"cell edge: {sbh5:.3g} < 1.15 * {r3_5:.3g}"
    assert tail, f"upper tail not dominated by reuse 3: {tail_pairs}"


def test_criterion_08_los_statistics_ordering(adhoc_campaign, da_campaign):
    """The paired deployment's joint two-hop LoS probability exceeds the
    direct-access LoS probability, each within 10 points of 47% / 25%."""
    joint = dict(adhoc_campaign.los_rows())["joint_los_fraction"]
    direct = dict(da_campaign.los_rows())["serving_los_fraction"]
    ordered = joint > direct
    banded = abs(joint - 0.47) <= 0.10 and abs(direct - 0.25) <= 0.10
    ok = ordered and banded
    _report(8, "line-of-sight statistics", ok,
            f"joint={joint:.3f} (band 0.47 +/- 0.10), "
            f"direct={direct:.3f} (band 0.25 +/- 0.10)")
    assert ordered, f"joint {joint:.3f} <= direct {direct:.3f}"
    assert banded, f"fractions ({joint:.3f}, {direct:.3f}) outside the bands"


def test_criterion_09_paired_access_los_exact(adhoc_campaign):
    """At zero pairing offset every served access link is line-of-sight,
    and the access LoS curve is exactly 1 at zero ground distance."""
    n_ue = sum(r.ue_access_los.size for r in adhoc_campaign.results)
    all_los = all(bool(np.all(r.ue_access_los)) for r in adhoc_campaign.results)
    curve_one = ch.los_probability(ch.SC_UE_PROFILE, 0.0) == 1.0
    ok = all_los and curve_one and n_ue > 0
    _report(9, "paired access line-of-sight", ok,
            f"{n_ue} links all LoS: {all_los}; curve(0) == 1: {curve_one}")
    assert ok, f"all_los={all_los}, curve_one={curve_one}"


def test_criterion_10_analytic_density_convergence():
    """Random-deployment averages approach the fully paired reference as
    cells densify: backhaul within 90% by 100x, access by 1000x, both
    curves monotone across the sweep."""
    mults = (1, 3, 10, 30, 100, 300, 1000)
    rows = an.density_sweep(PAR, mults, alpha=0.5)
    ref = an.adhoc_reference(PAR, alpha=0.5)
    bh = np.array([r["avg_backhaul_bps"] for r in rows])
    acc = np.array([r["avg_access_bps"] for r in rows])

    bh_mono = bool(np.all(np.diff(bh) <= 0) or np.all(np.diff(bh) >= 0))
    acc_mono = bool(np.all(np.diff(acc) <= 0) or np.all(np.diff(acc) >= 0))
    bh_conv = bh[mults.index(100)] >= 0.9 * ref["avg_backhaul_bps"]
    acc_conv = acc[mults.index(1000)] >= 0.9 * ref["avg_access_bps"]
    ok = bh_mono and acc_mono and bh_conv and acc_conv
    _report(10, "analytic density convergence", ok,
            f"backhaul at 100x: {bh[4] / ref['avg_backhaul_bps']:.3f} of ref, "
            f"access at 1000x: {acc[-1] / ref['avg_access_bps']:.3f} of ref, "
            f"monotone: {bh_mono}/{acc_mono}")
    assert ok, (f"bh_mono={bh_mono}, acc_mono={acc_mono}, "
                f"bh_conv={bh_conv}, acc_conv={acc_conv}")


def test_criterion_11_threaded_determinism(tmp_path: Path):
    """Serial and 8-thread runs of the same seeded campaign write byte
    identical CSV outputs, for both architectures."""
    compared = 0
    for name, cfg in (
        ("sbh", desk_config(n_drops=5)),
        ("da", desk_config(deployment__kind="direct_access", n_drops=3)),
    ):
        serial = tmp_path / f"{name}_serial"
        threaded = tmp_path / f"{name}_threads"
        campaign.campaign_to_files(serial, cfg, threads=1)
        campaign.campaign_to_files(threaded, cfg, threads=8)
        for f in sorted(serial.glob("*.csv")):
            assert f.read_bytes() == (threaded / f.name).read_bytes(), f.name
            compared += 1
    ok = compared >= 7
    _report(11, "threaded determinism", ok,
            f"{compared} CSV files byte-identical across serial/8-thread runs")
    assert ok
