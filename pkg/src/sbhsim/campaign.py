"""Campaign driver: many drops, pooled statistics, CSV outputs.

Drops are embarrassingly parallel and keyed by index, so a campaign run
with any worker count aggregates results in drop order and produces byte
identical output files.  All rates are pooled over the statistics site's
UEs across drops; confidence intervals bootstrap whole drops, the unit of
independence.
"""

from __future__ import annotations

import json
import subprocess
import time
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import analytic, drop, scenario
from .config import CampaignConfig, config_hash, config_to_dict
from .rng import substream

PERCENTILES = (5.0, 25.0, 50.0, 75.0, 95.0)
N_BOOTSTRAP = 200

_WORKER: dict = {}


def _init_worker(layout, cfg, schemes):
    _WORKER["layout"] = layout
    _WORKER["cfg"] = cfg
    _WORKER["schemes"] = schemes


def _sbh_worker(i: int):
    return drop.run_sbh_drop(_WORKER["layout"], _WORKER["cfg"], i)


def _da_worker(i: int):
    return drop.run_da_drop(_WORKER["layout"], _WORKER["cfg"], i, _WORKER["schemes"])


def _assoc_worker(i: int):
    return drop.association_stats(_WORKER["layout"], _WORKER["cfg"], i)


def _map_drops(worker, layout, cfg, n_drops: int, threads: int, schemes=()):
    if threads <= 1:
        _init_worker(layout, cfg, schemes)
        return [worker(i) for i in range(n_drops)]
    with Pool(threads, initializer=_init_worker,
              initargs=(layout, cfg, schemes)) as pool:
        return pool.map(worker, range(n_drops))


def build_layout_for(cfg: CampaignConfig) -> scenario.NetworkLayout:
    return scenario.build_layout(cfg.layout.isd_m, cfg.layout.n_sites,
                                 bs_height_m=cfg.layout.bs_height_m,
                                 sc_height_m=cfg.layout.sc_height_m,
                                 ue_height_m=cfg.layout.ue_height_m)


# ---------------------------------------------------------------------------
# pooled statistics


def nearest_rank_percentile(samples: np.ndarray, pct: float) -> float:
    """Classic nearest-rank percentile (no interpolation)."""
    s = np.sort(np.asarray(samples, dtype=float))
    if s.size == 0:
        return float("nan")
    rank = int(np.ceil(pct / 100.0 * s.size))
    return float(s[max(rank, 1) - 1])


def bootstrap_percentile_ci(per_drop: list[np.ndarray], pct: float,
                            master_seed: int, n_boot: int = N_BOOTSTRAP) -> tuple[float, float]:
    """Drop-level bootstrap CI of a pooled percentile."""
    rng = substream(master_seed, "bootstrap")
    n = len(per_drop)
    if n == 0:
        return float("nan"), float("nan")
    reps = np.empty(n_boot)
    for b in range(n_boot):
        pick = rng.integers(0, n, size=n)
        pooled = np.concatenate([per_drop[i] for i in pick]) if n else np.zeros(0)
        reps[b] = nearest_rank_percentile(pooled, pct)
    return float(np.quantile(reps, 0.025)), float(np.quantile(reps, 0.975))


@dataclass
class StreamStats:
    """One rate population (e.g. end-to-end) pooled over drops."""
    name: str
    per_drop: list[np.ndarray] = field(default_factory=list)

    @property
    def pooled(self) -> np.ndarray:
        if not self.per_drop:
            return np.zeros(0)
        return np.concatenate(self.per_drop)

    def percentile(self, pct: float) -> float:
        return nearest_rank_percentile(self.pooled, pct)

    def mean(self) -> float:
        pooled = self.pooled
        return float(pooled.mean()) if pooled.size else float("nan")


# ---------------------------------------------------------------------------
# file writers (repr formatting keeps runs byte-comparable)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_cdf_csv(path: Path, samples: np.ndarray) -> None:
    s = np.sort(np.asarray(samples, dtype=float))
    rows = [(float(v), float((i + 1) / s.size)) for i, v in enumerate(s)]
    write_csv(path, ["rate_bps", "cdf"], rows)


def _git_rev() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True,
                             text=True, timeout=10, cwd=Path(__file__).parent)
        return out.stdout.strip() if out.returncode == 0 else "unknown"
    except OSError:
        return "unknown"


def write_manifest(path: Path, cfg: CampaignConfig, started: float,
                   extra: dict | None = None) -> None:
    payload = {
        "config": config_to_dict(cfg),
        "config_sha256": config_hash(cfg),
        "master_seed": cfg.master_seed,
        "git_rev": _git_rev(),
        "wall_seconds": round(time.time() - started, 3),
    }
    if extra:
        payload.update(extra)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class SbhCampaign:
    cfg: CampaignConfig
    results: list[drop.SbhDropResult]

    def stream(self, name: str, alpha: float | None = None) -> StreamStats:
        a = self.cfg.alpha if alpha is None else alpha
        if name == "e2e":
            data = [r.e2e_bps(a) for r in self.results]
        elif name == "access":
            data = [(1.0 - a) * r.ue_access_bps for r in self.results]
        elif name == "backhaul":
            data = [a * r.sc_backhaul_bps for r in self.results]
        else:
            raise ValueError(f"unknown stream {name!r}")
        return StreamStats(name, data)

    def los_rows(self) -> list[tuple]:
        acc = np.concatenate([r.ue_access_los for r in self.results])
        bh = np.concatenate([r.ue_backhaul_los for r in self.results])
        joint = acc & bh
        n = acc.size
        return [("access_los_fraction", float(acc.mean()) if n else float("nan")),
                ("backhaul_los_fraction", float(bh.mean()) if n else float("nan")),
                ("joint_los_fraction", float(joint.mean()) if n else float("nan")),
                ("n_ue", n)]

    def load_rows(self) -> list[tuple]:
        n_sc = sum(r.n_sc_central for r in self.results)
        n_act = sum(r.n_active_central for r in self.results)
        loads = np.concatenate([r.ue_load for r in self.results])
        return [("n_sc", n_sc), ("n_active_sc", n_act),
                ("activation_fraction", n_act / n_sc if n_sc else float("nan")),
                ("mean_ue_load", float(loads.mean()) if loads.size else float("nan")),
                ("n_ue", int(loads.size))]


def run_sbh_campaign(cfg: CampaignConfig, threads: int = 1) -> SbhCampaign:
    layout = build_layout_for(cfg)
    results = _map_drops(_sbh_worker, layout, cfg, cfg.n_drops, threads)
    return SbhCampaign(cfg, results)


@dataclass
class DaCampaign:
    cfg: CampaignConfig
    schemes: tuple[str, ...]
    results: list[drop.DaDropResult]

    def stream(self, scheme: str) -> StreamStats:
        return StreamStats(f"da_{scheme}",
                           [r.rates_bps[scheme] for r in self.results])

    def los_rows(self) -> list[tuple]:
        los = np.concatenate([r.ue_los for r in self.results])
        return [("serving_los_fraction", float(los.mean()) if los.size else float("nan")),
                ("n_ue", int(los.size))]


def run_da_campaign(cfg: CampaignConfig, threads: int = 1,
                    schemes: tuple[str, ...] = ("reuse1",)) -> DaCampaign:
    layout = build_layout_for(cfg)
    da_cfg = replace(cfg, deployment=replace(cfg.deployment, kind="direct_access"))
    results = _map_drops(_da_worker, layout, da_cfg, cfg.n_drops, threads, schemes)
    return DaCampaign(cfg, schemes, results)


def run_association_campaign(cfg: CampaignConfig, threads: int = 1) -> list[dict]:
    layout = build_layout_for(cfg)
    return _map_drops(_assoc_worker, layout, cfg, cfg.n_drops, threads)


def campaign_to_files(out_dir: Path, cfg: CampaignConfig, threads: int = 1) -> dict:
    """Full campaign of the configured kind; writes the standard file set."""
    out_dir = Path(out_dir)
    started = time.time()
    summary: dict = {}
    if cfg.deployment.kind == "direct_access":
        schemes = (cfg.radio.da_pilot_scheme,)
        camp = run_da_campaign(cfg, threads, schemes)
        stream = camp.stream(schemes[0])
        write_cdf_csv(out_dir / "cdf_da.csv", stream.pooled)
        rows = []
        for pct in PERCENTILES:
            lo, hi = bootstrap_percentile_ci(stream.per_drop, pct, cfg.master_seed)
            rows.append((stream.name, pct, stream.percentile(pct), lo, hi))
        write_csv(out_dir / "percentiles.csv",
                  ["stream", "percentile", "rate_bps", "ci_lo", "ci_hi"], rows)
        write_csv(out_dir / "los_stats.csv", ["metric", "value"], camp.los_rows())
        summary["da_mean_bps"] = stream.mean()
    else:
        camp = run_sbh_campaign(cfg, threads)
        streams = [camp.stream(n) for n in ("backhaul", "access", "e2e")]
        for st in streams:
            write_cdf_csv(out_dir / f"cdf_{st.name}.csv", st.pooled)
        rows = []
        for st in streams:
            for pct in PERCENTILES:
                lo, hi = bootstrap_percentile_ci(st.per_drop, pct, cfg.master_seed)
                rows.append((st.name, pct, st.percentile(pct), lo, hi))
        write_csv(out_dir / "percentiles.csv",
                  ["stream", "percentile", "rate_bps", "ci_lo", "ci_hi"], rows)
        write_csv(out_dir / "los_stats.csv", ["metric", "value"], camp.los_rows())
        write_csv(out_dir / "load_stats.csv", ["metric", "value"], camp.load_rows())
        summary["e2e_mean_bps"] = streams[2].mean()
    write_manifest(out_dir / "manifest.json", cfg, started, summary)
    return summary


def alpha_sweep(cfg: CampaignConfig, alphas, threads: int = 1,
                out_dir: Path | None = None) -> list[dict]:
    """End-to-end statistics on an alpha grid from one set of drops.

    The SINRs do not depend on alpha, so one campaign feeds every grid
    point (common random numbers: the curves differ only through alpha).
    """
    started = time.time()
    camp = run_sbh_campaign(cfg, threads)
    rows = []
    for a in alphas:
        st = camp.stream("e2e", alpha=float(a))
        row = {"alpha": float(a), "mean_bps": st.mean()}
        for pct in PERCENTILES:
            row[f"p{pct:g}_bps"] = st.percentile(pct)
        rows.append(row)
    if out_dir is not None:
        out_dir = Path(out_dir)
        header = list(rows[0].keys())
        write_csv(out_dir / "alpha_sweep.csv", header,
                  [tuple(r[k] for k in header) for r in rows])
        write_manifest(out_dir / "manifest.json", cfg, started,
                       {"alphas": [float(a) for a in alphas]})
    return rows


def compare_architectures(cfg: CampaignConfig, threads: int = 1,
                          out_dir: Path | None = None) -> dict[str, StreamStats]:
    """Self-backhaul vs direct access on shared UE position streams."""
    started = time.time()
    streams: dict[str, StreamStats] = {}
    sbh_cfg = replace(cfg, deployment=replace(cfg.deployment, kind=cfg.deployment.kind
                      if cfg.deployment.kind != "direct_access" else "sbh_random"))
    camp = run_sbh_campaign(sbh_cfg, threads)
    streams["sbh_e2e"] = camp.stream("e2e")
    da = run_da_campaign(cfg, threads, ("reuse1", "reuse3"))
    streams["da_reuse1"] = da.stream("reuse1")
    streams["da_reuse3"] = da.stream("reuse3")
    if out_dir is not None:
        out_dir = Path(out_dir)
        for name, st in streams.items():
            write_cdf_csv(out_dir / f"cdf_{name}.csv", st.pooled)
        rows = []
        for name, st in streams.items():
            for pct in PERCENTILES:
                rows.append((name, pct, st.percentile(pct)))
        write_csv(out_dir / "percentiles.csv",
                  ["stream", "percentile", "rate_bps"], rows)
        write_manifest(out_dir / "manifest.json", cfg, started)
    return streams


def analytic_sweep(cfg: CampaignConfig, multipliers, alpha: float | None = None,
                   out_dir: Path | None = None) -> list[dict]:
    """Closed-form density sweep, plus the fully planned reference point."""
    started = time.time()
    params = cfg.analytic_params()
    a = cfg.alpha if alpha is None else float(alpha)
    rows = analytic.density_sweep(params, multipliers, a)
    ref = analytic.adhoc_reference(params, a)
    if out_dir is not None:
        out_dir = Path(out_dir)
        header = list(rows[0].keys())
        write_csv(out_dir / "analytic_sweep.csv", header,
                  [tuple(r[k] for k in header) for r in rows])
        write_manifest(out_dir / "manifest.json", cfg, started,
                       {"reference": ref})
    return rows + [{"density_multiplier": float("inf"), **ref}]
