"""Command-line entry points for campaigns, sweeps, and calibration."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytic, campaign
from .channel import SECTOR_PATTERN, vertical_gain_db
from .config import CampaignConfig, load_config


def _parse_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="TOML campaign config (default: packaged baseline)")
    p.add_argument("--drops", type=int, default=None, help="override drop count")
    p.add_argument("--seed", type=int, default=None, help="override master seed")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker processes")


def _load(args) -> CampaignConfig:
    cfg = load_config(args.config)
    if getattr(args, "drops", None) is not None:
        cfg = replace(cfg, n_drops=args.drops)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sbhsim",
        description="Massive-MIMO self-backhaul vs direct access simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("campaign", help="run the configured campaign, write CDFs")
    _add_common(p)

    p = sub.add_parser("sweep-alpha", help="end-to-end rate over a time-split grid")
    _add_common(p)
    p.add_argument("--alphas", type=str, default="0.05:0.95:0.05",
                   help="grid as start:stop:step or comma list")

    p = sub.add_parser("compare", help="self-backhaul vs direct access, paired drops")
    _add_common(p)

    p = sub.add_parser("analytic-sweep", help="closed-form rates vs SC density")
    _add_common(p)
    p.add_argument("--multipliers", type=str, default="1,2,5,10,30,100,300,1000",
                   help="SC density multipliers, comma list")
    p.add_argument("--alpha", type=float, default=None, help="override time split")

    p = sub.add_parser("calibrate-antenna",
                       help="print calibration constants of the analytic model")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--out", type=Path, default=None, help="write JSON here")

    args = parser.parse_args(argv)

    if args.command == "campaign":
        cfg = _load(args)
        summary = campaign.campaign_to_files(args.out, cfg, threads=args.threads)
        print(json.dumps(summary, sort_keys=True))
        return 0

    if args.command == "sweep-alpha":
        cfg = _load(args)
        if ":" in args.alphas:
            start, stop, step = (float(t) for t in args.alphas.split(":"))
            alphas = np.arange(start, stop + step / 2.0, step)
        else:
            alphas = _parse_list(args.alphas)
        rows = campaign.alpha_sweep(cfg, alphas, threads=args.threads, out_dir=args.out)
        best = max(rows, key=lambda r: r["p50_bps"])
        print(json.dumps({"best_alpha_median": best["alpha"]}, sort_keys=True))
        return 0

    if args.command == "compare":
        cfg = _load(args)
        streams = campaign.compare_architectures(cfg, threads=args.threads,
                                                 out_dir=args.out)
        print(json.dumps({name: st.percentile(50.0) for name, st in streams.items()},
                         sort_keys=True))
        return 0

    if args.command == "analytic-sweep":
        cfg = _load(args)
        rows = campaign.analytic_sweep(cfg, _parse_list(args.multipliers),
                                       alpha=args.alpha, out_dir=args.out)
        print(json.dumps(rows[-1], sort_keys=True))
        return 0

    if args.command == "calibrate-antenna":
        cfg = load_config(args.config)
        params = cfg.analytic_params()
        fitted = analytic.fit_los_decay_scale()
        # ground distance where the downtilted sector beam peaks
        hd = params.bs_sc_height_diff_m
        peak = hd / np.tan(np.radians(SECTOR_PATTERN.downtilt_deg))
        payload = {
            "mean_horizontal_gain_linear": analytic._mean_horizontal_gain(SECTOR_PATTERN),
            "beam_peak_ground_distance_m": float(peak),
            "vertical_gain_at_peak_db": float(vertical_gain_db(
                SECTOR_PATTERN, np.hypot(peak, hd), hd)),
            "access_los_decay_scale_m": fitted,
            "configured_los_decay_scale_m": cfg.los_decay_scale_m,
        }
        text = json.dumps(payload, indent=2, sort_keys=True)
        if args.out is not None:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(text + "\n")
        print(text)
        return 0

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
