"""Run a comparison config and print per-algorithm costs and ratios.

    python scripts/compare_kmeanspp.py [configs/desk_comparison.cfg] [--threads N]
"""

import argparse
from pathlib import Path

from bigreedy.config import load_config
from bigreedy.harness import run_experiment, write_outputs

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default=ROOT / "configs" / "desk_comparison.cfg")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    config = load_config(args.config)
    result = run_experiment(config, threads=args.threads)
    print(f"{'algorithm':<10} {'median':>14} {'min':>14} {'ok':>4}")
    for name, agg in result.aggregates().items():
        print(f"{name:<10} {agg.get('median_cost', float('nan')):>14.6g} {agg.get('min_cost', float('nan')):>14.6g} {agg['successes']:>4}")
    print()
    for name, r in result.ratios().items():
        print(f"{name:<10} median {r['median']:.4f}  min {r['min']:.4f}")
    if config.output:
        out = write_outputs(result, config.base_dir / config.output)
        print(f"\nwrote {out}")
