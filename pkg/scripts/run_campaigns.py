#!/usr/bin/env python3
"""
Script to run every simulation campaign with its default configuration.
Writes one CSV per campaign into the output directory.
"""
import argparse
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from hypersync.cli import COMMANDS, cmd_validate, load_config
from hypersync.exceptions import HypersyncError
from hypersync.settings import settings
from hypersync.utils import get_logger

logger = get_logger(__name__)

# Campaign name -> (command, overrides)
CAMPAIGNS = {
    "uncontrolled_map": ("sweep", ["mode=none"]),
    "full_control_map": ("sweep", ["mode=full"]),
    "pairwise_control_map": ("sweep", ["mode=pairwise_only"]),
    "switch": ("switch", ["k1=0.05", "k2=0.05", "k2_after=1", "t_switch=15"]),
    "pinning": ("pin", ["mode=full", "pin_couplings=1/1"]),
    "basins_weak": ("basin", ["k1=1", "k2=0.2", "omega_high=0"]),
    "basins_strong": ("basin", ["k1=1", "k2=2", "omega_high=0"]),
    "cost": ("cost", ["k1=1", "k2=1", "replicates=20"]),
    "random_sc_map": (
        "sweep",
        ["topology=random_sc", "mode=none", "k1_values=0:10:11", "k2_values=0:100:11"],
    ),
    "smoke_n100": ("trajectory", ["n=100", "k1=1", "k2=1", "t_end=10", "r_hat_t0=5"]),
}


def run_campaign(name: str, out_dir: Path, seed: int, workers: int, replicates: int) -> bool:
    """Run one campaign into out_dir/name."""

    command, overrides = CAMPAIGNS[name]
    logger.info("=" * 60)
    logger.info(f"CAMPAIGN {name.upper()} ({command})")
    logger.info("=" * 60)

    overrides = [f"replicates={replicates}"] + overrides
    try:
        cfg = load_config(None, overrides, seed, workers, out_dir / name)
        COMMANDS[command](cfg, True)
        logger.info(f"Campaign {name} finished, results in {cfg.out}")
        return True
    except HypersyncError as e:
        logger.error(f"Campaign {name} failed: {e}")
        return False


def main():
    """Main execution."""

    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("campaigns", nargs="*", help=f"subset of: {', '.join(CAMPAIGNS)}")
    parser.add_argument("--out", type=Path, default=settings.OUTPUT_DIR)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=settings.WORKERS)
    parser.add_argument("--replicates", type=int, default=settings.DEFAULT_REPLICATES)
    args = parser.parse_args()
    unknown = [name for name in args.campaigns if name not in CAMPAIGNS]
    if unknown:
        parser.error(f"unknown campaigns: {', '.join(unknown)}")

    logger.info("Running self-checks before the campaigns")
    if cmd_validate() != 0:
        logger.error("\nSelf-checks failed. Fix them before running campaigns.")
        return 1

    names = args.campaigns or list(CAMPAIGNS)
    failed = [
        name for name in names
        if not run_campaign(name, args.out, args.seed, args.workers, args.replicates)
    ]

    if not failed:
        logger.info("\n" + "=" * 60)
        logger.info("ALL CAMPAIGNS COMPLETE")
        logger.info("=" * 60)
        logger.info(f"Results in {args.out}")
        return 0
    else:
        logger.error(f"\nFailed campaigns: {', '.join(failed)}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
