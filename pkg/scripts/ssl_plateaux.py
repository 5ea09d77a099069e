#!/usr/bin/env python3
"""Magnetisation plateaux of the Shastry-Sutherland lattice with a dipolar tail.

    python3 scripts/ssl_plateaux.py configs/ssl_illustrative.yaml

Default amplitudes are illustrative only.
"""

import argparse
import logging

from ucbos.config import load_config
from ucbos.driver import sweep_staircase


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config", nargs="?", default="configs/ssl_illustrative.yaml")
    ap.add_argument("--out")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config)
    lattice = cfg.build_lattice()
    cells = cfg.build_cells(lattice)
    logging.info("bond classes: %s", {k: round(v, 6) for k, v in lattice.bond_classes.items()})
    report = sweep_staircase(lattice, cells, cfg.alpha, cfg.J, cfg.h_grid, cfg.sampler, cfg.tol,
                             cfg.include_long_range, run_config=cfg.to_dict())
    report.write(args.out or cfg.output_dir)
    for m, lo, hi, n in report.plateaus():
        if m >= 0:
            logging.info("m = %-6s  h in [%6.2f, %6.2f]  %4d points", m, lo, hi, n)


if __name__ == "__main__":
    main()
