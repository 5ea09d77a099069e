#!/usr/bin/env python3
"""Magnetisation staircase of the dipolar triangular Ising antiferromagnet.

    python3 scripts/triangular_staircase.py --max-sites 12
    python3 scripts/triangular_staircase.py --max-sites 36 --sampler simulatedAnnealing

The exhaustive sampler is exact but limited to cells of at most 28 sites.
"""

import argparse
import logging
from pathlib import Path

from ucbos.cells import enumerate_cells, make_cell
from ucbos.driver import sweep_staircase
from ucbos.lattice import make_triangular
from ucbos.render import render_pattern
from ucbos.samplers import SamplerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--alpha", type=float, default=3.0)
    ap.add_argument("--max-sites", type=int, default=12)
    ap.add_argument("--range", type=int, default=6)
    ap.add_argument("--step", type=float, default=1e-2)
    ap.add_argument("--sampler", default="exhaustive")
    ap.add_argument("--num-reads", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/triangular")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    lattice = make_triangular()
    cells = enumerate_cells(lattice, args.range, args.max_sites)
    sampler = SamplerConfig(args.sampler, num_reads=args.num_reads, seed=args.seed)
    logging.info("%d cells with up to %d sites", len(cells), args.max_sites)
    report = sweep_staircase(lattice, cells, args.alpha, 1.0, None, sampler)
    out = report.write(args.out)

    for m, lo, hi, n in report.plateaus():
        if m >= 0:
            logging.info("m = %-6s  h/J in [%7.2f, %7.2f]  %4d points", m, lo, hi, n)
    logging.info("couplings %.1f s, sampling %.1f s", report.timings["couplings_s"], report.timings["sampling_s"])

    # one pattern per positive-m plateau, from the first point of each plateau
    seen = set()
    for p in report.points:
        if p.magnetization_fraction in seen or p.magnetization_fraction < 0:
            continue
        seen.add(p.magnetization_fraction)
        svg = render_pattern(lattice, make_cell(lattice, p.cell_coeffs), p.winning_config, (3, 3),
                             title=f"m = {p.magnetization_fraction}, h/J = {p.h:g}")
        name = str(p.magnetization_fraction).replace("/", "_")
        (Path(out) / f"pattern_m{name}.svg").write_text(svg)
    logging.info("wrote %s", out)


if __name__ == "__main__":
    main()
