#!/usr/bin/env python3
"""How often does annealing find the 12-site Kagome state on larger cells?

For every cell of --size sites that contains one of the degenerate 12-site
ground-state cells as a sublattice, record the fraction of annealing reads
reaching the 12-site energy per site.
"""

import argparse
import logging

from ucbos.cells import enumerate_cells, is_sublattice
from ucbos.lattice import make_kagome
from ucbos.model import build_problem
from ucbos.samplers import SamplerConfig, solve_exhaustive, solve_simulated_annealing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=36)
    ap.add_argument("--num-reads", type=int, default=1000)
    ap.add_argument("--sweeps", type=int, nargs="+", default=[1000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    lattice = make_kagome()
    twelve = [(c, solve_exhaustive(build_problem(lattice, c, 3.0)).min_energy / 12)
              for c in enumerate_cells(lattice, 6, 12) if c.K == 12]
    best = min(e for _, e in twelve)
    winners = [c for c, e in twelve if e <= best + 1e-9]
    candidates = [c for c in enumerate_cells(lattice, 6, args.size)
                  if c.K == args.size and any(is_sublattice(w.coeffs, c.coeffs) for w in winners)]
    logging.info("12-site energy per site %.12f; %d cells of %d sites", best, len(candidates), args.size)

    for sweeps in args.sweeps:
        cfg = SamplerConfig(num_reads=args.num_reads, sweeps=sweeps, seed=args.seed)
        total = 0
        for cell in candidates:
            ss = solve_simulated_annealing(build_problem(lattice, cell, 3.0), cfg)
            ok = sum(s.occurrences for s in ss.samples if s.energy / cell.K <= best + 1e-9)
            total += ok
            logging.info("  sweeps %5d  cell %-10s success %.3f  best E/site %.12f", sweeps, cell.key,
                         ok / args.num_reads, ss.min_energy / cell.K)
        logging.info("sweeps %d: overall success fraction %.4f", sweeps, total / (args.num_reads * len(candidates)))


if __name__ == "__main__":
    main()
