"""Command-line entry point: ``ucbos {cells,solve,staircase,render,export,respond}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import threading
from pathlib import Path

from .cells import make_cell
from .config import RunConfig, load_config
from .driver import ground_state_at_field, prepare_models, sweep_staircase
from .exchange import check_capacity, serve
from .model import to_document
from .render import render_pattern


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.lattice:
        cfg.lattice = {"name": args.lattice}
    for name in ("alpha", "max_sites", "range"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "h", None) is not None:
        cfg.h = args.h
    if getattr(args, "output", None):
        cfg.output_dir = args.output
    return cfg


def cmd_cells(args) -> int:
    cfg = _config(args)
    lattice = cfg.build_lattice()
    cells = cfg.build_cells(lattice)
    print("key\tK\tT1\tT2")
    for c in cells:
        print(f"{c.key}\t{c.K}\t({c.T1[0]:.6g}, {c.T1[1]:.6g})\t({c.T2[0]:.6g}, {c.T2[1]:.6g})")
    print(f"# {len(cells)} cells", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    cfg = _config(args)
    lattice = cfg.build_lattice()
    cells = cfg.build_cells(lattice)
    point = ground_state_at_field(lattice, cells, cfg.alpha, cfg.J, cfg.h, cfg.sampler, cfg.tol, cfg.include_long_range)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = {
        "h": point.h, "energyPerSite": point.best_energy_per_site, "magnetization": str(point.magnetization_fraction),
        "cell": [list(r) for r in point.cell_coeffs], "K": point.K, "spins": list(point.winning_config),
        "runConfig": cfg.to_dict(),
    }
    (out / "ground_state.json").write_text(json.dumps(result, indent=1, default=str))
    print(f"h={point.h:g}  E/site={point.best_energy_per_site:.15g}  m={point.magnetization_fraction}  "
          f"cell={point.cell_key} K={point.K}")
    return 0


def cmd_staircase(args) -> int:
    cfg = _config(args)
    lattice = cfg.build_lattice()
    cells = cfg.build_cells(lattice)
    report = sweep_staircase(lattice, cells, cfg.alpha, cfg.J, cfg.h_grid, cfg.sampler, cfg.tol,
                             cfg.include_long_range, run_config=cfg.to_dict())
    out = report.write(cfg.output_dir)
    for m, lo, hi, n in report.plateaus():
        print(f"m={str(m):>6}  h in [{lo:g}, {hi:g}]  ({n} points)")
    print(f"wrote {out}/staircase.csv", file=sys.stderr)
    return 0


def cmd_render(args) -> int:
    cfg = _config(args)
    lattice = cfg.build_lattice()
    if args.configurations:
        entries = json.loads(Path(args.configurations).read_text())
        if isinstance(entries, dict):
            entries = [entries]
        entry = entries[args.index]
        coeffs, spins = entry["cell"], entry["spins"]
    else:
        if not (args.cell and args.spins):
            raise SystemExit("render needs --configurations FILE or both --cell and --spins")
        coeffs = [[int(v) for v in args.cell.split(":")[:2]], [int(v) for v in args.cell.split(":")[2:]]]
        spins = [1 if ch == "+" else -1 for ch in args.spins if ch in "+-"]
    cell = make_cell(lattice, coeffs)
    svg = render_pattern(lattice, cell, spins, tuple(args.tiling), title=f"{lattice.name} cell {cell.key}")
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")
    return 0


def cmd_export(args) -> int:
    cfg = _config(args)
    lattice = cfg.build_lattice()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    models = prepare_models(lattice, cfg.build_cells(lattice), cfg.alpha, cfg.J, cfg.tol, cfg.include_long_range)
    for model in models:
        problem = model.at_field(cfg.h)
        check_capacity(problem, cfg.sampler.profile)
        doc = to_document(problem)
        doc["metadata"].update({"numReads": cfg.sampler.num_reads, "annealingTime": cfg.sampler.annealing_time})
        name = f"problem-{cell_filename(model.cell.key)}.json"
        (out / name).write_text(json.dumps(doc, indent=1))
    print(f"wrote {len(models)} problem documents to {out}")
    return 0


def cell_filename(key: str) -> str:
    return key.replace(":", "_")


def cmd_respond(args) -> int:
    logging.basicConfig(level=logging.INFO)
    stop = None if args.once else threading.Event()
    try:
        n = serve(args.exchange_dir, stop=stop, max_requests=args.max_requests)
    except KeyboardInterrupt:
        return 0
    print(f"answered {n} requests")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ucbos", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", nargs="?", help="run configuration (YAML/JSON)")
        p.add_argument("--lattice", help="built-in lattice name overriding the config")
        p.add_argument("--alpha", type=float)
        p.add_argument("--max-sites", dest="max_sites", type=int)
        p.add_argument("--range", type=int)
        p.add_argument("-o", "--output", help="output directory")
        return p

    common(sub.add_parser("cells", help="list enumerated unit cells")).set_defaults(func=cmd_cells)
    p = common(sub.add_parser("solve", help="ground state at fixed h"))
    p.add_argument("--h", type=float)
    p.set_defaults(func=cmd_solve)
    common(sub.add_parser("staircase", help="magnetisation staircase on a field grid")).set_defaults(func=cmd_staircase)
    p = common(sub.add_parser("render", help="SVG of a spin pattern"))
    p.add_argument("--configurations", help="configurations.json or ground_state.json from a run")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--cell", help="canonical cell key a:b:c:d")
    p.add_argument("--spins", help="pattern as a string of + and -")
    p.add_argument("--tiling", type=int, nargs=2, default=[3, 3])
    p.add_argument("--out", default="pattern.svg")
    p.set_defaults(func=cmd_render)
    p = common(sub.add_parser("export", help="write Ising problem documents for external samplers"))
    p.add_argument("--h", type=float)
    p.set_defaults(func=cmd_export)
    p = sub.add_parser("respond", help="stub responder answering exchange requests with exact minima")
    p.add_argument("exchange_dir")
    p.add_argument("--max-requests", type=int)
    p.add_argument("--once", action="store_true", help="answer pending requests and exit")
    p.set_defaults(func=cmd_respond)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
