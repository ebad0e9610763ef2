"""Command line entry point: ``risconn <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace


from . import config as cfgio
from .experiments import PATTERN_COLUMNS, RATE_COLUMNS, RateFixture, design_beam, pattern_sweep, rate_experiment, two_ris_fixture
from .graph import NetworkGraph, fiedler, node_reliability
from .placement import trajectory_to_csv
from .radio import DIRECT_ALL, DIRECT_ABOVE_THRESHOLD
from .scenario import build_d2d_graph, dump_scenario, generate_scenario, load_scenario
from .solver import SCHEMES, SWEEP_COLUMNS, SolveConfig, SweepSpec, rows_to_csv, run_baseline, sweep

log = logging.getLogger("risconn")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _names(text: str) -> list[str]:
    out = [x.strip() for x in text.split(",") if x.strip()]
    bad = [x for x in out if x not in SCHEMES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {list(SCHEMES)}")
    return out


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


def _config(path: str | None):
    return cfgio.load_config(path) if path else (SolveConfig(), None)


def cmd_scenario_gen(args) -> int:
    scn = generate_scenario(args.ues, args.riss, args.area, args.seed, elements=args.elements,
                            direct_links=args.direct_links)
    dump_scenario(scn, args.output)
    return 0


def cmd_solve(args) -> int:
    cfg, constants = _config(args.config)
    if args.optimizer_seed is not None:
        cfg = replace(cfg, ga=replace(cfg.ga, rng_seed=args.optimizer_seed))
    scn = cfgio.apply_constants(load_scenario(args.scenario), constants)
    res = run_baseline(scn, args.scheme or cfg.scheme, cfg)
    _write(args.output, cfgio.dumps_result(res, include_timing=args.timing))
    if args.trajectory:
        _write(args.trajectory, trajectory_to_csv(res.trajectory, len(res.positions)))
    return 0


def cmd_sweep(args) -> int:
    cfg, _ = _config(args.config)
    spec = SweepSpec(ues=args.ues, riss=args.riss, elements=args.elements, um=args.um if args.um else cfg.um,
                     area=args.area, direct_links=args.direct_links)
    values = _ints(args.values)
    rows = sweep(args.param, values, range(args.seeds), args.schemes, spec=spec, config=cfg, jobs=args.jobs)
    _write(args.output, rows_to_csv(rows, SWEEP_COLUMNS))
    return 0


def cmd_beamplot(args) -> int:
    from .ga import GaConfig

    task, outcome = design_beam(args.elements, args.aoa_deg, _floats(args.targets_deg),
                                spacing_frac=args.spacing_frac, ga=GaConfig(rng_seed=args.seed))
    angles, values = pattern_sweep(task, outcome.best_profile, args.step_deg)
    buf = [",".join(PATTERN_COLUMNS)]
    buf += [f"{a:.1f},{v:.10g}" for a, v in zip(angles, values)]
    _write(args.output, "\n".join(buf) + "\n")
    return 0


def cmd_rates(args) -> int:
    fixture = RateFixture.load(args.fixture) if args.fixture else two_ris_fixture()
    rows = rate_experiment(fixture, _ints(args.n_values), args.um, seeds=range(args.seeds))
    _write(args.output, rows_to_csv(rows, RATE_COLUMNS))
    return 0


def cmd_fixture(args) -> int:
    _write(args.output, json.dumps(two_ris_fixture(separation=args.separation).to_json(), indent=1) + "\n")
    return 0


def cmd_graph_export(args) -> int:
    g = build_d2d_graph(load_scenario(args.scenario))
    _write(args.output, json.dumps(g.to_json(), indent=1) + "\n")
    return 0


def cmd_graph_info(args) -> int:
    with open(args.graph) as f:
        g = NetworkGraph.from_json(json.load(f))
    res = fiedler(g)
    out = {"lambda2": res.lambda2, "simple": res.simple, "fiedler_vector": res.vector.tolist(),
           "connected": g.is_connected()}
    if g.vertex_count >= 3:
        out["reliability"] = node_reliability(g).tolist()
    _write(args.output, json.dumps(out, indent=1) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risconn", description="RIS-aided D2D connectivity planning")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="scenario utilities").add_subparsers(dest="action", required=True)
    g = sc.add_parser("gen", help="random deployment")
    g.add_argument("--ues", type=int, required=True)
    g.add_argument("--riss", type=int, required=True)
    g.add_argument("--area", type=float, default=100.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--elements", type=int, default=10)
    g.add_argument("--direct-links", choices=[DIRECT_ALL, DIRECT_ABOVE_THRESHOLD], default=DIRECT_ALL)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_scenario_gen)

    s = sub.add_parser("solve", help="link selection and RIS placement")
    s.add_argument("--scenario", required=True)
    s.add_argument("--config")
    s.add_argument("--scheme", choices=SCHEMES)
    s.add_argument("--optimizer-seed", type=int)
    s.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    s.add_argument("--trajectory", help="write the placement trajectory CSV here")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="average connectivity sweep")
    w.add_argument("--param", choices=["ues", "elements", "um"], required=True)
    w.add_argument("--values", required=True, help="comma separated")
    w.add_argument("--seeds", type=int, required=True, help="number of seeds, 0..K-1")
    w.add_argument("--schemes", type=_names, default=list(SCHEMES))
    w.add_argument("--config")
    w.add_argument("--ues", type=int, default=10)
    w.add_argument("--riss", type=int, default=3)
    w.add_argument("--elements", type=int, default=10)
    w.add_argument("--um", type=int)
    w.add_argument("--area", type=float, default=100.0)
    w.add_argument("--direct-links", choices=[DIRECT_ALL, DIRECT_ABOVE_THRESHOLD], default=DIRECT_ALL)
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("-o", "--output", default="-")
    w.set_defaults(func=cmd_sweep)

    b = sub.add_parser("beamplot", help="GA beam design and PDAF sweep")
    b.add_argument("--elements", type=int, required=True)
    b.add_argument("--spacing-frac", type=float, default=0.5)
    b.add_argument("--aoa-deg", type=float, required=True)
    b.add_argument("--targets-deg", required=True)
    b.add_argument("--step-deg", type=float, default=0.1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--output", default="-")
    b.set_defaults(func=cmd_beamplot)

    r = sub.add_parser("rates", help="exact vs approximate sum rate on the two-RIS fixture")
    r.add_argument("--fixture", help="fixture JSON (default: built-in)")
    r.add_argument("--n-values", required=True)
    r.add_argument("--um", type=int, choices=[1, 2], required=True)
    r.add_argument("--seeds", type=int, default=1)
    r.add_argument("-o", "--output", default="-")
    r.set_defaults(func=cmd_rates)

    f = sub.add_parser("fixture", help="write the built-in two-RIS rate fixture")
    f.add_argument("--separation", type=float, default=40.0)
    f.add_argument("-o", "--output", default="-")
    f.set_defaults(func=cmd_fixture)

    gr = sub.add_parser("graph", help="graph import/export").add_subparsers(dest="action", required=True)
    ge = gr.add_parser("export", help="D2D graph of a scenario")
    ge.add_argument("--scenario", required=True)
    ge.add_argument("-o", "--output", default="-")
    ge.set_defaults(func=cmd_graph_export)
    gi = gr.add_parser("info", help="lambda2, Fiedler vector and node reliability")
    gi.add_argument("--graph", required=True)
    gi.add_argument("-o", "--output", default="-")
    gi.set_defaults(func=cmd_graph_info)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
