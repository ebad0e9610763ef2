"""Alternating link selection / RIS placement, baselines and experiment sweeps."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .assignment import Assignment
from .ga import GaConfig
from .graph import lambda2
from .placement import AdamConfig, optimize_positions
from .radio import Scenario, exact_sinr_linear, approx_sinr_linear, linear_to_db, sum_rate
from .scenario import build_d2d_graph, generate_scenario
from .selection import perturbation_select

log = logging.getLogger(__name__)

PROPOSED = "proposed"
SINGLE_BEAM = "single-beam"
RIS_FREE = "ris-free"
DISTRIBUTED_SMALL = "distributed-small"
SCHEMES = (PROPOSED, SINGLE_BEAM, RIS_FREE, DISTRIBUTED_SMALL)


@dataclass(frozen=True)
class SolveConfig:
    um: int = 2
    outer_iterations: int = 3
    tolerance: float = 1e-3
    ga: GaConfig = field(default_factory=GaConfig)
    adam: AdamConfig = field(default_factory=AdamConfig)
    scheme: str = PROPOSED
    normalize_reliability: bool = False
    exact_weights: bool = False

    def __post_init__(self):
        if self.um < 1:
            raise ValueError("um must be >= 1")
        if self.outer_iterations < 1:
            raise ValueError("outer_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class LinkReport:
    tx: int
    ris: int
    rx: int
    exact_sinr_db: float
    approx_sinr_db: float


@dataclass
class SolveResult:
    scheme: str
    lambda2_initial: float
    lambda2_final: float
    assignment: Assignment
    profiles: list
    positions: np.ndarray
    links: list[LinkReport]
    exact_sum_rate: float
    approx_sum_rate: float
    lambda2_history: list[float]
    num_ris: int
    elements: int
    um: int
    scenario_seed: int
    optimizer_seed: int
    placement_infeasible: bool = False
    wall_time: float = 0.0
    trajectory: list = field(default_factory=list, repr=False)  # placement trajectory of the best round

    @property
    def links_added(self) -> int:
        return len(self.links)


def _link_reports(scn: Scenario, assignment: Assignment, profiles) -> list[LinkReport]:
    out = []
    for u, m, r in assignment.triples():
        ex = exact_sinr_linear(scn, assignment, profiles, u, r, m)
        ap = approx_sinr_linear(scn, assignment, profiles, u, r, m)
        out.append(LinkReport(u, m, r, linear_to_db(ex), linear_to_db(ap)))
    return out


def solve(scn: Scenario, config: SolveConfig | None = None) -> SolveResult:
    """Alternate link selection (with GA beams) and Adam placement; keep the best round."""
    cfg = config or SolveConfig()
    t0 = time.perf_counter()
    base = build_d2d_graph(scn)
    lam_init = lambda2(base)
    positions = scn.ris_positions
    history = [lam_init]
    best = None
    prev = None

    for it in range(cfg.outer_iterations):
        cur = scn.with_ris_positions(positions)
        ga = replace(cfg.ga, rng_seed=cfg.ga.rng_seed + 100_000 * it)
        sel = perturbation_select(cur, base, cfg.um, ga, normalize_reliability=cfg.normalize_reliability,
                                  exact_weights=cfg.exact_weights)
        place = optimize_positions(cur, sel.assignment, sel.profiles, cfg.adam, reliability=sel.reliability,
                                   normalize=cfg.normalize_reliability, base=base,
                                   exact_weights=cfg.exact_weights)
        lam = place.lambda2
        history.append(lam)
        if best is None or lam > best[0]:
            best = (lam, sel, place)
        if prev is not None and lam - prev <= cfg.tolerance * abs(prev):
            break
        prev = lam
        positions = place.positions

    lam, sel, place = best
    final_scn = scn.with_ris_positions(place.positions)
    links = _link_reports(final_scn, sel.assignment, sel.profiles)
    bw = scn.constants.bandwidth
    return SolveResult(
        scheme=cfg.scheme,
        lambda2_initial=lam_init,
        lambda2_final=lam,
        assignment=sel.assignment,
        profiles=sel.profiles,
        positions=place.positions,
        links=links,
        exact_sum_rate=sum_rate([l.exact_sinr_db for l in links], bw),
        approx_sum_rate=sum_rate([l.approx_sinr_db for l in links], bw),
        lambda2_history=history,
        num_ris=scn.num_ris,
        elements=scn.geometry.elements,
        um=cfg.um,
        scenario_seed=scn.seed,
        optimizer_seed=cfg.ga.rng_seed,
        placement_infeasible=place.infeasible,
        wall_time=time.perf_counter() - t0,
        trajectory=place.trajectory,
    )


def split_ris(scn: Scenario) -> Scenario:
    """Replace every RIS by its two N/2-element halves, side by side along the array axis."""
    N = scn.geometry.elements
    if N % 2:
        raise ValueError("distributed-small needs an even element count")
    half = N // 2
    offset = half * scn.geometry.spacing / 2
    pos, orient = [], []
    for p, o in zip(scn.ris_positions, scn.ris_orientation):
        axis = np.array([np.cos(o), -np.sin(o)])  # array axis, perpendicular to broadside
        pos += [p - offset * axis, p + offset * axis]
        orient += [o, o]
    return replace(scn, ris_positions=np.array(pos).reshape(-1, 2), ris_orientation=np.array(orient),
                   geometry=scn.geometry.with_elements(half))


def run_baseline(scn: Scenario, which: str, config: SolveConfig | None = None) -> SolveResult:
    cfg = config or SolveConfig()
    if which == PROPOSED:
        return solve(scn, replace(cfg, scheme=which))
    if which == SINGLE_BEAM:
        return solve(scn, replace(cfg, um=1, scheme=which))
    if which == RIS_FREE:
        return solve(replace(scn, ris_positions=np.zeros((0, 2)), ris_orientation=np.zeros(0)),
                     replace(cfg, scheme=which))
    if which == DISTRIBUTED_SMALL:
        return solve(split_ris(scn), replace(cfg, um=1, scheme=which))
    raise ValueError(f"unknown scheme {which!r}")


# ------------------------------------------------------------------ sweeps

SWEEP_COLUMNS = ["param", "value", "scheme", "seed", "lambda2_initial", "lambda2_final", "links_added", "status"]


@dataclass(frozen=True)
class SweepSpec:
    """Fixed parts of a sweep; the swept parameter overrides one of them."""

    ues: int = 10
    riss: int = 3
    elements: int = 10
    um: int = 2
    area: float = 100.0
    direct_links: str = "all"


def _sweep_point(args):
    param, value, seed, scheme, spec, cfg = args
    ues, elements, um = spec.ues, spec.elements, spec.um
    if param == "ues":
        ues = int(value)
    elif param == "elements":
        elements = int(value)
    elif param == "um":
        um = int(value)
    row = {"param": param, "value": value, "scheme": scheme, "seed": seed}
    try:
        scn = generate_scenario(ues, spec.riss, spec.area, seed, elements=elements,
                                direct_links=spec.direct_links)
        res = run_baseline(scn, scheme, replace(cfg, um=um))
        row.update(lambda2_initial=res.lambda2_initial, lambda2_final=res.lambda2_final,
                   links_added=res.links_added, status="ok")
    except Exception as exc:  # recorded, the sweep continues
        log.warning("sweep point %s=%s seed=%s %s failed: %s", param, value, seed, scheme, exc)
        row.update(lambda2_initial=float("nan"), lambda2_final=float("nan"), links_added=0,
                   status=f"error: {exc}")
    return row


def sweep(param: str, values, seeds, schemes, *, spec: SweepSpec | None = None,
          config: SolveConfig | None = None, jobs: int = 1) -> list[dict]:
    """Per-run rows followed by per-(value, scheme) mean rows (seed = "mean")."""
    if param not in ("ues", "elements", "um"):
        raise ValueError(f"cannot sweep {param!r}")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    spec = spec or SweepSpec()
    cfg = config or SolveConfig()
    points = [(param, v, s, sch, spec, cfg) for v in values for sch in schemes for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    order = {sch: i for i, sch in enumerate(schemes)}
    rows.sort(key=lambda r: (list(values).index(r["value"]), order[r["scheme"]], r["seed"]))

    out = []
    for v in values:
        for sch in schemes:
            group = [r for r in rows if r["value"] == v and r["scheme"] == sch]
            out.extend(group)
            ok = [r for r in group if r["status"] == "ok"]
            mean = {"param": param, "value": v, "scheme": sch, "seed": "mean"}
            if ok:
                mean.update(lambda2_initial=float(np.mean([r["lambda2_initial"] for r in ok])),
                            lambda2_final=float(np.mean([r["lambda2_final"] for r in ok])),
                            links_added=float(np.mean([r["links_added"] for r in ok])))
            else:
                mean.update(lambda2_initial=float("nan"), lambda2_final=float("nan"), links_added=float("nan"))
            mean["status"] = f"ok={len(ok)} failed={len(group) - len(ok)}"
            out.append(mean)
    return out


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()
