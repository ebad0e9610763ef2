"""Solver configuration files (TOML or JSON) and result serialization."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .ga import GaConfig
from .placement import AdamConfig
from .radio import RadioConstants, Scenario
from .solver import SolveConfig, SolveResult

_SOLVE_KEYS = {"um", "outer_iterations", "tolerance", "scheme", "normalize_reliability", "exact_weights"}


def _pick(cls, data: dict, section: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown keys in [{section}]: {sorted(unknown)}")
    return cls(**data)


def read_config_file(path) -> dict:
    path = Path(path)
    if path.suffix.lower() == ".toml":
        with open(path, "rb") as f:
            return tomllib.load(f)
    with open(path) as f:
        return json.load(f)


def config_from_dict(data: dict) -> tuple[SolveConfig, RadioConstants | None]:
    """Top-level solver keys plus optional ``ga``, ``adam`` and ``radio`` sections."""
    data = dict(data)
    ga = _pick(GaConfig, data.pop("ga", {}), "ga")
    adam = _pick(AdamConfig, data.pop("adam", {}), "adam")
    radio = data.pop("radio", None)
    constants = _pick(RadioConstants, radio, "radio") if radio is not None else None
    unknown = set(data) - _SOLVE_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SolveConfig(ga=ga, adam=adam, **data), constants


def load_config(path) -> tuple[SolveConfig, RadioConstants | None]:
    return config_from_dict(read_config_file(path))


def config_to_dict(cfg: SolveConfig, constants: RadioConstants | None = None) -> dict:
    out = {k: getattr(cfg, k) for k in sorted(_SOLVE_KEYS)}
    out["ga"] = asdict(cfg.ga)
    out["adam"] = asdict(cfg.adam)
    if constants is not None:
        out["radio"] = asdict(constants)
    return out


def apply_constants(scn: Scenario, constants: RadioConstants | None) -> Scenario:
    return scn if constants is None else replace(scn, constants=constants)


# ------------------------------------------------------------------ results


def _db(x: float):
    """dB value to 6 significant digits; -inf (no signal) becomes null."""
    if not math.isfinite(x):
        return None
    return float(f"{x:.6g}")


def result_to_json(res: SolveResult, *, include_timing: bool = False) -> dict:
    """Deterministic JSON view of a solve; wall time only on request."""
    out = {
        "scheme": res.scheme,
        "scenario_seed": res.scenario_seed,
        "optimizer_seed": res.optimizer_seed,
        "num_ris": res.num_ris,
        "elements": res.elements,
        "um": res.um,
        "lambda2_initial": res.lambda2_initial,
        "lambda2_final": res.lambda2_final,
        "lambda2_history": list(res.lambda2_history),
        "placement_infeasible": res.placement_infeasible,
        "positions": res.positions.tolist(),
        "assignment": res.assignment.to_json(),
        "profiles": [None if p is None else [float(x) for x in p] for p in res.profiles],
        "links": [{"tx": l.tx, "ris": l.ris, "rx": l.rx, "exact_sinr_db": _db(l.exact_sinr_db),
                   "approx_sinr_db": _db(l.approx_sinr_db)} for l in res.links],
        "exact_sum_rate": res.exact_sum_rate,
        "approx_sum_rate": res.approx_sum_rate,
    }
    if include_timing:
        out["wall_time"] = res.wall_time
    return out


def dumps_result(res: SolveResult, *, include_timing: bool = False) -> str:
    return json.dumps(result_to_json(res, include_timing=include_timing), indent=1, sort_keys=True) + "\n"
