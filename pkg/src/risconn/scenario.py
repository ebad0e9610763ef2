"""Random deployments, the D2D connectivity graph and scenario JSON."""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from .graph import D2D, Edge, NetworkGraph
from .radio import ArrayGeometry, RadioConstants, Scenario, d2d_snr_matrix, db_to_linear


def rayleigh_fading(num_ues: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix of unit-variance circularly-symmetric complex Gaussians."""
    h = (rng.standard_normal((num_ues, num_ues)) + 1j * rng.standard_normal((num_ues, num_ues))) / np.sqrt(2)
    h = np.triu(h, 1)
    return h + h.T


def generate_scenario(u: int, m: int, area: float = 100.0, seed: int = 0, *, elements: int = 10,
                      constants: RadioConstants | None = None, **kwargs) -> Scenario:
    """UEs and RISs i.i.d. uniform in ``[0, area]^2`` with Rayleigh D2D fading."""
    if u < 3:
        raise ValueError("need at least 3 UEs")
    if m < 0:
        raise ValueError("RIS count must be nonnegative")
    if not area > 0:
        raise ValueError("area must be positive")
    constants = constants or RadioConstants()
    rng = np.random.default_rng(seed)

    while True:
        ues = rng.uniform(0.0, area, size=(u, 2))
        d = np.linalg.norm(ues[:, None] - ues[None], axis=-1)
        if np.all(d[~np.eye(u, dtype=bool)] > 0):
            break
    while True:
        ris = rng.uniform(0.0, area, size=(m, 2))
        if m == 0 or np.all(np.linalg.norm(ris[:, None] - ues[None], axis=-1) > 0):
            break
    fading = rayleigh_fading(u, rng)
    geom = ArrayGeometry.from_carrier(elements, constants.carrier)
    return Scenario(ues, ris, geom, constants, fading, seed=seed, **kwargs)


def build_d2d_graph(scn: Scenario) -> NetworkGraph:
    """Edges for UE pairs whose SNR reaches the D2D threshold, weighted by linear SNR."""
    snr = d2d_snr_matrix(scn)
    thr = db_to_linear(scn.constants.d2d_snr_threshold_db)
    U = scn.num_ues
    edges = [Edge(a, b, float(snr[a, b]), D2D)
             for a in range(U) for b in range(a + 1, U) if snr[a, b] >= thr]
    return NetworkGraph(U, tuple(edges))


# ---------------------------------------------------------------- JSON


def scenario_to_json(scn: Scenario) -> dict:
    return {
        "ue_positions": scn.ue_positions.tolist(),
        "ris_positions": scn.ris_positions.tolist(),
        "ris_orientation": scn.ris_orientation.tolist(),
        "geometry": asdict(scn.geometry),
        "constants": asdict(scn.constants),
        "d2d_fading": [[[z.real, z.imag] for z in row] for row in scn.d2d_fading],
        "element_pattern": scn.element_pattern,
        "direct_links": scn.direct_links,
        "seed": scn.seed,
    }


def scenario_from_json(data: dict) -> Scenario:
    fading = np.array(data["d2d_fading"], dtype=float)
    fading = fading[..., 0] + 1j * fading[..., 1] if fading.size else np.zeros((0, 0), complex)
    ris = data.get("ris_positions") or []
    return Scenario(
        ue_positions=np.array(data["ue_positions"], dtype=float),
        ris_positions=np.array(ris, dtype=float).reshape(-1, 2),
        geometry=ArrayGeometry(**data["geometry"]),
        constants=RadioConstants(**data.get("constants", {})),
        d2d_fading=fading,
        ris_orientation=data.get("ris_orientation"),
        element_pattern=data.get("element_pattern", "cos"),
        direct_links=data.get("direct_links", "all"),
        seed=int(data.get("seed", 0)),
    )


def dump_scenario(scn: Scenario, path) -> None:
    with open(path, "w") as f:
        json.dump(scenario_to_json(scn), f, indent=1)
        f.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as f:
        return scenario_from_json(json.load(f))
