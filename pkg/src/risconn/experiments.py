"""Reproducible experiment harness: beam pattern sweeps and the two-RIS rate study."""

from __future__ import annotations

import json
from dataclasses import replace

import numpy as np

from .assignment import Assignment
from .ga import BeamTask, GaConfig, run_ga
from .radio import ArrayGeometry, Scenario, link_sinrs, pdaf
from .scenario import scenario_from_json, scenario_to_json
from .selection import beam_task

PATTERN_COLUMNS = ["angle_deg", "pdaf"]
RATE_COLUMNS = ["elements", "um", "seed", "exact_sum_rate", "approx_sum_rate", "relative_gap"]


def design_beam(elements: int, aoa_deg: float, targets_deg, *, spacing_frac: float = 0.5,
                carrier: float = 3e9, ga: GaConfig | None = None):
    """GA profile for one arrival angle and a set of departure angles (degrees)."""
    geom = ArrayGeometry.from_carrier(elements, carrier, spacing_frac)
    task = BeamTask(geom, np.deg2rad(aoa_deg), tuple(np.deg2rad(t) for t in targets_deg))
    return task, run_ga(task, ga or GaConfig())


def pattern_sweep(task: BeamTask, profile, step_deg: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """PDAF of ``profile`` for departure angles over [-90, 90] degrees."""
    count = int(round(180.0 / step_deg)) + 1
    angles = np.linspace(-90.0, 90.0, count)
    return angles, pdaf(task.geometry, profile, task.aoa, np.deg2rad(angles))


# ------------------------------------------------------------------ rate study


class RateFixture:
    """A scenario plus, per RIS, its transmitter and an ordered receiver list."""

    def __init__(self, scenario: Scenario, links):
        self.scenario = scenario
        self.links = [(int(u), int(m), [int(r) for r in rs]) for u, m, rs in links]

    def assignment(self, um: int) -> Assignment:
        a = Assignment.empty(self.scenario.num_ris, self.scenario.num_ues)
        for u, m, rs in self.links:
            if um > len(rs):
                raise ValueError(f"RIS {m} has only {len(rs)} receivers for um={um}")
            a.assign(m, u, rs[:um])
        return a

    def to_json(self) -> dict:
        return {"scenario": scenario_to_json(self.scenario), "links": [[u, m, rs] for u, m, rs in self.links]}

    @classmethod
    def from_json(cls, data: dict) -> "RateFixture":
        return cls(scenario_from_json(data["scenario"]), data["links"])

    @classmethod
    def load(cls, path) -> "RateFixture":
        with open(path) as f:
            return cls.from_json(json.load(f))


def two_ris_fixture(elements: int = 16, separation: float = 40.0) -> RateFixture:
    """Two transmitters, two RISs and four receivers, direct paths blocked.

    Each RIS faces +y with its transmitter on the left and two receivers on
    the right; the second cell is a copy shifted by ``separation`` meters.
    UE ids: 0, 1 transmitters; 2, 3 first receivers; 4, 5 second receivers.
    """
    cell_tx = np.array([-4.0, 3.0])
    cell_rx = np.array([[2.0, 4.0], [4.5, 2.0]])
    shift = np.array([separation, 0.0])
    ues = np.array([cell_tx, cell_tx + shift, cell_rx[0], cell_rx[0] + shift, cell_rx[1] + shift, cell_rx[1]])
    ris = np.array([[0.0, 0.0], shift])
    geom = ArrayGeometry.from_carrier(elements, 3e9)
    scn = Scenario(ues, ris, geom, d2d_fading=np.zeros((6, 6), complex))
    return RateFixture(scn, [(0, 0, [2, 5]), (1, 1, [3, 4])])


def rate_experiment(fixture: RateFixture, n_values, um: int, seeds=(0,), ga: GaConfig | None = None) -> list[dict]:
    """Exact and approximate sum rates with GA-designed beams, per element count and seed."""
    ga = ga or GaConfig()
    assignment = fixture.assignment(um)
    rows = []
    for n in n_values:
        scn = fixture.scenario.with_geometry(fixture.scenario.geometry.with_elements(int(n)))
        bw = scn.constants.bandwidth
        for seed in seeds:
            profiles: list = [None] * scn.num_ris
            for m, u in assignment.transmitters():
                task, _ = beam_task(scn, m, u, assignment.receivers(m))
                profiles[m] = run_ga(task, replace(ga, rng_seed=int(seed) * 1000 + m)).best_profile
            exact = float(bw * np.sum(np.log2(1 + link_sinrs(scn, assignment, profiles, exact=True))))
            approx = float(bw * np.sum(np.log2(1 + link_sinrs(scn, assignment, profiles))))
            gap = abs(exact - approx) / exact if exact > 0 else 0.0
            rows.append({"elements": int(n), "um": um, "seed": seed, "exact_sum_rate": exact,
                         "approx_sum_rate": approx, "relative_gap": gap})
    return rows
