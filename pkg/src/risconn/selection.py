"""Greedy Fiedler-vector perturbation for RIS-aided link selection.

For every RIS in turn: score each eligible (transmitter, receiver) pair by
``R_r * (v_u - v_r)**2`` with ``v`` the Fiedler vector of the current graph and
``R_r`` the receiver's reliability, take the best pair, keep its transmitter
and add its next best ``U_m - 1`` receivers, design the RIS beams with the GA,
and add every link that meets its reliability-scaled SINR threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .assignment import Assignment
from .ga import BeamTask, GaConfig, run_ga
from .graph import RIS, Edge, NetworkGraph, fiedler, lambda2, node_reliability
from .radio import Scenario, db_to_linear, link_sinrs, ris_angle

log = logging.getLogger(__name__)

MAX_RETRIES = 5


@dataclass(frozen=True)
class CandidateScore:
    u: int
    r: int
    score: float
    gap: float  # (v_u - v_r)**2


@dataclass
class SelectionResult:
    assignment: Assignment
    profiles: list
    graph: NetworkGraph
    reliability: np.ndarray
    lambda2_steps: list[float] = field(default_factory=list)

    @property
    def lambda2(self) -> float:
        return lambda2(self.graph)


def score_candidates(g: NetworkGraph, reliability, eligible, vector: np.ndarray | None = None) -> list[CandidateScore]:
    """Rank eligible pairs by ``R_r (v_u - v_r)**2``, best first.

    Equal scores are ordered by the unweighted gap, then by (u, r).  The gap
    key matters when every reliability is zero (any disconnected graph): the
    Fiedler vector then still favors pairs that bridge components.
    """
    if g.vertex_count < 3:
        raise ValueError("candidate scoring needs at least 3 vertices")
    v = fiedler(g).vector if vector is None else vector
    rel = np.asarray(reliability, dtype=float)
    out = []
    for u, r in eligible:
        if u == r:
            raise ValueError("self-pair in candidate set")
        gap = float((v[u] - v[r]) ** 2)
        out.append(CandidateScore(u, r, float(rel[r]) * gap, gap))
    out.sort(key=lambda c: (-c.score, -c.gap, c.u, c.r))
    return out


def qos_threshold(reliability, r: int, gamma0_db: float, normalize: bool = False) -> float:
    rel = np.asarray(reliability, dtype=float)
    scale = rel[r]
    if normalize:
        top = rel.max()
        scale = scale / top if top > 0 else 0.0
    return float(scale * db_to_linear(gamma0_db))


def qos_check(scn: Scenario, assignment: Assignment, profiles, triple, reliability, *,
              normalize: bool = False, sinr: float | None = None) -> bool:
    """Approximate SINR of (u, m, r) reaches ``R_r * gamma0`` (inclusive)."""
    u, m, r = triple
    if sinr is None:
        triples = assignment.triples()
        sinr = link_sinrs(scn, assignment, profiles)[triples.index((u, m, r))]
    return bool(sinr >= qos_threshold(reliability, r, scn.constants.ris_sinr_threshold_db, normalize))


def beam_task(scn: Scenario, m: int, u: int, receivers) -> tuple[BeamTask, list[int]]:
    """Beam task for the receivers; receivers in an already-covered direction share a beam."""
    targets, kept = [], []
    for r in receivers:
        th = ris_angle(scn, m, r)
        kept.append(r)
        if all(abs(th - t) >= 1e-3 for t in targets):
            targets.append(th)
    return BeamTask(scn.geometry, ris_angle(scn, m, u), tuple(targets)), kept


def _weights(scn, assignment, profiles, exact: bool) -> dict:
    vals = link_sinrs(scn, assignment, profiles, exact=exact)
    return dict(zip(assignment.triples(), vals))


def perturbation_select(scn: Scenario, g: NetworkGraph, um: int, ga_config: GaConfig | None = None, *,
                        normalize_reliability: bool = False, exact_weights: bool = False,
                        max_retries: int = MAX_RETRIES) -> SelectionResult:
    """Choose X, Z and the RIS phase profiles greedily, one RIS at a time.

    Returns the augmented graph with RIS-aided edges weighted by the linear
    (approximate, unless ``exact_weights``) SINR under the final assignment;
    ``lambda2_steps`` records lambda2 after every single edge addition as made.
    """
    if um < 1:
        raise ValueError("um must be >= 1")
    ga_config = ga_config or GaConfig()
    U, M = scn.num_ues, scn.num_ris
    assignment = Assignment.empty(M, U)
    profiles: list = [None] * M
    if M == 0:
        return SelectionResult(assignment, profiles, g, np.zeros(U), [lambda2(g)])
    if U < 3:
        raise ValueError("link selection needs at least 3 UEs")

    reliability = node_reliability(g)
    current = g
    steps = [lambda2(g)]
    used_tx: set[int] = set()
    linked: set[int] = set()  # UEs holding a RIS-aided edge

    for m in range(M):
        vec = fiedler(current).vector
        eligible = [(u, r) for u in range(U) if u not in used_tx
                    for r in range(U) if r != u and r not in linked and not current.has_edge(u, r)]
        if not eligible:
            log.info("RIS %d: no eligible candidate links; left unassigned", m)
            continue
        ranked = score_candidates(current, reliability, eligible, vec)
        u = ranked[0].u
        queue = [c.r for c in ranked if c.u == u]
        slots = queue[:um]
        retries = [0] * len(slots)
        next_idx = len(slots)
        attempt = 0

        while slots:
            task, slots = beam_task(scn, m, u, slots)
            outcome = run_ga(task, replace(ga_config, rng_seed=ga_config.rng_seed + 1000 * m + attempt))
            attempt += 1
            profiles[m] = outcome.best_profile
            assignment.assign(m, u, slots, task)
            sinr = _weights(scn, assignment, profiles, exact_weights)
            ok = [sinr[(u, m, r)] > 0 and qos_check(scn, assignment, profiles, (u, m, r), reliability,
                                                   normalize=normalize_reliability, sinr=sinr[(u, m, r)])
                  for r in slots]
            if all(ok):
                break
            new_slots, new_retries = [], []
            for r, passed, k in zip(slots, ok, retries):
                if passed:
                    new_slots.append(r)
                    new_retries.append(k)
                elif k < max_retries and next_idx < len(queue):
                    new_slots.append(queue[next_idx])
                    new_retries.append(k + 1)
                    next_idx += 1
            slots, retries = new_slots, new_retries

        if not slots:
            log.info("RIS %d: every candidate failed the QoS check; left unassigned", m)
            assignment.clear(m)
            profiles[m] = None
            continue

        for r in slots:
            current = current.with_edges([Edge(u, r, float(sinr[(u, m, r)]), RIS)])
            steps.append(lambda2(current))
        used_tx.add(u)
        linked.update([u, *slots])

    final = _weights(scn, assignment, profiles, exact_weights)
    ris_edges = [Edge(u, r, float(w), RIS) for (u, m, r), w in final.items()]
    return SelectionResult(assignment, profiles, g.with_edges(ris_edges), reliability, steps)
