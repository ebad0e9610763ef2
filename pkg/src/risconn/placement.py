"""Adam ascent of lambda2 over RIS positions with links and phases held fixed."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import RIS, Edge, NetworkGraph, component_labels, lambda2, lambda2_from_factor, weighted_incidence
from .radio import LinkSinrModel, Scenario
from .scenario import build_d2d_graph
from .selection import qos_threshold

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdamConfig:
    step: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    iterations: int = 200
    fd_step: float = 0.01

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("decay rates must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")


@dataclass(frozen=True)
class AdamState:
    positions: np.ndarray
    m: np.ndarray
    v: np.ndarray
    i: int = 0

    @classmethod
    def start(cls, positions) -> "AdamState":
        p = np.asarray(positions, dtype=float).ravel().copy()
        return cls(p, np.zeros_like(p), np.zeros_like(p), 0)


def adam_step(state: AdamState, grad, config: AdamConfig) -> AdamState:
    """One Adam update that ascends ``grad`` (fed negated into the descent form)."""
    g = -np.asarray(grad, dtype=float).ravel()
    i = state.i + 1
    m = config.beta1 * state.m + (1 - config.beta1) * g
    v = config.beta2 * state.v + (1 - config.beta2) * g * g
    m_hat = m / (1 - config.beta1**i)
    v_hat = v / (1 - config.beta2**i)
    positions = state.positions - config.step * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return AdamState(positions, m, v, i)


class PlacementProblem:
    """lambda2 and constraint evaluation as a function of flattened RIS positions."""

    def __init__(self, scn: Scenario, assignment, profiles, *, base: NetworkGraph | None = None,
                 reliability=None, normalize: bool = False, exact_weights: bool = False):
        self.scn = scn
        self.assignment = assignment
        self.profiles = profiles
        self.base = build_d2d_graph(scn) if base is None else base
        self.triples = assignment.triples()
        self.exact_weights = exact_weights
        self._sinr = LinkSinrModel(scn, assignment, profiles, exact=exact_weights)
        # only RISs carrying links influence the objective
        self.active = sorted({m for _, m, _ in self.triples})
        V = self.base.vertex_count
        self._base_factor = weighted_incidence(self.base)
        self._base_ncomp, self._base_labels = self.base.component_labels()
        self._pattern = np.zeros((V, len(self.triples)))
        for k, (u, _, r) in enumerate(self.triples):
            self._pattern[u, k], self._pattern[r, k] = 1.0, -1.0
        rel = np.zeros(scn.num_ues) if reliability is None else np.asarray(reliability, float)
        self.thresholds = np.array([qos_threshold(rel, r, scn.constants.ris_sinr_threshold_db, normalize)
                                    for _, _, r in self.triples])

    def weights(self, positions) -> np.ndarray:
        return self._sinr(positions)

    def graph(self, positions) -> NetworkGraph:
        w = self.weights(positions)
        return self.base.with_edges(Edge(u, r, float(x), RIS) for (u, _, r), x in zip(self.triples, w))

    def objective(self, positions) -> float:
        if not self.triples:
            return lambda2(self.base)
        w = self.weights(positions)
        lab = self._base_labels
        joins = [(lab[u], lab[r]) for (u, _, r), x in zip(self.triples, w) if x > 0]
        connected = component_labels(self._base_ncomp, joins)[0] == 1
        factor = np.hstack([self._base_factor, self._pattern * np.sqrt(w)])
        return lambda2_from_factor(factor, connected)

    def feasible(self, positions) -> bool:
        if not self.triples:
            return True
        w = self.weights(positions)
        return bool(np.all(w >= self.thresholds))

    def gradient(self, positions, h: float) -> np.ndarray:
        x = np.asarray(positions, dtype=float).ravel()
        g = np.zeros_like(x)
        for m in self.active:
            for k in (2 * m, 2 * m + 1):
                step = h
                for _ in range(4):
                    xp, xm = x.copy(), x.copy()
                    xp[k] += step
                    xm[k] -= step
                    try:
                        fp, fm = self.objective(xp), self.objective(xm)
                    except ValueError:
                        fp = fm = np.nan
                    if np.isfinite(fp) and np.isfinite(fm):
                        g[k] = (fp - fm) / (2 * step)
                        break
                    step /= 10
                else:
                    raise FloatingPointError(f"objective not finite around coordinate {k}")
        return g


def objective(scn: Scenario, assignment, profiles, positions, *, base: NetworkGraph | None = None,
              exact_weights: bool = False) -> float:
    """lambda2 of the D2D graph plus the assigned RIS-aided links at ``positions``."""
    return PlacementProblem(scn, assignment, profiles, base=base, exact_weights=exact_weights).objective(positions)


def grad_lambda2(scn: Scenario, assignment, profiles, positions, *, fd_step: float = 0.01,
                 base: NetworkGraph | None = None) -> np.ndarray:
    """Central-difference gradient of lambda2 w.r.t. the flattened RIS positions."""
    return PlacementProblem(scn, assignment, profiles, base=base).gradient(positions, fd_step)


@dataclass
class PlacementResult:
    positions: np.ndarray
    lambda2: float
    initial_lambda2: float
    trajectory: list = field(default_factory=list)  # (iter, lambda2, feasible, flat positions)
    infeasible: bool = False
    best_iteration: int = 0


def optimize_positions(scn: Scenario, assignment, profiles, config: AdamConfig | None = None, *,
                       reliability=None, normalize: bool = False, base: NetworkGraph | None = None,
                       exact_weights: bool = False) -> PlacementResult:
    """Run Adam for ``config.iterations`` steps and keep the best feasible iterate.

    The starting positions are the fallback: an iterate replaces them only if it
    is feasible and strictly improves lambda2, so the returned lambda2 is never
    below the initial one.
    """
    cfg = config or AdamConfig()
    prob = PlacementProblem(scn, assignment, profiles, base=base, reliability=reliability,
                            normalize=normalize, exact_weights=exact_weights)
    state = AdamState.start(scn.ris_positions)
    lam0 = prob.objective(state.positions)
    feas0 = prob.feasible(state.positions)
    traj = [(0, lam0, feas0, state.positions.copy())]
    best_pos, best_lam, best_it = state.positions.copy(), lam0, 0
    any_feasible = feas0

    for it in range(1, cfg.iterations + 1):
        grad = prob.gradient(state.positions, cfg.fd_step)
        if not grad.any() and not state.m.any():
            # a zero gradient from rest never moves the iterate again
            lam, feas = traj[-1][1], traj[-1][2]
            traj.extend((j, lam, feas, state.positions.copy()) for j in range(it, cfg.iterations + 1))
            break
        try:
            state = adam_step(state, grad, cfg)
            lam = prob.objective(state.positions)
            feas = prob.feasible(state.positions)
        except ValueError:
            log.info("iterate %d left the valid region; stopping", it)
            break
        traj.append((it, lam, feas, state.positions.copy()))
        any_feasible |= feas
        if feas and lam > best_lam:
            best_pos, best_lam, best_it = state.positions.copy(), lam, it

    if not any_feasible:
        log.info("no feasible RIS placement found; keeping the initial positions")
    return PlacementResult(best_pos.reshape(-1, 2), best_lam, lam0, traj, not any_feasible, best_it)


def trajectory_to_csv(trajectory, num_ris: int) -> str:
    """``iter, lambda2, feasible, pos_m0_x, pos_m0_y, ...`` rows."""
    cols = ["iter", "lambda2", "feasible"] + [f"pos_m{m}_{a}" for m in range(num_ris) for a in "xy"]
    lines = [",".join(cols)]
    for it, lam, feas, pos in trajectory:
        vals = [str(it), format(lam, ".10g"), str(int(feas))] + [format(x, ".10g") for x in np.ravel(pos)]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
