"""Weighted connectivity graphs and their spectra.

The Laplacian of a graph with incidence matrix ``A`` and edge weights ``w`` is
``L = A diag(w) A^T``.  The second-smallest eigenvalue of ``L`` (the algebraic
connectivity, lambda2) is zero exactly when the graph is disconnected.

Edge weights in this package are linear SNR/SINR values, which span more than
ten orders of magnitude (D2D links near 1e8, RIS-aided links near 1e0).  A plain
symmetric eigensolver has absolute error ``eps * ||L||`` which would swamp the
small eigenvalues created by weak bridging links, so eigenpairs are computed
from the SVD of the weighted incidence factor ``A diag(sqrt(w))`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

D2D = "d2d"
RIS = "ris"
EDGE_KINDS = (D2D, RIS)

SIMPLE_GAP_TOL = 1e-8
_SIGN_TOL = 1e-9


class GradientUndefined(ValueError):
    """Raised when lambda2 is not a simple eigenvalue."""


def component_labels(vertex_count: int, pairs) -> tuple[int, np.ndarray]:
    """Number of components and a label per vertex (labels 0..k-1 in order of first vertex)."""
    parent = list(range(vertex_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = [find(a) for a in range(vertex_count)]
    relabel = {}
    labels = np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=int)
    return len(relabel), labels


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    w: float
    kind: str = D2D

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass(frozen=True)
class NetworkGraph:
    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("vertex_count must be positive")
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            if e.kind not in EDGE_KINDS:
                raise ValueError(f"unknown edge kind {e.kind!r}")
            if e.u == e.v:
                raise ValueError(f"self-loop at vertex {e.u}")
            if not (0 <= e.u < self.vertex_count and 0 <= e.v < self.vertex_count):
                raise ValueError(f"edge ({e.u}, {e.v}) out of range for V={self.vertex_count}")
            if not np.isfinite(e.w) or e.w < 0:
                raise ValueError(f"edge ({e.u}, {e.v}) has invalid weight {e.w}")
            key = (e.pair, e.kind)
            if key in seen:
                raise ValueError(f"duplicate {e.kind} edge {e.pair}")
            seen.add(key)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable) -> "NetworkGraph":
        """Build from ``Edge`` objects or ``(u, v, w[, kind])`` tuples."""
        out = []
        for e in edges:
            out.append(e if isinstance(e, Edge) else Edge(int(e[0]), int(e[1]), float(e[2]), *e[3:]))
        return cls(vertex_count, tuple(out))

    def with_edges(self, extra: Iterable[Edge]) -> "NetworkGraph":
        return NetworkGraph(self.vertex_count, self.edges + tuple(extra))

    def has_edge(self, u: int, v: int) -> bool:
        pair = (u, v) if u < v else (v, u)
        return any(e.pair == pair for e in self.edges)

    def edges_of_kind(self, kind: str) -> list[Edge]:
        return [e for e in self.edges if e.kind == kind]

    def remove_vertex(self, v: int) -> "NetworkGraph":
        """Subgraph without ``v`` and its incident edges; higher ids shift down by one."""
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"vertex {v} out of range")

        def relabel(x):
            return x - 1 if x > v else x

        kept = [Edge(relabel(e.u), relabel(e.v), e.w, e.kind) for e in self.edges if v not in (e.u, e.v)]
        return NetworkGraph(self.vertex_count - 1, tuple(kept))

    def component_labels(self) -> tuple[int, np.ndarray]:
        """Connected components over edges with strictly positive weight."""
        return component_labels(self.vertex_count, [(e.u, e.v) for e in self.edges if e.w > 0])

    def is_connected(self) -> bool:
        return self.component_labels()[0] == 1

    def to_json(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "edges": [{"u": e.u, "v": e.v, "w": e.w, "kind": e.kind} for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NetworkGraph":
        edges = [Edge(int(e["u"]), int(e["v"]), float(e["w"]), e.get("kind", D2D)) for e in data["edges"]]
        return cls(int(data["vertices"]), tuple(edges))


@dataclass(frozen=True)
class Laplacian:
    """Graph Laplacian, optionally carrying its weighted incidence factor."""

    matrix: np.ndarray
    factor: np.ndarray | None = field(default=None, repr=False)
    labels: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FiedlerResult:
    lambda2: float
    vector: np.ndarray
    simple: bool
    lambda3: float = float("nan")


def weighted_incidence(g: NetworkGraph) -> np.ndarray:
    """``A diag(sqrt(w))``: column l has +sqrt(w_l) at u and -sqrt(w_l) at v."""
    B = np.zeros((g.vertex_count, len(g.edges)))
    for l, e in enumerate(g.edges):
        s = np.sqrt(e.w)
        B[e.u, l] = s
        B[e.v, l] = -s
    return B


def build_laplacian(g: NetworkGraph) -> Laplacian:
    L = np.zeros((g.vertex_count, g.vertex_count))
    for e in g.edges:
        if e.u == e.v:
            raise ValueError("self-loop")
        if e.w < 0:
            raise ValueError("negative weight")
        L[e.u, e.u] += e.w
        L[e.v, e.v] += e.w
        L[e.u, e.v] -= e.w
        L[e.v, e.u] -= e.w
    return Laplacian(L, weighted_incidence(g), g.component_labels()[1])


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    for x in vec:
        if abs(x) > _SIGN_TOL:
            return vec if x > 0 else -vec
    return vec


def _null_fiedler_vector(labels: np.ndarray) -> np.ndarray:
    """Unit vector constant on components, orthogonal to ones.

    Separates the largest component (lowest label on ties) from the rest, so
    squared differences are maximal exactly across that cut.
    """
    counts = np.bincount(labels)
    big = int(np.argmax(counts))
    inside = labels == big
    n_in, n_out = inside.sum(), (~inside).sum()
    vec = np.where(inside, 1.0 / n_in, -1.0 / n_out)
    return vec / np.linalg.norm(vec)


def _spectrum(L: Laplacian) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and eigenvectors of L."""
    V = L.size
    B = L.factor
    if B is None or B.shape[1] == 0:
        vals, vecs = np.linalg.eigh(L.matrix)
        return np.clip(vals, 0.0, None), vecs
    U, s, _ = np.linalg.svd(B, full_matrices=True)
    vals = np.zeros(V)
    vals[: s.size] = s**2
    order = np.argsort(vals, kind="stable")
    return vals[order], U[:, order]


def algebraic_connectivity(L: Laplacian | np.ndarray) -> FiedlerResult:
    """Second-smallest Laplacian eigenvalue and its unit eigenvector."""
    if not isinstance(L, Laplacian):
        L = Laplacian(np.asarray(L, dtype=float))
    V = L.size
    if V < 2:
        raise ValueError("algebraic connectivity needs at least 2 vertices")
    vals, vecs = _spectrum(L)
    lam3 = float(vals[2]) if V > 2 else float("inf")

    n_comp, labels = _components(L)
    if n_comp > 1:
        vec = _fix_sign(_null_fiedler_vector(labels))
        lam3 = 0.0 if n_comp > 2 else lam3
        return FiedlerResult(0.0, vec, lam3 > SIMPLE_GAP_TOL, lam3)

    lam2 = float(vals[1])
    vec = vecs[:, 1].copy()
    vec -= vec.mean()
    vec /= np.linalg.norm(vec)
    return FiedlerResult(lam2, _fix_sign(vec), lam3 - lam2 > SIMPLE_GAP_TOL, lam3)


def _components(L: Laplacian) -> tuple[int, np.ndarray]:
    if L.labels is not None:
        return int(L.labels.max()) + 1, L.labels
    rows, cols = np.nonzero(np.triu(L.matrix, 1))
    return component_labels(L.size, zip(rows.tolist(), cols.tolist()))


def lambda2_from_factor(factor: np.ndarray, connected: bool) -> float:
    """lambda2 from a weighted incidence factor (value only, no eigenvector)."""
    if not connected:
        return 0.0
    vals = np.zeros(factor.shape[0])
    s = np.linalg.svd(factor, compute_uv=False)
    vals[: s.size] = s**2
    return float(np.sort(vals)[1])


def lambda2(g: NetworkGraph) -> float:
    """Algebraic connectivity of ``g`` (value only)."""
    if g.vertex_count < 2:
        raise ValueError("algebraic connectivity needs at least 2 vertices")
    return lambda2_from_factor(weighted_incidence(g), g.is_connected())


def fiedler(g: NetworkGraph) -> FiedlerResult:
    return algebraic_connectivity(build_laplacian(g))


def node_reliability(g: NetworkGraph) -> np.ndarray:
    """lambda2 of each vertex-deleted subgraph; zero marks a critical node."""
    if g.vertex_count < 3:
        raise ValueError("node reliability needs at least 3 vertices")
    return np.array([lambda2(g.remove_vertex(v)) for v in range(g.vertex_count)])


def lambda2_weight_gradient(g: NetworkGraph, edge: Sequence[int]) -> float:
    """First-order sensitivity of lambda2 to the weight of edge (u, v).

    Also valid for a pair that is not yet an edge (derivative at weight 0).
    """
    res = fiedler(g)
    if not res.simple:
        raise GradientUndefined("lambda2 is not simple; use finite differences")
    u, v = int(edge[0]), int(edge[1])
    return float((res.vector[u] - res.vector[v]) ** 2)
