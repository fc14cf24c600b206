"""Electrical and communication graph models.

The electrical grid is an undirected connected graph with an arbitrary
but fixed edge orientation used only for bookkeeping: the incidence
matrix B is node-by-edge, so eta = B^T theta gives one angle difference
per line. Line coupling coefficients are gamma_k = |V_i||V_j| / X_ij.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioError


def _check_connected(n, edges, what):
    """BFS connectivity check over an undirected edge list."""
    if n == 1:
        return
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    if not seen.all():
        raise ScenarioError(f"{what} not connected")


@dataclass(frozen=True)
class GridTopology:
    """Power-line graph: n nodes, oriented edges, reactances, voltage magnitudes.

    Node indices are 0-based internally; scenario files use 1-based ids.
    """

    n: int
    edges: tuple          # tuple of (source, sink) pairs
    reactance: np.ndarray  # per-edge X_ij, ohm
    vmag: np.ndarray       # per-node |V_i|, volt

    def __init__(self, n, edges, reactance, vmag):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple((int(i), int(j)) for i, j in edges))
        object.__setattr__(self, "reactance", np.asarray(reactance, dtype=float))
        object.__setattr__(self, "vmag", np.asarray(vmag, dtype=float))
        self._validate()

    def _validate(self):
        if self.n < 1:
            raise ScenarioError("grid must have at least one node")
        if len(self.reactance) != len(self.edges):
            raise ScenarioError("one reactance per edge required")
        if len(self.vmag) != self.n:
            raise ScenarioError("one voltage magnitude per node required")
        seen = set()
        for k, (i, j) in enumerate(self.edges):
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ScenarioError(f"edge {k}: node index out of range")
            if i == j:
                raise ScenarioError(f"edge {k}: self-loop at node {i + 1}")
            key = frozenset((i, j))
            if key in seen:
                raise ScenarioError(f"edge {k}: duplicate line {{{i + 1},{j + 1}}}")
            seen.add(key)
        if np.any(self.reactance <= 0):
            k = int(np.argmin(self.reactance))
            raise ScenarioError(
                f"edge {k} ({self.edges[k][0] + 1},{self.edges[k][1] + 1}): "
                f"reactance must be positive, got {self.reactance[k]}")
        if np.any(self.vmag <= 0):
            raise ScenarioError("voltage magnitudes must be positive")
        _check_connected(self.n, self.edges, "power grid")

    @property
    def m(self):
        return len(self.edges)


@dataclass(frozen=True)
class CommGraph:
    """Undirected weighted communication graph for the consensus controller."""

    n: int
    edges: tuple
    weights: np.ndarray

    def __init__(self, n, edges, weights=None):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple((int(i), int(j)) for i, j in edges))
        if weights is None:
            weights = np.ones(len(self.edges))
        object.__setattr__(self, "weights", np.asarray(weights, dtype=float))
        self._validate()

    def _validate(self):
        if len(self.weights) != len(self.edges):
            raise ScenarioError("one weight per communication edge required")
        for k, (i, j) in enumerate(self.edges):
            if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                raise ScenarioError(f"communication edge {k}: invalid pair ({i + 1},{j + 1})")
        if np.any(self.weights <= 0):
            raise ScenarioError("communication weights must be positive")
        _check_connected(self.n, self.edges, "communication graph")


def incidence_matrix(topology: GridTopology) -> np.ndarray:
    """Node-by-edge incidence matrix: -1 at the source, +1 at the sink."""
    b = np.zeros((topology.n, topology.m))
    for k, (i, j) in enumerate(topology.edges):
        b[i, k] = -1.0
        b[j, k] = 1.0
    return b


def laplacian(comm: CommGraph) -> np.ndarray:
    """Weighted graph Laplacian of the communication graph."""
    lap = np.zeros((comm.n, comm.n))
    for (i, j), w in zip(comm.edges, comm.weights):
        lap[i, i] += w
        lap[j, j] += w
        lap[i, j] -= w
        lap[j, i] -= w
    return lap


def edge_coupling(topology: GridTopology) -> np.ndarray:
    """Per-line coupling gamma_k = |V_i||V_j| / X_ij in watts."""
    gamma = np.empty(topology.m)
    for k, (i, j) in enumerate(topology.edges):
        gamma[k] = topology.vmag[i] * topology.vmag[j] / topology.reactance[k]
    return gamma
