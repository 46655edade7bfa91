"""
Dense weighted endorsement graphs and the fixed-point random walk.

Both agreement-graph families (supportive, over all sources; malicious, over
the sources of one object) are complete graphs once smoothing is applied, so
weights are stored as a dense numpy matrix indexed by `vertices`.

The walk is plain power iteration from the uniform vector on the
row-normalized transition matrix; no teleportation term is added because
smoothing already makes the chain irreducible.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_WALK_TOL = 1e-8
DEFAULT_WALK_MAX_ITERS = 10_000


class GraphInvariantError(RuntimeError):
    """A row without out-mass reached normalization (smoothing was skipped)."""


class WalkConvergenceError(RuntimeError):
    """Power iteration exhausted its budget before reaching the tolerance."""

    def __init__(self, residual: float, iterations: int, object_id: Optional[str] = None):
        where = f" on object {object_id!r}" if object_id is not None else ""
        super().__init__(
            f"Random walk did not converge{where} after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations
        self.object_id = object_id

    def for_object(self, object_id: str) -> "WalkConvergenceError":
        return WalkConvergenceError(self.residual, self.iterations, object_id)


@dataclass(frozen=True)
class EndorsementGraph:
    """Directed weighted graph over sources; weights[i, j] is the edge i -> j."""
    vertices: Tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        n = len(self.vertices)
        if weights.shape != (n, n):
            raise ValueError(f"Weight matrix shape {weights.shape} does not match {n} vertices")
        if np.any(weights < 0):
            raise ValueError("Endorsement weights must be non-negative")
        np.fill_diagonal(weights, 0.0)
        weights.setflags(write=False)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_signal(
        cls, vertices: Sequence[str], signal: np.ndarray, beta: float
    ) -> "EndorsementGraph":
        """
        Smoothed weights `beta + (1 - beta) * signal` on every ordered pair of
        distinct vertices; the diagonal stays 0.
        """
        weights = beta + (1.0 - beta) * np.asarray(signal, dtype=float)
        return cls(vertices=tuple(vertices), weights=weights)

    def weight(self, source: str, target: str) -> float:
        return float(self.weights[self.vertices.index(source), self.vertices.index(target)])

    def edges(self) -> Iterator[Tuple[str, str, float]]:
        for i, source in enumerate(self.vertices):
            for j, target in enumerate(self.vertices):
                if i != j:
                    yield source, target, float(self.weights[i, j])

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary visit probabilities of the walk, aligned with `vertices`."""
    vertices: Tuple[str, ...]
    probabilities: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    def as_dict(self) -> Dict[str, float]:
        return {v: float(p) for v, p in zip(self.vertices, self.probabilities)}


def row_normalize(graph: EndorsementGraph) -> EndorsementGraph:
    """Scale every row to sum to 1, preserving proportions within the row."""
    weights = np.array(graph.weights, dtype=float)
    row_sums = weights.sum(axis=1)
    empty = row_sums <= 0
    if np.any(empty):
        if len(graph) >= 2:
            offenders = [graph.vertices[i] for i in np.flatnonzero(empty)]
            raise GraphInvariantError(f"Rows without out-mass: {offenders}")
        return graph
    return EndorsementGraph(vertices=graph.vertices, weights=weights / row_sums[:, np.newaxis])


def stationary(
    graph: EndorsementGraph,
    tol: float = DEFAULT_WALK_TOL,
    max_iters: int = DEFAULT_WALK_MAX_ITERS,
) -> StationaryDistribution:
    """
    Stationary distribution of a row-normalized graph by power iteration.

    Starts from the uniform vector and stops once ||pi P - pi||_1 <= tol.

    Raises:
        WalkConvergenceError: tolerance not reached within `max_iters`
    """
    if tol <= 0:
        raise ValueError(f"Walk tolerance must be positive, got {tol}")

    n = len(graph)
    if n == 1:
        return StationaryDistribution(vertices=graph.vertices, probabilities=np.ones(1))

    transition = graph.weights
    pi = np.full(n, 1.0 / n)
    residual = float("inf")
    for iteration in range(1, max_iters + 1):
        nxt = pi @ transition
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt / nxt.sum()
        if residual <= tol:
            logger.debug(f"Walk on {n} vertices converged in {iteration} iterations")
            return StationaryDistribution(
                vertices=graph.vertices, probabilities=pi, iterations=iteration, residual=residual
            )

    raise WalkConvergenceError(residual, max_iters)


def normalize_to_precision(dist: StationaryDistribution, anchor: float) -> Dict[str, float]:
    """
    Map visit probabilities to scores: the most visited vertex gets `anchor`
    and every other vertex is scaled by the same rate (anchor / max pi).
    """
    if not 0 < anchor <= 1:
        raise ValueError(f"Anchor must lie in (0, 1], got {anchor}")
    top = float(np.max(dist.probabilities))
    if top <= 0:
        raise ValueError("Degenerate stationary distribution (max probability is 0)")
    rate = anchor / top
    return {v: float(p) * rate for v, p in zip(dist.vertices, dist.probabilities)}


def write_graph_tsv(graph: EndorsementGraph, path: Path, label: str = ""):
    """Debug dump as `from<TAB>to<TAB>weight` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        if label:
            f.write(f"# {label}\n")
        for source, target, weight in graph.edges():
            f.write(f"{source}\t{target}\t{weight!r}\n")
