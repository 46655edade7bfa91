"""
Malicious agreement: per-object graphs in which sharing likely-false values
(positive side) or disclaiming likely-true values together (negative side)
reads as copying, and the dependence scores derived from their walks.
"""

import logging
from dataclasses import dataclass
from functools import partial
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from src.claims.models import DerivedView, SourceObject
from src.discovery.confidence import ConfidenceTable
from src.discovery.parallel import ordered_map
from src.discovery.supportive import negative_agreement, positive_agreement
from src.graphs.endorsement import (
    DEFAULT_WALK_MAX_ITERS,
    DEFAULT_WALK_TOL,
    EndorsementGraph,
    WalkConvergenceError,
    normalize_to_precision,
    row_normalize,
    stationary,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DependenceMap:
    """
    D(s, o) and D~(s, o) for every (source, object) claim pair.

    `generation` is the outer iteration that produced the map (0 for maps not
    produced by the engine loop).
    """
    positive: Mapping[SourceObject, float]
    negative: Mapping[SourceObject, float]
    generation: int = 0

    def rows(self) -> List[Tuple[str, str, float, float]]:
        """(object, source, D, D~) sorted by object then source."""
        return sorted(
            (obj, source, self.positive[(source, obj)], self.negative[(source, obj)])
            for (source, obj) in self.positive
        )


def zero_dependence(view: DerivedView, generation: int = 0) -> DependenceMap:
    """No copying evidence anywhere; used when copy detection is switched off."""
    zeros = MappingProxyType({key: 0.0 for key in view.claims.positive_claims})
    return DependenceMap(positive=zeros, negative=zeros, generation=generation)


def malicious_weights(
    view: DerivedView, conf: ConfidenceTable, obj: str, beta: float
) -> Tuple[EndorsementGraph, EndorsementGraph]:
    """
    Smoothed, not yet row-normalized +/- malicious graphs over S_o.

    +graph: beta + (1 - beta) * |A_o| / |V_s2| * (1 - prod C_v over A_o)
    -graph: beta + (1 - beta) * |A~_o| / |V~_s2| * (1 - prod C_v~ over A~_o)
    A zero denominator makes the signal 0.
    """
    sources = view.ordered_sources(obj)
    n = len(sources)
    positive = np.zeros((n, n))
    negative = np.zeros((n, n))

    for i, s1 in enumerate(sources):
        for j, s2 in enumerate(sources):
            if i == j:
                continue
            shared = positive_agreement(view, s1, s2, obj)
            if shared:
                product = 1.0
                for value in sorted(shared):
                    product *= conf.true_conf[(obj, value)]
                positive[i, j] = len(shared) / len(view.positive(s2, obj)) * (1.0 - product)

            disclaimed = view.negative(s2, obj)
            shared_neg = negative_agreement(view, s1, s2, obj)
            if disclaimed and shared_neg:
                product = 1.0
                for value in sorted(shared_neg):
                    product *= conf.false_conf[(obj, value)]
                negative[i, j] = len(shared_neg) / len(disclaimed) * (1.0 - product)

    return (
        EndorsementGraph.from_signal(sources, positive, beta),
        EndorsementGraph.from_signal(sources, negative, beta),
    )


def build_malicious_graphs(
    view: DerivedView, conf: ConfidenceTable, obj: str, beta: float
) -> Tuple[EndorsementGraph, EndorsementGraph]:
    """Row-normalized +/- malicious agreement graphs of one object."""
    positive, negative = malicious_weights(view, conf, obj, beta)
    return row_normalize(positive), row_normalize(negative)


def _object_dependence(
    view: DerivedView,
    conf: ConfidenceTable,
    pc_max: float,
    nc_max: float,
    beta: float,
    tol: float,
    max_iters: int,
    obj: str,
) -> Tuple[Dict[str, float], Dict[str, float]]:
    sources = view.ordered_sources(obj)
    if len(sources) < 2:
        return {s: 0.0 for s in sources}, {s: 0.0 for s in sources}

    positive_graph, negative_graph = build_malicious_graphs(view, conf, obj, beta)
    try:
        positive = normalize_to_precision(stationary(positive_graph, tol, max_iters), pc_max)
        negative = normalize_to_precision(stationary(negative_graph, tol, max_iters), nc_max)
    except WalkConvergenceError as e:
        raise e.for_object(obj) from e
    return positive, negative


def derive_dependence(
    view: DerivedView,
    conf: ConfidenceTable,
    pc_max: float,
    nc_max: float,
    beta: float,
    tol: float = DEFAULT_WALK_TOL,
    max_iters: int = DEFAULT_WALK_MAX_ITERS,
    threads: int = 1,
    generation: int = 0,
    progress: Optional[bool] = None,
) -> DependenceMap:
    """
    Dependence scores for every (source, object) pair.

    Each object with at least two sources gets its own pair of walks, anchored
    per graph at pc_max / nc_max; single-source objects score 0. Objects are
    processed independently (optionally on `threads` workers) and merged in
    lexicographic order.

    Raises:
        WalkConvergenceError: tagged with the offending object
    """
    if progress is None:
        progress = logger.isEnabledFor(logging.INFO) and len(view.object_order) > 1000

    worker = partial(_object_dependence, view, conf, pc_max, nc_max, beta, tol, max_iters)
    objects = view.object_order
    results = ordered_map(worker, objects, threads, desc="Malicious graphs", progress=progress)

    positive: Dict[SourceObject, float] = {}
    negative: Dict[SourceObject, float] = {}
    for obj, (pos_scores, neg_scores) in zip(objects, results):
        for source in view.ordered_sources(obj):
            positive[(source, obj)] = pos_scores[source]
            negative[(source, obj)] = neg_scores[source]

    return DependenceMap(
        positive=MappingProxyType(positive),
        negative=MappingProxyType(negative),
        generation=generation,
    )
