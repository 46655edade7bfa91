"""
Supportive agreement: endorsement between sources from shared positive and
shared negative claims, the two supportive graphs, and two-sided source
precision derived from their random walks.
"""

import logging
from dataclasses import dataclass
from functools import partial
from types import MappingProxyType
from typing import TYPE_CHECKING, Dict, FrozenSet, List, Mapping, Tuple

import numpy as np

from src.claims.models import DerivedView
from src.claims.popularity import PopularityTable
from src.discovery.confidence import ConfidenceTable
from src.discovery.parallel import ordered_map
from src.graphs.endorsement import (
    DEFAULT_WALK_MAX_ITERS,
    DEFAULT_WALK_TOL,
    EndorsementGraph,
    normalize_to_precision,
    row_normalize,
    stationary,
)

if TYPE_CHECKING:
    from src.discovery.malicious import DependenceMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SourceProfile:
    """Positive precision tau(s) and negative precision tau~(s) per source."""
    positive_precision: Mapping[str, float]
    negative_precision: Mapping[str, float]

    @property
    def sources(self) -> List[str]:
        return sorted(self.positive_precision)


def positive_agreement(view: DerivedView, s1: str, s2: str, obj: str) -> FrozenSet[str]:
    """Values both sources claim on `obj`."""
    return view.positive(s1, obj) & view.positive(s2, obj)


def negative_agreement(view: DerivedView, s1: str, s2: str, obj: str) -> FrozenSet[str]:
    """Values both sources disclaim on `obj`: U_o minus the union of their claims."""
    return view.universe[obj] - (view.positive(s1, obj) | view.positive(s2, obj))


def _product(conf: Mapping, obj: str, values) -> float:
    result = 1.0
    for value in sorted(values):
        result *= conf[(obj, value)]
    return result


def _positive_term(view, conf, pop, dep, s1: str, s2: str, obj: str) -> float:
    shared = positive_agreement(view, s1, s2, obj)
    if not shared:
        return 0.0
    ratio = len(shared) / len(view.positive(s2, obj))
    doubt = 1.0 - _product(conf.false_conf, obj, shared)
    return ratio * doubt * pop.normalized[obj] * (1.0 - dep.positive.get((s1, obj), 0.0))


def _negative_term(view, conf, pop, dep, s1: str, s2: str, obj: str) -> float:
    disclaimed = view.negative(s2, obj)
    if not disclaimed:
        return 0.0
    shared = negative_agreement(view, s1, s2, obj)
    if not shared:
        return 0.0
    ratio = len(shared) / len(disclaimed)
    doubt = 1.0 - _product(conf.true_conf, obj, shared)
    return ratio * doubt * pop.normalized[obj] * (1.0 - dep.negative.get((s1, obj), 0.0))


def _common_objects(view: DerivedView, s1: str, s2: str) -> List[str]:
    return sorted(view.objects_of_source[s1] & view.objects_of_source[s2])


def positive_endorsement(
    view: DerivedView,
    conf: ConfidenceTable,
    pop: PopularityTable,
    dep: "DependenceMap",
    s1: str,
    s2: str,
) -> float:
    """Endorsement of s2 by s1 on positive claims, summed over common objects."""
    return sum(
        _positive_term(view, conf, pop, dep, s1, s2, obj)
        for obj in _common_objects(view, s1, s2)
    )


def negative_endorsement(
    view: DerivedView,
    conf: ConfidenceTable,
    pop: PopularityTable,
    dep: "DependenceMap",
    s1: str,
    s2: str,
) -> float:
    """Endorsement of s2 by s1 on negative claims; objects where s2 disclaims nothing add 0."""
    return sum(
        _negative_term(view, conf, pop, dep, s1, s2, obj)
        for obj in _common_objects(view, s1, s2)
    )


def _object_terms(view, conf, pop, dep, index, obj) -> List[Tuple[int, int, float, float]]:
    sources = view.ordered_sources(obj)
    terms = []
    for s1 in sources:
        for s2 in sources:
            if s1 == s2:
                continue
            terms.append((
                index[s1],
                index[s2],
                _positive_term(view, conf, pop, dep, s1, s2, obj),
                _negative_term(view, conf, pop, dep, s1, s2, obj),
            ))
    return terms


def supportive_weights(
    view: DerivedView,
    conf: ConfidenceTable,
    pop: PopularityTable,
    dep: "DependenceMap",
    beta: float,
    threads: int = 1,
) -> Tuple[EndorsementGraph, EndorsementGraph]:
    """
    Smoothed, not yet row-normalized +/- supportive graphs.

    weight(s1 -> s2) = beta + (1 - beta) * endorsement / |O_s1 & O_s2|; pairs
    without common objects keep the bare smoothing weight.
    """
    order = view.source_order
    index = {source: i for i, source in enumerate(order)}
    n = len(order)

    positive = np.zeros((n, n))
    negative = np.zeros((n, n))
    common = np.zeros((n, n))

    per_object = ordered_map(
        partial(_object_terms, view, conf, pop, dep, index), view.object_order, threads
    )
    for terms in per_object:
        for i, j, pos_term, neg_term in terms:
            positive[i, j] += pos_term
            negative[i, j] += neg_term
            common[i, j] += 1

    shared = common > 0
    positive_signal = np.divide(positive, common, out=np.zeros_like(positive), where=shared)
    negative_signal = np.divide(negative, common, out=np.zeros_like(negative), where=shared)

    return (
        EndorsementGraph.from_signal(order, positive_signal, beta),
        EndorsementGraph.from_signal(order, negative_signal, beta),
    )


def build_supportive_graphs(
    view: DerivedView,
    conf: ConfidenceTable,
    pop: PopularityTable,
    dep: "DependenceMap",
    beta: float,
    threads: int = 1,
) -> Tuple[EndorsementGraph, EndorsementGraph]:
    """Row-normalized +/- supportive agreement graphs, rebuilt from scratch."""
    positive, negative = supportive_weights(view, conf, pop, dep, beta, threads)
    return row_normalize(positive), row_normalize(negative)


def derive_precision(
    graphs: Tuple[EndorsementGraph, EndorsementGraph],
    pp_max: float,
    np_max: float,
    tol: float = DEFAULT_WALK_TOL,
    max_iters: int = DEFAULT_WALK_MAX_ITERS,
) -> SourceProfile:
    """
    Two-sided precision: walk each supportive graph and anchor the most
    visited source at pp_max (positive) or np_max (negative).
    """
    positive_graph, negative_graph = graphs
    tau = normalize_to_precision(stationary(positive_graph, tol, max_iters), pp_max)
    tau_neg = normalize_to_precision(stationary(negative_graph, tol, max_iters), np_max)

    logger.debug(
        f"Precision range: tau [{min(tau.values()):.4f}, {max(tau.values()):.4f}], "
        f"tau~ [{min(tau_neg.values()):.4f}, {max(tau_neg.values()):.4f}]"
    )
    return SourceProfile(
        positive_precision=MappingProxyType(dict(tau)),
        negative_precision=MappingProxyType(dict(tau_neg)),
    )
