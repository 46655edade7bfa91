"""
Two-sided value confidence: initialization by vote share, smart-vote updates
from source precision, convergence test and truth extraction.
"""

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING, Dict, Mapping, Optional, Sequence

import numpy as np

from src.claims.models import DerivedView, ObjectValue, TruthAssignment

if TYPE_CHECKING:
    from src.discovery.supportive import SourceProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfidenceTable:
    """C_v (true) and C_v~ (false) per (object, value) with v in U_o."""
    true_conf: Mapping[ObjectValue, float]
    false_conf: Mapping[ObjectValue, float]

    def true(self, obj: str, value: str) -> float:
        return self.true_conf[(obj, value)]

    def false(self, obj: str, value: str) -> float:
        return self.false_conf[(obj, value)]

    def max_complement_gap(self) -> float:
        """Largest |C_v + C_v~ - 1| over all values."""
        return max(abs(self.true_conf[key] + self.false_conf[key] - 1.0) for key in self.true_conf)


def initialize_confidence(view: DerivedView) -> ConfidenceTable:
    """C_v = |S_v| / |S_o| and C_v~ = 1 - C_v (majority-vote share)."""
    true_conf: Dict[ObjectValue, float] = {}
    false_conf: Dict[ObjectValue, float] = {}
    for obj in view.object_order:
        n_sources = len(view.sources_of_object[obj])
        for value in view.ordered_values(obj):
            share = len(view.claimers_of_value[(obj, value)]) / n_sources
            true_conf[(obj, value)] = share
            false_conf[(obj, value)] = 1.0 - share
    return ConfidenceTable(MappingProxyType(true_conf), MappingProxyType(false_conf))


def update_confidence(view: DerivedView, profile: "SourceProfile") -> ConfidenceTable:
    """
    Smart vote of every source of o on every value of U_o.

    A claimer adds tau(s) to C_v and 1 - tau(s) to C_v~; a disclaimer adds
    1 - tau~(s) to C_v and tau~(s) to C_v~. Both are divided by |S_o|.
    """
    tau = profile.positive_precision
    tau_neg = profile.negative_precision

    true_conf: Dict[ObjectValue, float] = {}
    false_conf: Dict[ObjectValue, float] = {}
    for obj in view.object_order:
        n_sources = len(view.sources_of_object[obj])
        for value in view.ordered_values(obj):
            key = (obj, value)
            claimers = sorted(view.claimers_of_value[key])
            disclaimers = sorted(view.disclaimers_of_value[key])
            true_score = sum(tau[s] for s in claimers) + sum(1.0 - tau_neg[s] for s in disclaimers)
            false_score = sum(1.0 - tau[s] for s in claimers) + sum(tau_neg[s] for s in disclaimers)
            true_conf[key] = true_score / n_sources
            false_conf[key] = false_score / n_sources
    return ConfidenceTable(MappingProxyType(true_conf), MappingProxyType(false_conf))


def profile_vector(profile: "SourceProfile", order: Sequence[str]) -> np.ndarray:
    """tau over `order` followed by tau~ over `order`."""
    return np.array(
        [profile.positive_precision[s] for s in order]
        + [profile.negative_precision[s] for s in order],
        dtype=float,
    )


def cosine_difference(
    prev: "SourceProfile", curr: "SourceProfile", order: Optional[Sequence[str]] = None
) -> float:
    """1 - cosine similarity of the flattened two-sided precision vectors."""
    order = order or sorted(curr.positive_precision)
    a = profile_vector(prev, order)
    b = profile_vector(curr, order)
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0:
        return float("inf")
    return 1.0 - float(np.dot(a, b)) / norm


def has_converged(prev: "SourceProfile", curr: "SourceProfile", delta: float) -> bool:
    """True iff 1 - cos(prev, curr) < delta."""
    if set(prev.positive_precision) != set(curr.positive_precision):
        raise ValueError("Profiles cover different source sets")
    difference = cosine_difference(prev, curr)
    if difference == float("inf"):
        logger.error("Zero-magnitude precision profile; treating as not converged")
        return False
    return difference < delta


def extract_truths(conf: ConfidenceTable) -> TruthAssignment:
    """V_o* = {v in U_o : C_v > C_v~}; ties are not truths."""
    truths: Dict[str, set] = {}
    for (obj, value), true_score in conf.true_conf.items():
        selected = truths.setdefault(obj, set())
        if true_score > conf.false_conf[(obj, value)]:
            selected.add(value)

    assignment = TruthAssignment(truths=truths)
    empty = assignment.empty_objects()
    if empty:
        preview = ", ".join(empty[:5]) + (" ..." if len(empty) > 5 else "")
        logger.warning(f"{len(empty)} objects have no value judged true: {preview}")
    return assignment
