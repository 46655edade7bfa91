"""Majority voting over joint value sets."""

import logging
from collections import Counter

from src.claims.models import DerivedView, TruthAssignment

logger = logging.getLogger(__name__)


def _set_key(values) -> str:
    return "\x1f".join(sorted(values))


def voting(view: DerivedView) -> TruthAssignment:
    """
    Per object, the exact claimed value set shared by the most sources.

    Each source's positive claims are treated as one joint value, so partially
    overlapping sets do not support each other. Ties go to the
    lexicographically smallest serialized set.
    """
    truths = {}
    for obj in view.object_order:
        counts = Counter(
            frozenset(view.positive(source, obj)) for source in view.ordered_sources(obj)
        )
        best = min(counts.items(), key=lambda item: (-item[1], _set_key(item[0])))
        truths[obj] = best[0]
    logger.info(f"Voting selected value sets for {len(truths)} objects")
    return TruthAssignment(truths=truths)
