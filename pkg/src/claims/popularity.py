"""Object popularity from occurrence frequency weighted by inverse source coverage."""

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import List, Mapping, Tuple

from src.claims.models import DerivedView

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PopularityTable:
    """Unnormalized (sum of 1/Cov) and normalized (sums to 1) popularity per object."""
    unnormalized: Mapping[str, float]
    normalized: Mapping[str, float]

    def ranked(self) -> List[Tuple[str, float]]:
        """Objects by descending normalized popularity, ties by identifier."""
        return sorted(self.normalized.items(), key=lambda item: (-item[1], item[0]))


def compute_popularity(view: DerivedView) -> PopularityTable:
    """
    Popularity of each object: every claiming source casts a vote worth
    1 / Cov(s), so votes from low-coverage sources count more.

    Computed once, before the iterative phase.
    """
    unnormalized = {}
    for obj in view.object_order:
        unnormalized[obj] = sum(
            1.0 / view.coverage[source] for source in view.ordered_sources(obj)
        )

    total = sum(unnormalized[obj] for obj in view.object_order)
    normalized = {obj: unnormalized[obj] / total for obj in view.object_order}

    top = max(normalized.values())
    logger.info(f"Computed popularity for {len(normalized)} objects (max {top:.4f})")

    return PopularityTable(
        unnormalized=MappingProxyType(unnormalized),
        normalized=MappingProxyType(normalized),
    )


def uniform_popularity(view: DerivedView) -> PopularityTable:
    """Every object weighted 1/|O|; used by the variants without popularity."""
    n_objects = len(view.object_order)
    weights = {obj: 1.0 / n_objects for obj in view.object_order}
    return PopularityTable(
        unnormalized=MappingProxyType({obj: 1.0 for obj in view.object_order}),
        normalized=MappingProxyType(weights),
    )
