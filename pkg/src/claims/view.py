"""Derivation of universes, negative claims and reverse indexes from a claim table."""

import logging
from types import MappingProxyType
from typing import Dict, Set

from src.claims.models import ClaimTable, DerivedView, EmptyClaimsError

logger = logging.getLogger(__name__)


def derive_view(claims: ClaimTable) -> DerivedView:
    """
    Derive the mutual-exclusion view of a claim table.

    A source claiming V on object o implicitly disclaims U_o - V, where U_o is
    every value any source claims on o.

    Args:
        claims: Non-empty claim table

    Returns:
        DerivedView with every index populated
    """
    if not claims.positive_claims:
        raise EmptyClaimsError("Cannot derive a view from an empty claim table")

    universe: Dict[str, Set[str]] = {}
    sources_of_object: Dict[str, Set[str]] = {}
    objects_of_source: Dict[str, Set[str]] = {}

    for (source, obj), values in claims.positive_claims.items():
        universe.setdefault(obj, set()).update(values)
        sources_of_object.setdefault(obj, set()).add(source)
        objects_of_source.setdefault(source, set()).add(obj)

    negative_claims = {
        (source, obj): frozenset(universe[obj] - values)
        for (source, obj), values in claims.positive_claims.items()
    }

    claimers_of_value: Dict[tuple, Set[str]] = {}
    disclaimers_of_value: Dict[tuple, Set[str]] = {}
    for obj, values in universe.items():
        for value in values:
            claimers_of_value[(obj, value)] = set()
            disclaimers_of_value[(obj, value)] = set()
        for source in sources_of_object[obj]:
            claimed = claims.positive_claims[(source, obj)]
            for value in values:
                if value in claimed:
                    claimers_of_value[(obj, value)].add(source)
                else:
                    disclaimers_of_value[(obj, value)].add(source)

    n_objects = len(claims.objects)
    coverage = {source: len(objs) / n_objects for source, objs in objects_of_source.items()}

    logger.debug(
        f"Derived view: {len(claims.sources)} sources, {n_objects} objects, "
        f"{len(claimers_of_value)} candidate values"
    )

    def frozen(mapping: dict) -> MappingProxyType:
        return MappingProxyType({key: frozenset(items) for key, items in mapping.items()})

    return DerivedView(
        claims=claims,
        universe=frozen(universe),
        negative_claims=MappingProxyType(negative_claims),
        sources_of_object=frozen(sources_of_object),
        claimers_of_value=frozen(claimers_of_value),
        disclaimers_of_value=frozen(disclaimers_of_value),
        objects_of_source=frozen(objects_of_source),
        coverage=MappingProxyType(coverage),
        source_order=tuple(sorted(claims.sources)),
        object_order=tuple(sorted(claims.objects)),
    )
