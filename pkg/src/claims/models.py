"""
Claim data model: raw positive claims, the derived mutual-exclusion view and
truth assignments.

All containers are immutable after construction and safe to share between
threads.
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, Tuple


SourceObject = Tuple[str, str]
ObjectValue = Tuple[str, str]


class EmptyClaimsError(ValueError):
    """Raised when a claim table would contain no claims at all."""


def canonicalize_value(value: str) -> str:
    """Trim and case-fold a claimed value; values are compared as atomic symbols."""
    return value.strip().casefold()


def canonicalize_id(identifier: str) -> str:
    return identifier.strip()


@dataclass(frozen=True)
class ClaimTable:
    """
    Raw positive claims: which source asserts which values on which object.

    `positive_claims` maps (source, object) to a non-empty frozenset of
    canonical values.
    """
    objects: FrozenSet[str]
    sources: FrozenSet[str]
    positive_claims: Mapping[SourceObject, FrozenSet[str]]

    def __post_init__(self):
        if not self.positive_claims:
            raise EmptyClaimsError("Claim table contains no claims")
        for (source, obj), values in self.positive_claims.items():
            if not values:
                raise ValueError(f"Empty value set for ({source!r}, {obj!r})")
            if source not in self.sources:
                raise ValueError(f"Source {source!r} missing from source set")
            if obj not in self.objects:
                raise ValueError(f"Object {obj!r} missing from object set")
        object.__setattr__(self, "positive_claims", MappingProxyType(dict(self.positive_claims)))

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[str, str, str]]) -> "ClaimTable":
        """
        Build a table from (source_id, object_id, value) rows.

        Identifiers are trimmed, values canonicalized; duplicate rows collapse and
        several rows for one (source, object) accumulate into one value set.
        """
        accumulated: Dict[SourceObject, set] = {}
        for source, obj, value in rows:
            key = (canonicalize_id(source), canonicalize_id(obj))
            accumulated.setdefault(key, set()).add(canonicalize_value(value))

        if not accumulated:
            raise EmptyClaimsError("No claim rows provided")

        return cls(
            objects=frozenset(obj for _, obj in accumulated),
            sources=frozenset(source for source, _ in accumulated),
            positive_claims={key: frozenset(values) for key, values in accumulated.items()},
        )

    def rows(self) -> List[Tuple[str, str, str]]:
        """All (source, object, value) rows in lexicographic order."""
        return sorted(
            (source, obj, value)
            for (source, obj), values in self.positive_claims.items()
            for value in values
        )

    def __len__(self) -> int:
        return sum(len(values) for values in self.positive_claims.values())


@dataclass(frozen=True)
class DerivedView:
    """
    Per-object universes, mutual-exclusion negative claims and reverse indexes.

    Built once by `derive_view`; `source_order` and `object_order` fix the
    lexicographic iteration order used everywhere downstream.
    """
    claims: ClaimTable
    universe: Mapping[str, FrozenSet[str]]
    negative_claims: Mapping[SourceObject, FrozenSet[str]]
    sources_of_object: Mapping[str, FrozenSet[str]]
    claimers_of_value: Mapping[ObjectValue, FrozenSet[str]]
    disclaimers_of_value: Mapping[ObjectValue, FrozenSet[str]]
    objects_of_source: Mapping[str, FrozenSet[str]]
    coverage: Mapping[str, float]
    source_order: Tuple[str, ...] = field(default=())
    object_order: Tuple[str, ...] = field(default=())

    def positive(self, source: str, obj: str) -> FrozenSet[str]:
        return self.claims.positive_claims[(source, obj)]

    def negative(self, source: str, obj: str) -> FrozenSet[str]:
        return self.negative_claims[(source, obj)]

    def ordered_sources(self, obj: str) -> List[str]:
        """Sources claiming on `obj`, in lexicographic order."""
        return sorted(self.sources_of_object[obj])

    def ordered_values(self, obj: str) -> List[str]:
        return sorted(self.universe[obj])


@dataclass(frozen=True)
class TruthAssignment:
    """Identified (or ground-truth) value set per object. Sets may be empty."""
    truths: Mapping[str, FrozenSet[str]]

    def __post_init__(self):
        object.__setattr__(
            self, "truths", MappingProxyType({o: frozenset(v) for o, v in self.truths.items()})
        )

    def get(self, obj: str) -> FrozenSet[str]:
        return self.truths.get(obj, frozenset())

    @property
    def objects(self) -> FrozenSet[str]:
        return frozenset(self.truths)

    def empty_objects(self) -> List[str]:
        return sorted(o for o, values in self.truths.items() if not values)

    def rows(self) -> List[Tuple[str, str]]:
        return sorted((o, v) for o, values in self.truths.items() for v in values)
