"""
Synthetic multi-truth datasets with planted ground truth.

Sources come in three roles: honest sources claim each true value with their
positive precision (otherwise a value from the object's false pool takes its
place) and drop claimed truths with probability 1 - negative precision; one
faulty victim does the same with a lower precision; copiers replicate the
victim's claims value by value with probability `copy_fidelity` and fill in
with true values of their own. Object coverage follows a power law over
object rank, giving a long tail of objects claimed by few sources.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Set, Tuple

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, Field

from src.claims.models import ClaimTable, TruthAssignment
from src.ingestion.parsers.claim_parser import write_claims, write_truths

logger = logging.getLogger(__name__)


class InfeasibleSpecError(ValueError):
    """The requested dataset cannot be generated."""


class SynthSpec(BaseModel):
    """Parameters of a synthetic dataset; the same spec always yields the same data."""
    n_objects: int = Field(default=20, ge=1)
    n_sources: int = Field(default=15, ge=1, description="All sources, copiers included")
    truths_min: int = Field(default=1, ge=1, description="Fewest true values per object")
    truths_max: int = Field(default=3, ge=1, description="Most true values per object")
    false_pool_size: int = Field(default=10, ge=1, description="False candidates per object")
    honest_positive_precision: float = Field(default=0.9, ge=0.0, le=1.0)
    honest_negative_precision: float = Field(default=0.9, ge=0.0, le=1.0)
    victim_positive_precision: float = Field(default=0.5, ge=0.0, le=1.0)
    n_copiers: int = Field(default=0, ge=0)
    copy_fidelity: float = Field(default=0.9, ge=0.0, le=1.0)
    coverage_skew: float = Field(
        default=0.0, ge=0.0, description="Power-law exponent over object rank"
    )
    min_sources_per_object: int = Field(default=3, ge=1)
    quality_popularity_correlation: float = Field(
        default=0.0, ge=0.0, le=1.0,
        description="How much source precision drops on less covered objects",
    )
    rng_seed: int = 0


def source_ids(spec: SynthSpec) -> List[str]:
    return [f"src-{i:03d}" for i in range(1, spec.n_sources + 1)]


def source_roles(spec: SynthSpec) -> Dict[str, str]:
    """honest / victim / copier per source; copiers are the last ids, the victim just before."""
    ids = source_ids(spec)
    n_independent = spec.n_sources - spec.n_copiers
    roles = {}
    for i, source in enumerate(ids):
        if i >= n_independent:
            roles[source] = "copier"
        elif spec.n_copiers and i == n_independent - 1:
            roles[source] = "victim"
        else:
            roles[source] = "honest"
    return roles


def check_feasible(spec: SynthSpec):
    n_independent = spec.n_sources - spec.n_copiers
    if spec.truths_max < spec.truths_min:
        raise InfeasibleSpecError(
            f"truths_max ({spec.truths_max}) is below truths_min ({spec.truths_min})"
        )
    if spec.false_pool_size < spec.truths_max:
        raise InfeasibleSpecError(
            f"false_pool_size ({spec.false_pool_size}) is smaller than truths_max "
            f"({spec.truths_max}); every true value needs a distinct false substitute"
        )
    if spec.n_copiers and n_independent < 2:
        raise InfeasibleSpecError(
            f"{spec.n_copiers} copiers among {spec.n_sources} sources leaves no honest source "
            f"besides the victim"
        )
    if n_independent < 1:
        raise InfeasibleSpecError("At least one non-copier source is required")
    if spec.min_sources_per_object > n_independent:
        raise InfeasibleSpecError(
            f"min_sources_per_object ({spec.min_sources_per_object}) exceeds the "
            f"{n_independent} non-copier sources"
        )


def _independent_claims(
    rng: np.random.Generator,
    true_values: List[str],
    false_values: List[str],
    positive_precision: float,
    negative_precision: float,
) -> Set[str]:
    claimed: Set[str] = set()
    pool = list(false_values)
    for value in true_values:
        if rng.random() < positive_precision:
            claimed.add(value)
        else:
            substitute = pool.pop(int(rng.integers(len(pool))))
            claimed.add(substitute)

    for value in sorted(claimed & set(true_values)):
        if rng.random() >= negative_precision:
            claimed.discard(value)

    if not claimed:
        claimed.add(true_values[int(rng.integers(len(true_values)))])
    return claimed


def generate(spec: SynthSpec) -> Tuple[ClaimTable, TruthAssignment]:
    """
    Generate a claim table and its planted ground truth.

    Raises:
        InfeasibleSpecError: when the spec cannot be satisfied
    """
    check_feasible(spec)
    rng = np.random.default_rng(spec.rng_seed)

    ids = source_ids(spec)
    roles = source_roles(spec)
    independent = [s for s in ids if roles[s] != "copier"]
    honest = [s for s in ids if roles[s] == "honest"]
    copiers = [s for s in ids if roles[s] == "copier"]
    victim = next((s for s in ids if roles[s] == "victim"), None)

    rows: List[Tuple[str, str, str]] = []
    gold: Dict[str, frozenset] = {}

    for rank in range(spec.n_objects):
        obj = f"obj-{rank + 1:04d}"
        relative = (rank + 1) ** (-spec.coverage_skew)
        quality = 1.0 - spec.quality_popularity_correlation * (1.0 - relative)

        n_true = int(rng.integers(spec.truths_min, spec.truths_max + 1))
        labels = [f"val-{j:02d}" for j in range(n_true + spec.false_pool_size)]
        order = rng.permutation(len(labels))
        true_values = sorted(labels[i] for i in order[:n_true])
        false_values = sorted(labels[i] for i in order[n_true:])

        n_cover = min(
            len(independent),
            max(spec.min_sources_per_object, math.ceil(len(independent) * relative)),
        )
        covering = sorted(
            independent[i] for i in rng.choice(len(independent), size=n_cover, replace=False)
        )

        claims: Dict[str, Set[str]] = {}
        for source in covering:
            precision = (
                spec.victim_positive_precision if source == victim
                else spec.honest_positive_precision
            )
            claims[source] = _independent_claims(
                rng,
                true_values,
                false_values,
                precision * quality,
                spec.honest_negative_precision * quality,
            )

        if victim in claims:
            victim_claims = sorted(claims[victim])
            for copier in copiers:
                copied = {v for v in victim_claims if rng.random() < spec.copy_fidelity}
                own = _independent_claims(
                    rng,
                    true_values,
                    false_values,
                    spec.honest_positive_precision * quality,
                    spec.honest_negative_precision * quality,
                )
                claims[copier] = copied | (own & set(true_values)) or own

        claimed = set().union(*claims.values())
        for value in true_values:
            if value not in claimed:
                holders = [s for s in covering if s in honest] or covering
                claims[holders[int(rng.integers(len(holders)))]].add(value)

        gold[obj] = frozenset(true_values)
        for source in sorted(claims):
            for value in sorted(claims[source]):
                rows.append((source, obj, value))

    table = ClaimTable.from_rows(rows)
    logger.info(
        f"Generated {len(rows)} claims: {len(table.sources)} sources "
        f"({len(copiers)} copiers), {len(table.objects)} objects, seed {spec.rng_seed}"
    )
    return table, TruthAssignment(truths=gold)


def load_spec(path: Path, **overrides) -> SynthSpec:
    """Read a flat `key=value` spec file; explicit overrides win."""
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    return SynthSpec(**{**values, **overrides})


def write_dataset(claims: ClaimTable, gold: TruthAssignment, out_dir: Path, comments=()):
    """Write `claims.tsv` and `gold.tsv` into `out_dir`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "claims.tsv", "w", encoding="utf-8") as f:
        write_claims(claims, f, comments=comments)
    with open(out_dir / "gold.tsv", "w", encoding="utf-8") as f:
        write_truths(gold, f, comments=comments)
    logger.info(f"Saved synthetic dataset to {out_dir}")
