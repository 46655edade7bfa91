"""
Iterative multi-truth discovery.

Each outer iteration detects copying on every object, rebuilds the supportive
graphs with the fresh dependence scores, derives two-sided source precision
and re-scores every value. The loop stops when the cosine difference between
successive precision profiles drops below delta.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from src.claims.models import ClaimTable, DerivedView, TruthAssignment
from src.claims.popularity import PopularityTable, compute_popularity, uniform_popularity
from src.claims.view import derive_view
from src.config.constants import ENGINE_DEFAULTS
from src.discovery.confidence import (
    ConfidenceTable,
    cosine_difference,
    extract_truths,
    has_converged,
    initialize_confidence,
    update_confidence,
)
from src.discovery.malicious import DependenceMap, derive_dependence, zero_dependence
from src.discovery.supportive import SourceProfile, build_supportive_graphs, derive_precision

logger = logging.getLogger(__name__)

Variant = Literal["full", "core", "copy", "popularity"]

VARIANT_SWITCHES = {
    "full": {"use_copy_detection": True, "use_popularity": True},
    "core": {"use_copy_detection": False, "use_popularity": False},
    "copy": {"use_copy_detection": True, "use_popularity": False},
    "popularity": {"use_copy_detection": False, "use_popularity": True},
}


class EngineConfig(BaseModel):
    """Engine parameters with validation of every bound."""
    beta: float = Field(
        default=ENGINE_DEFAULTS["beta"], gt=0.0, lt=1.0, description="Smoothing factor"
    )
    delta: float = Field(
        default=ENGINE_DEFAULTS["delta"], gt=0.0, description="Cosine-difference threshold"
    )
    pp_max: float = Field(default=ENGINE_DEFAULTS["anchors"]["pp_max"], gt=0.0, le=1.0)
    np_max: float = Field(default=ENGINE_DEFAULTS["anchors"]["np_max"], gt=0.0, le=1.0)
    pc_max: float = Field(default=ENGINE_DEFAULTS["anchors"]["pc_max"], gt=0.0, le=1.0)
    nc_max: float = Field(default=ENGINE_DEFAULTS["anchors"]["nc_max"], gt=0.0, le=1.0)
    max_outer_iters: int = Field(default=ENGINE_DEFAULTS["max_outer_iters"], ge=1)
    walk_tol: float = Field(default=ENGINE_DEFAULTS["walk"]["tol"], gt=0.0)
    walk_max_iters: int = Field(default=ENGINE_DEFAULTS["walk"]["max_iters"], ge=1)
    threads: int = Field(default=ENGINE_DEFAULTS["threads"], ge=1, description="Worker threads")
    use_copy_detection: bool = Field(default=True, description="Build malicious agreement graphs")
    use_popularity: bool = Field(default=True, description="Weight objects by popularity")
    record_trace: bool = Field(default=False, description="Keep per-iteration snapshots")

    @classmethod
    def for_variant(cls, variant: Variant, **overrides) -> "EngineConfig":
        """Config for a named variant: full, core, copy (detection only) or popularity only."""
        if variant not in VARIANT_SWITCHES:
            raise ValueError(f"Unknown variant '{variant}'")
        return cls(**{**overrides, **VARIANT_SWITCHES[variant]})

    @property
    def variant(self) -> str:
        for name, switches in VARIANT_SWITCHES.items():
            if (self.use_copy_detection, self.use_popularity) == (
                switches["use_copy_detection"], switches["use_popularity"]
            ):
                return name
        return "full"


@dataclass(frozen=True)
class IterationRecord:
    """Snapshot of one outer iteration."""
    iteration: int
    difference: Optional[float]
    profile: SourceProfile
    confidence: ConfidenceTable
    dependence: DependenceMap


@dataclass
class RunResult:
    truths: TruthAssignment
    profile: SourceProfile
    dependence: DependenceMap
    confidence: ConfidenceTable
    iterations: int
    converged: bool
    final_difference: Optional[float]
    popularity: PopularityTable
    wall_time: float = 0.0
    trace: List[IterationRecord] = field(default_factory=list)


def run(claims: ClaimTable, config: Optional[EngineConfig] = None) -> RunResult:
    """
    Run the full discovery loop on a claim table.

    Returns the final truths, profile, dependence map and confidence table.
    Exhausting `max_outer_iters` returns the last state with `converged`
    False. Walk non-convergence propagates as WalkConvergenceError.
    """
    config = config or EngineConfig()
    started = time.perf_counter()

    view = derive_view(claims)
    logger.info(f"\n{'='*80}\nTRUTH DISCOVERY ({config.variant})\n{'='*80}")
    logger.info(
        f"📥 {len(view.source_order)} sources, {len(view.object_order)} objects, "
        f"{len(claims)} claims"
    )

    popularity = compute_popularity(view) if config.use_popularity else uniform_popularity(view)
    confidence = initialize_confidence(view)

    previous: Optional[SourceProfile] = None
    profile: Optional[SourceProfile] = None
    dependence: Optional[DependenceMap] = None
    difference: Optional[float] = None
    converged = False
    trace: List[IterationRecord] = []
    iteration = 0

    for iteration in range(1, config.max_outer_iters + 1):
        dependence = _dependence_pass(view, confidence, config, iteration)
        assert dependence.generation == iteration, "stale dependence map"

        graphs = build_supportive_graphs(
            view, confidence, popularity, dependence, config.beta, config.threads
        )
        profile = derive_precision(
            graphs, config.pp_max, config.np_max, config.walk_tol, config.walk_max_iters
        )
        confidence = update_confidence(view, profile)

        difference = cosine_difference(previous, profile, view.source_order) if previous else None
        if config.record_trace:
            trace.append(IterationRecord(iteration, difference, profile, confidence, dependence))

        shown = f"{difference:.3e}" if difference is not None else "n/a"
        logger.info(f"Iteration {iteration}: cosine difference {shown}")

        if previous is not None and has_converged(previous, profile, config.delta):
            converged = True
            break
        previous = profile

    truths = extract_truths(confidence)
    wall_time = time.perf_counter() - started

    if converged:
        logger.info(f"✅ Converged after {iteration} iterations in {wall_time:.2f}s")
    else:
        logger.warning(f"Stopped after {iteration} iterations without converging")
    logger.info(f"{'='*80}\n")

    return RunResult(
        truths=truths,
        profile=profile,
        dependence=dependence,
        confidence=confidence,
        iterations=iteration,
        converged=converged,
        final_difference=difference,
        popularity=popularity,
        wall_time=wall_time,
        trace=trace,
    )


def _dependence_pass(
    view: DerivedView, confidence: ConfidenceTable, config: EngineConfig, iteration: int
) -> DependenceMap:
    if not config.use_copy_detection:
        return zero_dependence(view, generation=iteration)
    return derive_dependence(
        view,
        confidence,
        config.pc_max,
        config.nc_max,
        config.beta,
        config.walk_tol,
        config.walk_max_iters,
        threads=config.threads,
        generation=iteration,
    )
