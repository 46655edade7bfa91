"""
Sums and Average-Log with mutual exclusion.

Source trust and value scores reinforce each other; each value collects a
claim score from its claimers and a disclaim score from its disclaimers, and
is judged true when the claim score is larger.
"""

import logging
import math
from typing import Callable, Dict, Tuple

from src.claims.models import DerivedView, ObjectValue, TruthAssignment

logger = logging.getLogger(__name__)

DEFAULT_ITERS = 100
DEFAULT_TOL = 1e-4

Scores = Dict[ObjectValue, float]


def _value_scores(view: DerivedView, trust: Dict[str, float]) -> Tuple[Scores, Scores]:
    """Claim and disclaim scores, both divided by their common maximum."""
    claim: Scores = {}
    disclaim: Scores = {}
    for obj in view.object_order:
        for value in view.ordered_values(obj):
            key = (obj, value)
            claim[key] = sum(trust[s] for s in sorted(view.claimers_of_value[key]))
            disclaim[key] = sum(trust[s] for s in sorted(view.disclaimers_of_value[key]))

    top = max(max(claim.values()), max(disclaim.values()))
    if top > 0:
        claim = {key: score / top for key, score in claim.items()}
        disclaim = {key: score / top for key, score in disclaim.items()}
    return claim, disclaim


def _claimed_scores(view: DerivedView, claim: Scores, source: str):
    return [
        claim[(obj, value)]
        for obj in sorted(view.objects_of_source[source])
        for value in sorted(view.positive(source, obj))
    ]


def _sums_trust(view: DerivedView, claim: Scores, source: str) -> float:
    return sum(_claimed_scores(view, claim, source))


def _avg_log_trust(view: DerivedView, claim: Scores, source: str) -> float:
    scores = _claimed_scores(view, claim, source)
    return math.log(len(view.objects_of_source[source])) * sum(scores) / len(scores)


def _iterate_trust(
    view: DerivedView,
    trust_fn: Callable[[DerivedView, Scores, str], float],
    iters: int,
    tol: float,
    name: str,
) -> Dict[str, float]:
    trust = {source: 1.0 for source in view.source_order}

    for iteration in range(1, iters + 1):
        claim, _ = _value_scores(view, trust)
        raw = {source: trust_fn(view, claim, source) for source in view.source_order}
        top = max(raw.values())
        # all-zero trust (every source covers one object under Average-Log) keeps the old trust
        updated = {s: score / top for s, score in raw.items()} if top > 0 else dict(trust)

        change = max(abs(updated[s] - trust[s]) for s in view.source_order)
        trust = updated
        if change < tol:
            logger.info(f"{name} converged after {iteration} iterations")
            break
    else:
        logger.warning(f"{name} stopped after {iters} iterations without converging")
    return trust


def _decide(view: DerivedView, trust: Dict[str, float]) -> TruthAssignment:
    claim, disclaim = _value_scores(view, trust)
    truths: Dict[str, set] = {obj: set() for obj in view.object_order}
    for (obj, value), score in claim.items():
        if score > disclaim[(obj, value)]:
            truths[obj].add(value)
    return TruthAssignment(truths=truths)


def sums_trust(
    view: DerivedView, iters: int = DEFAULT_ITERS, tol: float = DEFAULT_TOL
) -> Dict[str, float]:
    """Max-normalized Sums trust per source after at most `iters` rounds."""
    return _iterate_trust(view, _sums_trust, iters, tol, "Sums")


def avg_log_trust(
    view: DerivedView, iters: int = DEFAULT_ITERS, tol: float = DEFAULT_TOL
) -> Dict[str, float]:
    return _iterate_trust(view, _avg_log_trust, iters, tol, "Average-Log")


def sums(
    view: DerivedView, iters: int = DEFAULT_ITERS, tol: float = DEFAULT_TOL
) -> TruthAssignment:
    """Sums: source trust is the sum of its claimed values' scores."""
    return _decide(view, sums_trust(view, iters, tol))


def avg_log(
    view: DerivedView, iters: int = DEFAULT_ITERS, tol: float = DEFAULT_TOL
) -> TruthAssignment:
    """Average-Log: source trust is log(|O_s|) times the mean claimed-value score."""
    return _decide(view, avg_log_trust(view, iters, tol))
