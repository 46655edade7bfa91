"""
Accuracy and timing metrics against ground truth.

Precision and recall average per-object ratios over objects and over K runs.
The weighted variants replace the 1/|O| factor with each object's popularity
weight, so under uniform popularity they reduce to the plain metrics.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from src.claims.models import TruthAssignment

logger = logging.getLogger(__name__)


class GoldMismatchError(ValueError):
    """Evaluated objects missing from the ground truth."""

    def __init__(self, missing: Iterable[str]):
        self.missing = sorted(missing)
        preview = ", ".join(self.missing[:10]) + (" ..." if len(self.missing) > 10 else "")
        super().__init__(f"{len(self.missing)} objects missing from ground truth: {preview}")


class MetricsReport(BaseModel):
    """Six accuracy metrics plus mean execution time over K runs."""
    method: str = Field(default="", description="Method that produced the predictions")
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    weighted_precision: float = Field(ge=0.0, le=1.0)
    weighted_recall: float = Field(ge=0.0, le=1.0)
    weighted_f1: float = Field(ge=0.0, le=1.0)
    mean_execution_time: float = Field(default=0.0, ge=0.0, description="Seconds")
    runs: int = Field(default=1, ge=1, description="Number of runs K")
    objects: int = Field(default=0, ge=0, description="Evaluated objects")


def _unit(x: float) -> float:
    """Clamp accumulated rounding error back into [0, 1]."""
    return min(1.0, max(0.0, x))


def _object_ratios(pred: TruthAssignment, gold: TruthAssignment, obj: str) -> Tuple[float, float]:
    """(precision, recall) terms of one object; empty predictions score 0 precision."""
    predicted = pred.get(obj)
    expected = gold.get(obj)
    hits = len(predicted & expected)
    precision = hits / len(predicted) if predicted else 0.0
    recall = hits / len(expected) if expected else (1.0 if not predicted else 0.0)
    return precision, recall


def evaluated_objects(
    preds: Sequence[TruthAssignment],
    gold: TruthAssignment,
    objects: Optional[Iterable[str]] = None,
    restrict_to_gold: bool = False,
) -> List[str]:
    """
    Objects a report covers: `objects` if given, else every predicted object.

    Raises:
        GoldMismatchError: unless `restrict_to_gold`, when some object has no gold entry
    """
    if objects is None:
        objects = set().union(*(p.objects for p in preds))
    objects = sorted(set(objects))
    missing = [o for o in objects if o not in gold.truths]
    if missing:
        if not restrict_to_gold:
            raise GoldMismatchError(missing)
        objects = [o for o in objects if o in gold.truths]
    if not objects:
        raise ValueError("No objects to evaluate")
    return objects


def precision_recall(
    preds: Sequence[TruthAssignment],
    gold: TruthAssignment,
    objects: Optional[Iterable[str]] = None,
    restrict_to_gold: bool = False,
) -> Tuple[float, float]:
    """Mean per-object precision and recall over objects and the K runs in `preds`."""
    objects = evaluated_objects(preds, gold, objects, restrict_to_gold)
    total_p = total_r = 0.0
    for pred in preds:
        for obj in objects:
            p, r = _object_ratios(pred, gold, obj)
            total_p += p
            total_r += r
    denominator = len(preds) * len(objects)
    return _unit(total_p / denominator), _unit(total_r / denominator)


def weighted_precision_recall(
    preds: Sequence[TruthAssignment],
    gold: TruthAssignment,
    weights: Mapping[str, float],
    objects: Optional[Iterable[str]] = None,
    restrict_to_gold: bool = False,
) -> Tuple[float, float]:
    """
    Popularity-weighted precision and recall.

    `weights` is the normalized popularity; it is rescaled to sum to 1 over
    the evaluated objects (a no-op when every object is evaluated).
    """
    objects = evaluated_objects(preds, gold, objects, restrict_to_gold)
    mass = sum(weights[o] for o in objects)
    total_p = total_r = 0.0
    for pred in preds:
        run_p = run_r = 0.0
        for obj in objects:
            p, r = _object_ratios(pred, gold, obj)
            run_p += p * weights[obj]
            run_r += r * weights[obj]
        total_p += run_p / mass
        total_r += run_r / mass
    return _unit(total_p / len(preds)), _unit(total_r / len(preds))


def f1(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both inputs are 0."""
    if precision + recall == 0:
        return 0.0
    return _unit(2 * precision * recall / (precision + recall))


def timing(durations: Sequence[float]) -> float:
    """Mean execution time over K >= 1 runs."""
    if not durations:
        raise ValueError("timing needs at least one run")
    return sum(durations) / len(durations)


def evaluate(
    preds: Sequence[TruthAssignment],
    gold: TruthAssignment,
    weights: Mapping[str, float],
    durations: Optional[Sequence[float]] = None,
    objects: Optional[Iterable[str]] = None,
    restrict_to_gold: bool = False,
    method: str = "",
) -> MetricsReport:
    """All six metrics and mean time for K runs of one method."""
    objects = evaluated_objects(preds, gold, objects, restrict_to_gold)
    p, r = precision_recall(preds, gold, objects)
    wp, wr = weighted_precision_recall(preds, gold, weights, objects)
    return MetricsReport(
        method=method,
        precision=p,
        recall=r,
        f1=f1(p, r),
        weighted_precision=wp,
        weighted_recall=wr,
        weighted_f1=f1(wp, wr),
        mean_execution_time=timing(durations) if durations else 0.0,
        runs=len(preds),
        objects=len(objects),
    )


def trace_metrics(
    per_iteration: Sequence[TruthAssignment],
    gold: TruthAssignment,
    objects: Optional[Iterable[str]] = None,
    restrict_to_gold: bool = False,
) -> List[Dict[str, float]]:
    """Precision, recall and F1 of the truths extracted after each outer iteration."""
    rows = []
    for index, truths in enumerate(per_iteration, 1):
        p, r = precision_recall([truths], gold, objects, restrict_to_gold)
        rows.append({"iteration": index, "precision": p, "recall": r, "f1": f1(p, r)})
    return rows


def top_popular_errors(
    pred: TruthAssignment,
    gold: TruthAssignment,
    weights: Mapping[str, float],
    k: int = 20,
) -> List[str]:
    """Among the k most popular ground-truth objects, those predicted incorrectly."""
    ranked = sorted(
        (o for o in gold.truths if o in weights), key=lambda o: (-weights[o], o)
    )[:k]
    return [o for o in ranked if pred.get(o) != gold.get(o)]
