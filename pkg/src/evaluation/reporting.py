"""
Run manifests and result files.

Every TSV starts with comment lines naming the producing version and the
manifest hash, so a results directory can be traced back to (and re-run from)
its manifest.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

from pydantic import BaseModel, Field

from src import __version__
from src.claims.models import TruthAssignment
from src.claims.popularity import PopularityTable
from src.discovery.malicious import DependenceMap
from src.discovery.supportive import SourceProfile
from src.evaluation.metrics import MetricsReport
from src.ingestion.parsers.claim_parser import write_truths

logger = logging.getLogger(__name__)

METRIC_COLUMNS = [
    ("P", "precision"),
    ("R", "recall"),
    ("F1", "f1"),
    ("WP", "weighted_precision"),
    ("WR", "weighted_recall"),
    ("WF1", "weighted_f1"),
    ("T(s)", "mean_execution_time"),
]


class RunManifest(BaseModel):
    """Everything needed to reproduce a results directory."""
    method: str = Field(description="smartmtd, voting, sums or avglog")
    variant: Optional[str] = Field(default=None, description="Engine variant for smartmtd")
    config: Dict = Field(default_factory=dict, description="Engine config snapshot")
    claims_path: str
    gold_path: Optional[str] = None
    delimiter: str = "\t"
    has_header: bool = False
    seed: Optional[int] = None
    output_dir: str
    version: str = __version__

    def digest(self) -> str:
        """Hash of the fields that determine results (not threads, tracing or output dir)."""
        snapshot = self.model_dump(exclude={"output_dir"})
        snapshot["config"] = {
            k: v for k, v in snapshot["config"].items() if k not in ("threads", "record_trace")
        }
        payload = json.dumps(snapshot, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def header_lines(self) -> List[str]:
        return [f"produced-by: mtd-bench {self.version}", f"manifest: {self.digest()}"]

    def write(self, path: Path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.model_dump(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))


def _comments(writer: TextIO, lines: Iterable[str]):
    for line in lines:
        writer.write(f"# {line}\n")


def write_truths_tsv(truths: TruthAssignment, path: Path, header: Sequence[str] = ()):
    with open(path, "w", encoding="utf-8") as f:
        write_truths(truths, f, comments=header)


def write_profile_tsv(profile: SourceProfile, path: Path, header: Sequence[str] = ()):
    """`source_id, tau, tau_tilde` per source."""
    with open(path, "w", encoding="utf-8") as f:
        _comments(f, header)
        f.write("# source_id\ttau\ttau_tilde\n")
        for source in profile.sources:
            f.write(
                f"{source}\t{profile.positive_precision[source]!r}\t"
                f"{profile.negative_precision[source]!r}\n"
            )


def write_dependence_tsv(dependence: DependenceMap, writer: TextIO, header: Sequence[str] = ()):
    """`object_id, source_id, D, D_tilde` per claim pair."""
    _comments(writer, header)
    writer.write("# object_id\tsource_id\tD\tD_tilde\n")
    for obj, source, positive, negative in dependence.rows():
        writer.write(f"{obj}\t{source}\t{positive!r}\t{negative!r}\n")


def write_popularity_tsv(popularity: PopularityTable, writer: TextIO, header: Sequence[str] = ()):
    """`rank, object_id, popularity`, most popular first."""
    _comments(writer, header)
    writer.write("# rank\tobject_id\tpopularity\n")
    for rank, (obj, weight) in enumerate(popularity.ranked(), 1):
        writer.write(f"{rank}\t{obj}\t{weight!r}\n")


def write_trace_tsv(rows: Sequence[Dict], path: Path, header: Sequence[str] = ()):
    """Per-iteration diagnostics; columns taken from the first row."""
    with open(path, "w", encoding="utf-8") as f:
        _comments(f, header)
        if not rows:
            return
        columns = list(rows[0])
        f.write("# " + "\t".join(columns) + "\n")
        for row in rows:
            f.write("\t".join(str(row[c]) for c in columns) + "\n")


def write_key_values(values: Dict, writer: TextIO):
    """Machine-readable `key=value` lines, keys sorted."""
    for key in sorted(values):
        writer.write(f"{key}={values[key]}\n")


def metrics_key_values(report: MetricsReport) -> Dict:
    prefix = f"{report.method}." if report.method else ""
    return {
        f"{prefix}{key}": value
        for key, value in report.model_dump().items()
        if key != "method"
    }


def format_metrics_table(reports: Sequence[MetricsReport]) -> str:
    """Human-readable comparison table, one row per method."""
    width = max([len("Method")] + [len(r.method) for r in reports])
    header = f"{'Method':<{width}} | " + " | ".join(f"{label:>6}" for label, _ in METRIC_COLUMNS)
    lines = [header, "-" * len(header)]
    for report in reports:
        cells = []
        for _, attr in METRIC_COLUMNS:
            cells.append(f"{getattr(report, attr):>6.3f}")
        lines.append(f"{report.method:<{width}} | " + " | ".join(cells))
    return "\n".join(lines)
