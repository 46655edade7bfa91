"""
Parser and writer for claim files and ground-truth files.

Claim file: UTF-8, delimiter-separated (tab by default), columns
`source_id, object_id, value`, one claimed value per row, optional header.
Ground-truth file: the same shape without `source_id`.
Lines starting with the comment prefix and blank lines are skipped.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, TextIO, Tuple

from pydantic import BaseModel, Field

from src.claims.models import (
    ClaimTable,
    EmptyClaimsError,
    TruthAssignment,
    canonicalize_id,
    canonicalize_value,
)

logger = logging.getLogger(__name__)


class ClaimParseError(ValueError):
    """Malformed row in a claim or ground-truth file."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ClaimFileFormat(BaseModel):
    """Descriptor of a delimiter-separated claim file."""
    delimiter: str = Field(default="\t", min_length=1, description="Column delimiter")
    has_header: bool = Field(default=False, description="First data line is a header")
    comment_prefix: str = Field(default="#", description="Lines starting with this are skipped")


class ClaimFileParser:
    """Parse claim and ground-truth rows from a line-oriented stream."""

    CLAIM_HEADER = ("source_id", "object_id", "value")
    TRUTH_HEADER = ("object_id", "value")

    def __init__(self, fmt: Optional[ClaimFileFormat] = None):
        self.fmt = fmt or ClaimFileFormat()

    def iter_rows(self, reader: Iterable[str], n_columns: int) -> Iterator[Tuple[str, ...]]:
        """Yield split rows, checking the column count of every data line."""
        header_pending = self.fmt.has_header
        for line_number, line in enumerate(reader, 1):
            stripped = line.rstrip("\r\n")
            if not stripped.strip():
                continue
            if self.fmt.comment_prefix and stripped.startswith(self.fmt.comment_prefix):
                continue
            if header_pending:
                header_pending = False
                continue

            columns = stripped.split(self.fmt.delimiter)
            if len(columns) != n_columns:
                raise ClaimParseError(
                    f"expected {n_columns} columns, found {len(columns)}", line_number
                )
            if any(not column.strip() for column in columns):
                raise ClaimParseError("empty column", line_number)
            yield tuple(columns)

    def parse_claims(self, reader: Iterable[str]) -> ClaimTable:
        rows = list(self.iter_rows(reader, 3))
        if not rows:
            raise EmptyClaimsError("Claim stream contains no rows")
        table = ClaimTable.from_rows(rows)
        logger.info(
            f"Parsed {len(rows)} claim rows: {len(table.sources)} sources, "
            f"{len(table.objects)} objects, {len(table)} distinct claims"
        )
        return table

    def parse_ground_truth(self, reader: Iterable[str]) -> TruthAssignment:
        truths: Dict[str, set] = {}
        for obj, value in self.iter_rows(reader, 2):
            truths.setdefault(canonicalize_id(obj), set()).add(canonicalize_value(value))
        if not truths:
            raise EmptyClaimsError("Ground-truth stream contains no rows")
        logger.info(f"Parsed ground truth for {len(truths)} objects")
        return TruthAssignment(truths=truths)


def ingest_claims(reader: Iterable[str], fmt: Optional[ClaimFileFormat] = None) -> ClaimTable:
    """Read a claim table from a line-oriented stream."""
    return ClaimFileParser(fmt).parse_claims(reader)


def ingest_ground_truth(
    reader: Iterable[str], fmt: Optional[ClaimFileFormat] = None
) -> TruthAssignment:
    return ClaimFileParser(fmt).parse_ground_truth(reader)


def load_claims(path: Path, fmt: Optional[ClaimFileFormat] = None) -> ClaimTable:
    with open(path, "r", encoding="utf-8") as f:
        return ingest_claims(f, fmt)


def read_comment_fields(path: Path, fmt: Optional[ClaimFileFormat] = None) -> Dict[str, str]:
    """`key: value` pairs from the comment lines heading a file (e.g. `# seed: 7`)."""
    prefix = (fmt or ClaimFileFormat()).comment_prefix
    fields: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not prefix or not line.startswith(prefix):
                break
            key, sep, value = line[len(prefix):].partition(":")
            if sep:
                fields[key.strip()] = value.strip()
    return fields


def load_ground_truth(path: Path, fmt: Optional[ClaimFileFormat] = None) -> TruthAssignment:
    with open(path, "r", encoding="utf-8") as f:
        return ingest_ground_truth(f, fmt)


def _write_rows(
    rows: List[Tuple[str, ...]],
    writer: TextIO,
    fmt: ClaimFileFormat,
    header: Tuple[str, ...],
    comments: Iterable[str] = (),
):
    for comment in comments:
        writer.write(f"{fmt.comment_prefix} {comment}\n")
    if fmt.has_header:
        writer.write(fmt.delimiter.join(header) + "\n")
    for row in rows:
        writer.write(fmt.delimiter.join(row) + "\n")


def write_claims(
    claims: ClaimTable,
    writer: TextIO,
    fmt: Optional[ClaimFileFormat] = None,
    comments: Iterable[str] = (),
):
    """Serialize a claim table; rows are sorted so output is byte-stable."""
    _write_rows(
        claims.rows(), writer, fmt or ClaimFileFormat(), ClaimFileParser.CLAIM_HEADER, comments
    )


def write_truths(
    truths: TruthAssignment,
    writer: TextIO,
    fmt: Optional[ClaimFileFormat] = None,
    comments: Iterable[str] = (),
):
    """Serialize a truth assignment in ground-truth file shape."""
    _write_rows(
        truths.rows(), writer, fmt or ClaimFileFormat(), ClaimFileParser.TRUTH_HEADER, comments
    )
