"""Shared fixtures: the three-source cast-list example used across test modules."""

import pytest

from src.claims.models import ClaimTable
from src.claims.view import derive_view

MOVIE = "Harry Potter"

CAST_ROWS = [
    ("s1", MOVIE, "Daniel Radcliffe"),
    ("s1", MOVIE, "Emma Watson"),
    ("s1", MOVIE, "Rupert Grint"),
    ("s2", MOVIE, "Emma Watson"),
    ("s2", MOVIE, "Rupert Grint"),
    ("s3", MOVIE, "Daniel Radcliffe"),
    ("s3", MOVIE, "Emma Watson"),
    ("s3", MOVIE, "Jonny Depp"),
]


@pytest.fixture
def cast_rows():
    return list(CAST_ROWS)


@pytest.fixture
def cast_claims():
    return ClaimTable.from_rows(CAST_ROWS)


@pytest.fixture
def cast_view(cast_claims):
    return derive_view(cast_claims)
