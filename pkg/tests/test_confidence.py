"""Tests for confidence initialization, smart-vote updates, convergence and truth extraction."""

import logging
from types import MappingProxyType

import pytest

from src.claims.models import ClaimTable
from src.claims.view import derive_view
from src.discovery.confidence import (
    ConfidenceTable,
    cosine_difference,
    extract_truths,
    has_converged,
    initialize_confidence,
    update_confidence,
)
from src.discovery.supportive import SourceProfile

MOVIE = "Harry Potter"


def profile(tau, tau_neg):
    return SourceProfile(MappingProxyType(dict(tau)), MappingProxyType(dict(tau_neg)))


class TestInitializeConfidence:
    """Test vote-share initialization."""

    def test_cast_vote_shares(self, cast_view):
        """Test EW = 1, DR = 2/3, JD = 1/3."""
        conf = initialize_confidence(cast_view)
        assert conf.true(MOVIE, "emma watson") == pytest.approx(1.0)
        assert conf.true(MOVIE, "daniel radcliffe") == pytest.approx(2 / 3)
        assert conf.true(MOVIE, "jonny depp") == pytest.approx(1 / 3)

    def test_unanimous_value(self, cast_view):
        """Test a value claimed by every source has C_v = 1, C_v~ = 0."""
        conf = initialize_confidence(cast_view)
        assert conf.false(MOVIE, "emma watson") == 0.0

    def test_complementary(self, cast_view):
        """Test C_v~ = 1 - C_v after initialization."""
        assert initialize_confidence(cast_view).max_complement_gap() < 1e-12


class TestUpdateConfidence:
    """Test smart-vote updates from source precision."""

    def test_perfect_sources_reproduce_vote_split(self, cast_view):
        """Test tau = tau~ = 1 gives C_v = |S_v|/|S_o| and C_v~ = |S_v~|/|S_o|."""
        ones = {s: 1.0 for s in ("s1", "s2", "s3")}
        perfect = profile(ones, ones)
        conf = update_confidence(cast_view, perfect)
        assert conf.true(MOVIE, "rupert grint") == pytest.approx(2 / 3)
        assert conf.false(MOVIE, "rupert grint") == pytest.approx(1 / 3)

    def test_cast_jonny_depp(self, cast_view):
        """Test C(JD) = (0.7 + (1 - 0.6) + (1 - 0.5)) / 3."""
        tau = {"s1": 0.9, "s2": 0.8, "s3": 0.7}
        tau_neg = {"s1": 0.6, "s2": 0.5, "s3": 0.4}
        conf = update_confidence(cast_view, profile(tau, tau_neg))
        assert conf.true(MOVIE, "jonny depp") == pytest.approx(1.6 / 3)

    def test_complementarity_from_any_profile(self):
        """Test C_v + C_v~ = 1 whenever both come from the same profile."""
        rows = [(f"s{i % 4}", f"o{i % 5}", f"v{(i * 7) % 4}") for i in range(40)]
        view = derive_view(ClaimTable.from_rows(rows))
        tau = {s: 0.3 + 0.15 * i for i, s in enumerate(view.source_order)}
        tau_neg = {s: 0.9 - 0.2 * i for i, s in enumerate(view.source_order)}
        conf = update_confidence(view, profile(tau, tau_neg))
        assert conf.max_complement_gap() < 1e-12


class TestConvergence:
    """Test the cosine-difference convergence test."""

    def test_identical_profiles(self):
        """Test identical profiles have difference 0 and converge."""
        p = profile({"a": 0.9, "b": 0.8}, {"a": 0.6, "b": 0.5})
        assert cosine_difference(p, p) == pytest.approx(0.0, abs=1e-15)
        assert has_converged(p, p, 1e-4)

    def test_orthogonal_profiles(self):
        """Test orthogonal profiles differ by 1 and do not converge."""
        prev = profile({"a": 1.0}, {"a": 0.0})
        curr = profile({"a": 0.0}, {"a": 1.0})
        assert cosine_difference(prev, curr) == pytest.approx(1.0)
        assert not has_converged(prev, curr, 0.5)

    def test_small_change_converges(self):
        """Test (0.9, 0.8 | 0.6, 0.5) against a 1e-4 nudge converges at delta 1e-4."""
        prev = profile({"a": 0.9, "b": 0.8}, {"a": 0.6, "b": 0.5})
        curr = profile({"a": 0.9, "b": 0.8}, {"a": 0.6, "b": 0.5001})
        assert has_converged(prev, curr, 1e-4)

    def test_zero_profile_not_converged(self, caplog):
        """Test a zero-magnitude profile is logged and treated as not converged."""
        zero = profile({"a": 0.0}, {"a": 0.0})
        with caplog.at_level(logging.ERROR):
            assert not has_converged(zero, zero, 1e-4)
        assert "Zero-magnitude" in caplog.text

    def test_mismatched_sources_rejected(self):
        """Test profiles over different source sets are refused."""
        with pytest.raises(ValueError):
            has_converged(profile({"a": 1.0}, {"a": 1.0}), profile({"b": 1.0}, {"b": 1.0}), 1e-4)


class TestExtractTruths:
    """Test truth extraction by strict comparison."""

    def _conf(self, scores):
        return ConfidenceTable(
            MappingProxyType({key: t for key, (t, _) in scores.items()}),
            MappingProxyType({key: f for key, (_, f) in scores.items()}),
        )

    def test_strict_inequality(self):
        """Test 0.8 / 0.2 is true and a 0.5 / 0.5 tie is not."""
        truths = extract_truths(self._conf({("o", "a"): (0.8, 0.2), ("o", "b"): (0.5, 0.5)}))
        assert truths.get("o") == {"a"}

    def test_all_tied_object_is_empty(self, caplog):
        """Test an object whose values all tie has an empty truth set and a warning."""
        conf = self._conf({("o1", "a"): (0.5, 0.5), ("o2", "b"): (0.9, 0.1)})
        with caplog.at_level(logging.WARNING):
            truths = extract_truths(conf)
        assert truths.get("o1") == frozenset()
        assert "o1" in truths.objects
        assert "no value judged true" in caplog.text
