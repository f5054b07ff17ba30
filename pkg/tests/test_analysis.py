import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsym.analysis import (
    AccuracyCurve,
    MessageLogStats,
    accuracy_gap,
    effective_symbols,
    message_length_stats,
    read_curve,
    read_message_log,
    write_curve,
)
from minsym.errors import DomainError, FormatError


def curves():
    return st.dictionaries(
        st.integers(1, 8), st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=8
    ).map(lambda points: AccuracyCurve(points=points))


class TestEffectiveSymbols:
    def test_plateau_after_two(self):
        curve = AccuracyCurve({1: 0.60, 2: 0.95, 3: 0.96, 4: 0.96})
        assert effective_symbols(curve, epsilon=0.02) == 2

    def test_constant_curve(self):
        assert effective_symbols(AccuracyCurve({1: 0.4, 2: 0.4, 3: 0.4}), 0.02) == 1

    def test_strictly_increasing_with_zero_epsilon(self):
        curve = AccuracyCurve({1: 0.2, 2: 0.5, 3: 0.7, 4: 0.9})
        assert effective_symbols(curve, epsilon=0.0) == 4

    def test_zero_epsilon_returns_smallest_argmax(self):
        curve = AccuracyCurve({1: 0.3, 2: 0.9, 3: 0.9, 4: 0.8})
        assert effective_symbols(curve, epsilon=0.0) == 2

    @given(curves(), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
    @settings(max_examples=100)
    def test_monotone_nonincreasing_in_epsilon(self, curve, eps_a, eps_b):
        lo, hi = sorted((eps_a, eps_b))
        assert effective_symbols(curve, hi) <= effective_symbols(curve, lo)

    def test_rejects_bad_epsilon(self):
        with pytest.raises(DomainError):
            effective_symbols(AccuracyCurve({1: 0.5}), epsilon=1.0)


class TestAccuracyGap:
    def test_hand_computed_gap(self):
        assert accuracy_gap(AccuracyCurve({2: 0.45, 5: 0.95}), 2) == pytest.approx(0.50)

    def test_gap_at_argmax_is_zero(self):
        assert accuracy_gap(AccuracyCurve({2: 0.45, 5: 0.95}), 5) == 0.0

    def test_missing_length_rejected(self):
        with pytest.raises(DomainError):
            accuracy_gap(AccuracyCurve({2: 0.45}), 3)

    @given(curves(), st.data())
    @settings(max_examples=100)
    def test_gap_never_negative(self, curve, data):
        length = data.draw(st.sampled_from(sorted(curve.points)))
        assert accuracy_gap(curve, length) >= 0.0


class TestMessageLengthStats:
    def test_uniform_length_log(self):
        records = [
            {"id": i, "max_length": 5, "symbols": [3, 4], "chosen": 0, "success": True}
            for i in range(12)
        ]
        stats = message_length_stats(records)
        assert stats.length_histogram == {2: 12}
        assert stats.episodes == 12
        assert sum(stats.symbol_histogram.values()) == 24

    def test_empty_log(self):
        assert message_length_stats([]) == MessageLogStats(0, {}, {})

    def test_totals_match_log_size(self):
        records = [
            {"id": 0, "max_length": 3, "symbols": [1], "chosen": 0, "success": True},
            {"id": 1, "max_length": 3, "symbols": [1, 2, 3], "chosen": 2, "success": False},
        ]
        stats = message_length_stats(records)
        assert sum(stats.length_histogram.values()) == stats.episodes == 2


class TestLogReader:
    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text('{"id": 0, "max_length": 1, "symbols": [1], "chosen": 0, "success": true}\n{broken\n')
        with pytest.raises(FormatError, match="line 2"):
            read_message_log(path)

    def test_missing_key_names_line(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text('{"id": 0, "symbols": [1], "chosen": 0, "success": true}\n')
        with pytest.raises(FormatError, match="max_length"):
            read_message_log(path)


class TestCurveFormat:
    def test_final_curve_round_trip(self, tmp_path):
        curve = AccuracyCurve({1: 0.25, 2: 0.5, 5: 1.0}, source="oracle")
        path = tmp_path / "curve.tsv"
        write_curve(path, curve)
        back = read_curve(path)
        assert back.source == "oracle"
        assert back.points == pytest.approx(curve.points)

    def test_per_epoch_curve_uses_final_epoch(self, tmp_path):
        curve = AccuracyCurve(
            points={1: 0.9, 2: 0.95},
            source="trained",
            by_epoch={1: {1: 0.1, 2: 0.2}, 2: {1: 0.9, 2: 0.95}},
        )
        path = tmp_path / "curve.tsv"
        write_curve(path, curve)
        back = read_curve(path)
        assert back.points == pytest.approx({1: 0.9, 2: 0.95})
        assert back.by_epoch[1] == pytest.approx({1: 0.1, 2: 0.2})

    def test_unrecognized_header_rejected(self, tmp_path):
        path = tmp_path / "curve.tsv"
        path.write_text("length\tacc\n1\t0.5\n")
        with pytest.raises(FormatError, match="header"):
            read_curve(path)

    def test_bad_row_width_rejected(self, tmp_path):
        path = tmp_path / "curve.tsv"
        path.write_text("max_length\taccuracy\n1\t0.5\t9\n")
        with pytest.raises(FormatError, match="line 2"):
            read_curve(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "curve.tsv"
        path.write_text("# source: oracle\n")
        with pytest.raises(FormatError, match="header"):
            read_curve(path)


class TestCurveValidation:
    def test_rejects_empty_points(self):
        with pytest.raises(DomainError):
            AccuracyCurve({})

    def test_rejects_out_of_range_accuracy(self):
        with pytest.raises(DomainError):
            AccuracyCurve({1: 1.5})

    def test_rejects_nonpositive_length(self):
        with pytest.raises(DomainError):
            AccuracyCurve({0: 0.5})
