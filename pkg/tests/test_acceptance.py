"""Acceptance suite: one test per release criterion, at the stated tolerances.

The terminal summary prints one PASS/FAIL line per criterion (see conftest).
Full-scale artifacts (the 20x4, 63-distractor dataset with buckets {2, 3} of
1000 instances each) are built once per session through the CLI and shared.
"""

import json
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from conftest import FULL_SCALE_SEED, write_instance_file

from minsym.analysis import read_curve
from minsym.cli import main as cli_main
from minsym.client import ServiceClient
from minsym.core import AttributeSpace, SymbolSet
from minsym.dataset_io import read_dataset, read_one_hot
from minsym.prob import CollisionQuery, monte_carlo_exists, p_class_at_least, p_exists_class_at_least
from minsym.sampler import sample_instance
from minsym.sms import solve_min_sym_enum, solve_min_sym_hitting, verify_witness

DATA_DIR = Path(__file__).parent / "data"


@pytest.mark.acceptance("eq2-worked-example: prob(n=128, m=2, classes=10000) in [0.54, 0.56], < 1 s")
def test_eq2_worked_example(capsys):
    started = time.monotonic()
    code = cli_main(["prob", "-n", "128", "-m", "2", "--classes", "10000"])
    elapsed = time.monotonic() - started
    out = capsys.readouterr().out
    assert code == 0
    value = float(out.splitlines()[1].split("\t")[1])
    assert 0.54 <= value <= 0.56
    assert elapsed < 1.0


@pytest.mark.acceptance("sms-oracle-equivalence: 1000 random instances, solvers agree, minimal, < 30 s")
def test_sms_oracle_equivalence():
    started = time.monotonic()
    rng = np.random.default_rng(424242)
    checked = 0
    while checked < 1000:
        num_attributes = int(rng.integers(1, 9))
        num_values = int(rng.integers(2, 5))
        num_distractors = int(rng.integers(1, 11))
        space = AttributeSpace(num_attributes, num_values)
        instance = sample_instance(space, num_distractors, rng)
        enum_result = solve_min_sym_enum(instance)
        hitting_result = solve_min_sym_hitting(instance)
        assert enum_result.min_symbols == hitting_result.min_symbols
        if enum_result.solvable:
            assert verify_witness(instance, enum_result.witness)
            assert verify_witness(instance, hitting_result.witness)
            assert len(enum_result.witness) == len(hitting_result.witness) == enum_result.min_symbols
            # Exhaustive scan one size below the reported minimum.
            smaller = enum_result.min_symbols - 1
            if smaller >= 1:
                for combo in combinations(range(num_attributes), smaller):
                    witness = SymbolSet.from_target(instance.target, combo)
                    assert not verify_witness(instance, witness)
        checked += 1
    assert time.monotonic() - started < 30.0


@pytest.mark.acceptance("figure-1-fixtures: min 1 / min 2 / duplicate unsolvable, exact")
def test_figure_one_fixtures(easy_instance, hard_instance, duplicate_instance, tmp_path, capsys):
    for solver in (solve_min_sym_enum, solve_min_sym_hitting):
        assert solver(easy_instance).min_symbols == 1
        assert solver(hard_instance).min_symbols == 2
        assert solver(duplicate_instance).min_symbols is None
    # Same answers through the CLI surface.
    path = write_instance_file(tmp_path / "hard.json", hard_instance)
    assert cli_main(["solve", str(path)]) == 0
    assert "min_symbols\t2" in capsys.readouterr().out


@pytest.mark.acceptance("bucket-purity: 2x1000 full-scale sample verifies clean, rerun byte-identical, < 5 min")
def test_bucket_purity_and_determinism(full_scale_dataset, tmp_path, capsys):
    assert full_scale_dataset["elapsed"] < 300.0

    code = cli_main(["verify", str(full_scale_dataset["dir"])])
    out = capsys.readouterr().out
    assert code == 0
    assert "re-solved 2000 instances with zero mismatches" in out

    rerun = tmp_path / "rerun"
    started = time.monotonic()
    code = cli_main(
        [
            "sample", "--out", str(rerun), "--buckets", "2,3",
            "--per-bucket", "1000", "--seed", str(FULL_SCALE_SEED),
        ]
    )
    assert code == 0
    assert time.monotonic() - started < 300.0
    capsys.readouterr()
    for name in ("instances.jsonl", "manifest.json"):
        assert (rerun / name).read_bytes() == (full_scale_dataset["dir"] / name).read_bytes()


@pytest.mark.acceptance("narrow-distribution: 10^4-trial histogram, top two adjacent buckets > 50%")
def test_narrow_min_m_distribution(tmp_path, capsys):
    reference = json.loads((DATA_DIR / "hist_reference.json").read_text())
    out_json = tmp_path / "hist.json"
    code = cli_main(
        [
            "hist", "--trials", str(reference["trials"]), "--seed", str(reference["seed"]),
            "--out", str(out_json),
        ]
    )
    capsys.readouterr()
    assert code == 0
    histogram = json.loads(out_json.read_text())["histogram"]
    assert histogram == reference["histogram"]

    counts = {int(k): v for k, v in histogram.items() if k != "unsolvable"}
    (top_count, top), (second_count, second) = sorted(
        ((v, k) for k, v in counts.items()), reverse=True
    )[:2]
    assert abs(top - second) == 1
    assert (top_count + second_count) / reference["trials"] > 0.50


@pytest.mark.acceptance("oracle-game: bucket 3 exact 1.0 for L>=3, < 1.0 for L<=2, effective symbols 3, < 1 min")
def test_oracle_game_on_bucket_three(full_scale_dataset, tmp_path, capsys):
    started = time.monotonic()
    client = ServiceClient()
    curve_dir = tmp_path / "curves"
    res = client.post(
        "/eval",
        {
            "dataset": str(full_scale_dataset["dir"]),
            "buckets": [3],
            "max_lengths": [1, 2, 3, 4, 5],
            "curve_dir": str(curve_dir),
        },
    )
    expected = {p["max_length"]: p["expected_accuracy"] for p in res["points"]}
    assert expected[3] == 1.0
    assert expected[4] == 1.0
    assert expected[5] == 1.0
    assert expected[1] < 1.0
    assert expected[2] < 1.0

    code = cli_main(["analyze", str(curve_dir / "oracle_bucket3.tsv"), "--epsilon", "0.02"])
    out = capsys.readouterr().out
    assert code == 0
    assert "effective_symbols\t3" in out
    # Cross-check through the reader as well.
    curve = read_curve(curve_dir / "oracle_bucket3.tsv")
    assert curve.points[3] == 1.0
    assert time.monotonic() - started < 60.0


@pytest.mark.acceptance("prob-monotonicity: 1000 random queries + independence-gap fixtures")
def test_probability_monotonicity_suite():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        n = int(rng.integers(1, 200))
        m = int(rng.integers(0, 30))
        classes = int(rng.integers(1, 5000))
        base = p_class_at_least(CollisionQuery(n, m, classes))
        assert 0.0 <= base <= 1.0
        assert p_class_at_least(CollisionQuery(n, m + 1, classes)) <= base
        assert p_class_at_least(CollisionQuery(n + 1, m, classes)) >= base
        if m >= 1:
            assert p_class_at_least(CollisionQuery(n, m, classes + 1)) <= base

    # The formula treats classes as independent; nature does not. At n=4,
    # classes=2, m=2 the formula gives 231/256 while a repeat is certain by
    # pigeonhole; at n=2 it gives 7/16 against a true 1/2.
    assert p_exists_class_at_least(CollisionQuery(4, 2, 2)) == pytest.approx(
        float(Fraction(231, 256)), rel=1e-12
    )
    certain = monte_carlo_exists(CollisionQuery(4, 2, 2), trials=20_000, seed=5)
    assert certain.probability == 1.0
    half = monte_carlo_exists(CollisionQuery(2, 2, 2), trials=100_000, seed=6)
    assert abs(half.probability - 0.5) <= 3 * half.stderr
    assert abs(p_exists_class_at_least(CollisionQuery(2, 2, 2)) - 0.5) > 10 * half.stderr


@pytest.mark.acceptance("format-round-trips: lossless dataset + one-hot, rows sum to 20, deterministic 800/200 split")
def test_format_round_trips(full_scale_dataset, tmp_path, capsys):
    dataset = read_dataset(full_scale_dataset["dir"])
    rewrite = tmp_path / "rewrite"
    from minsym.dataset_io import write_dataset

    write_dataset(dataset, rewrite)
    for name in ("instances.jsonl",):
        assert (rewrite / name).read_bytes() == (full_scale_dataset["dir"] / name).read_bytes()

    export_a = tmp_path / "export_a"
    export_b = tmp_path / "export_b"
    for out_dir in (export_a, export_b):
        code = cli_main(["export", str(full_scale_dataset["dir"]), "--split-seed", "11", "--out", str(out_dir)])
        capsys.readouterr()
        assert code == 0

    for bucket in (2, 3):
        name = f"onehot_bucket{bucket}"
        assert (export_a / f"{name}_train.bin").read_bytes() == (
            export_b / f"{name}_train.bin"
        ).read_bytes()
        data = read_one_hot(export_a / f"{name}.json")
        assert data["header"]["train_instances"] == 800
        assert data["header"]["eval_instances"] == 200
        stored = {d.draw_index for d in dataset.buckets[bucket]}
        by_id = {d.draw_index: d.instance for d in dataset.buckets[bucket]}
        seen = set()
        for split in ("train", "eval"):
            ids, targets, rows = data[split]
            assert (rows.sum(axis=2) == 20).all()
            for i in range(len(ids)):
                instance = by_id[int(ids[i])]
                assert int(targets[i]) == instance.target_index
            seen.update(int(x) for x in ids)
        assert seen == stored
