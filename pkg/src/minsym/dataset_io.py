"""Persistence for bucketed datasets: canonical records, manifest, one-hot export.

All formats are documented bit-exactly in FORMATS.md; they are the contract
with external consumers (including the trainer package). The canonical format
stores value indices, not one-hot rows (20x smaller, lossless); one-hot is an
export. Writers are byte-stable for a fixed in-memory dataset.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import AttributeSpace, GameInstance, ObjectVector
from .errors import BucketPurityError, FormatError
from .sampler import DrawnInstance, LabeledDataset, SamplerConfig
from .sms import solve_min_sym

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
RECORDS_NAME = "instances.jsonl"


def write_dataset(
    dataset: LabeledDataset,
    out_dir: str | Path,
    overwrite: bool = False,
    train_fraction: float = 0.8,
) -> dict:
    """Write manifest.json plus one record line per instance; returns the manifest.

    Records are ordered by (bucket, draw index). Existing files are refused
    unless ``overwrite`` is set.
    """
    if not 0.0 < train_fraction < 1.0:
        raise FormatError(f"train_fraction must be in (0, 1), got {train_fraction}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / MANIFEST_NAME
    records_path = out / RECORDS_NAME
    if not overwrite:
        for path in (manifest_path, records_path):
            if path.exists():
                raise FileExistsError(f"{path} exists; pass overwrite to replace it")

    config = dataset.config
    bucket_counts = dataset.bucket_counts()
    splits = {}
    for bucket, count in bucket_counts.items():
        train = int(count * train_fraction)
        splits[str(bucket)] = {"train": train, "eval": count - train}

    manifest = {
        "format_version": FORMAT_VERSION,
        "num_attributes": config.space.num_attributes,
        "num_values": config.space.num_values,
        "num_distractors": config.num_distractors,
        "seed": config.seed,
        "per_bucket_target": config.per_bucket_target,
        "tracked_buckets": sorted(config.tracked_buckets),
        "max_attempts": config.max_attempts,
        "draws": dataset.draws,
        "bucket_counts": {str(k): v for k, v in bucket_counts.items()},
        "histogram": _histogram_to_json(dataset.histogram),
        "train_fraction": train_fraction,
        "splits": splits,
        "records_file": RECORDS_NAME,
    }

    with records_path.open("w", encoding="utf-8", newline="\n") as fh:
        for bucket in sorted(dataset.buckets):
            for drawn in sorted(dataset.buckets[bucket], key=lambda d: d.draw_index):
                fh.write(_record_line(bucket, drawn))
                fh.write("\n")
    with manifest_path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def read_dataset(path: str | Path, verify: bool = False) -> LabeledDataset:
    """Exact inverse of :func:`write_dataset`, validating structure as it reads.

    With ``verify`` every record is re-solved and checked against its bucket
    key (bucket purity); a mismatch raises :class:`BucketPurityError`.
    """
    root = Path(path)
    manifest = read_manifest(root)
    space = AttributeSpace(manifest["num_attributes"], manifest["num_values"])
    num_objects = manifest["num_distractors"] + 1
    expected_counts = {int(k): v for k, v in manifest["bucket_counts"].items()}

    records_path = root / manifest["records_file"]
    if not records_path.exists():
        raise FileNotFoundError(f"records file missing: {records_path}")

    buckets: dict[int, list[DrawnInstance]] = {k: [] for k in sorted(expected_counts)}
    with records_path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path=str(records_path), line=line_no)
            instance, min_m, rec_id = _parse_record(rec, space, num_objects, records_path, line_no)
            if min_m not in buckets:
                raise FormatError(
                    f"record bucket {min_m} not present in manifest bucket_counts",
                    path=str(records_path),
                    line=line_no,
                )
            if verify:
                solved = solve_min_sym(instance).min_symbols
                if solved != min_m:
                    raise BucketPurityError(
                        f"record {rec_id} stored under min_m={min_m} but re-solves to {solved}",
                        record_id=rec_id,
                        expected=min_m,
                        actual=solved,
                    )
            buckets[min_m].append(DrawnInstance(rec_id, instance))

    for bucket, expected in expected_counts.items():
        actual = len(buckets[bucket])
        if actual != expected:
            raise FormatError(
                f"bucket {bucket}: manifest says {expected} records, file holds {actual}",
                path=str(records_path),
            )

    config = SamplerConfig(
        space=space,
        num_distractors=manifest["num_distractors"],
        per_bucket_target=manifest["per_bucket_target"],
        tracked_buckets=frozenset(manifest["tracked_buckets"]),
        seed=manifest["seed"],
        max_attempts=manifest["max_attempts"],
    )
    return LabeledDataset(
        config=config,
        buckets=buckets,
        histogram=_histogram_from_json(manifest["histogram"]),
        draws=manifest["draws"],
    )


def read_manifest(root: str | Path) -> dict:
    manifest_path = Path(root) / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest missing: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON ({exc.msg})", path=str(manifest_path))
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(
            f"unsupported format_version {version!r} (supported: {FORMAT_VERSION})",
            path=str(manifest_path),
        )
    return manifest


def export_one_hot(
    dataset: LabeledDataset,
    split_seed: int,
    out_dir: str | Path,
    train_fraction: float = 0.8,
    overwrite: bool = False,
) -> list[dict]:
    """Per bucket, write train/eval binary one-hot files plus a JSON header.

    Record layout (little-endian): uint32 instance id, uint16 target row
    index, then (num_distractors + 1) * vocabulary_size one-hot bytes,
    candidate rows in instance order. The split is a seeded shuffle with the
    first floor(count * train_fraction) permuted records going to train;
    records are written in permutation order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise FormatError(f"train_fraction must be in (0, 1), got {train_fraction}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    space = dataset.config.space
    row_dim = space.vocabulary_size()
    candidates = dataset.config.num_distractors + 1

    headers = []
    for bucket in sorted(dataset.buckets):
        drawn = sorted(dataset.buckets[bucket], key=lambda d: d.draw_index)
        count = len(drawn)
        train_count = int(count * train_fraction)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([split_seed, bucket])))
        perm = rng.permutation(count)

        names = {
            "train": f"onehot_bucket{bucket}_train.bin",
            "eval": f"onehot_bucket{bucket}_eval.bin",
        }
        header_path = out / f"onehot_bucket{bucket}.json"
        paths = {split: out / name for split, name in names.items()}
        if not overwrite:
            for path in [header_path, *paths.values()]:
                if path.exists():
                    raise FileExistsError(f"{path} exists; pass overwrite to replace it")

        slices = {
            "train": perm[:train_count],
            "eval": perm[train_count:],
        }
        for split, indices in slices.items():
            with paths[split].open("wb") as fh:
                for idx in indices:
                    fh.write(_one_hot_record(drawn[int(idx)], space))

        header = {
            "format_version": FORMAT_VERSION,
            "bucket": bucket,
            "num_attributes": space.num_attributes,
            "num_values": space.num_values,
            "row_dim": row_dim,
            "candidates": candidates,
            "record_bytes": 4 + 2 + candidates * row_dim,
            "layout": "uint32le id, uint16le target_index, then candidates*row_dim one-hot uint8",
            "split_seed": split_seed,
            "train_fraction": train_fraction,
            "train_instances": train_count,
            "eval_instances": count - train_count,
            "train_file": names["train"],
            "eval_file": names["eval"],
        }
        with header_path.open("w", encoding="utf-8", newline="\n") as fh:
            json.dump(header, fh, indent=2, sort_keys=True)
            fh.write("\n")
        headers.append(header)
    return headers


def read_one_hot(header_path: str | Path) -> dict:
    """Load a one-hot export back into arrays (mainly for round-trip checks).

    Returns {"header": ..., "train": (ids, targets, rows), "eval": ...} where
    rows has shape (instances, candidates, row_dim).
    """
    header_path = Path(header_path)
    header = json.loads(header_path.read_text(encoding="utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise FormatError(
            f"unsupported format_version {header.get('format_version')!r}",
            path=str(header_path),
        )
    out = {"header": header}
    for split in ("train", "eval"):
        path = header_path.parent / header[f"{split}_file"]
        blob = path.read_bytes()
        record_bytes = header["record_bytes"]
        expected = header[f"{split}_instances"] * record_bytes
        if len(blob) != expected:
            raise FormatError(
                f"{split} file holds {len(blob)} bytes, expected {expected}",
                path=str(path),
            )
        ids, targets, rows = [], [], []
        body = header["candidates"] * header["row_dim"]
        for start in range(0, len(blob), record_bytes):
            rec_id, target = struct.unpack_from("<IH", blob, start)
            ids.append(rec_id)
            targets.append(target)
            rows.append(
                np.frombuffer(blob, dtype=np.uint8, count=body, offset=start + 6).reshape(
                    header["candidates"], header["row_dim"]
                )
            )
        out[split] = (
            np.asarray(ids, dtype=np.int64),
            np.asarray(targets, dtype=np.int64),
            np.stack(rows) if rows else np.zeros((0, header["candidates"], header["row_dim"]), np.uint8),
        )
    return out


def _one_hot_record(drawn: DrawnInstance, space: AttributeSpace) -> bytes:
    instance = drawn.instance
    rows = np.concatenate([obj.one_hot(space) for obj in instance.objects])
    return struct.pack("<IH", drawn.draw_index, instance.target_index) + rows.tobytes()


def _record_line(bucket: int, drawn: DrawnInstance) -> str:
    rec = {
        "id": drawn.draw_index,
        "min_m": bucket,
        "target_index": drawn.instance.target_index,
        "objects": [list(obj.values) for obj in drawn.instance.objects],
    }
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def _parse_record(rec, space: AttributeSpace, num_objects: int, path: Path, line_no: int):
    if not isinstance(rec, dict):
        raise FormatError("record is not an object", path=str(path), line=line_no)
    for key in ("id", "min_m", "target_index", "objects"):
        if key not in rec:
            raise FormatError(f"record missing key {key!r}", path=str(path), line=line_no)
    objects = rec["objects"]
    if len(objects) != num_objects:
        raise FormatError(
            f"record has {len(objects)} objects, expected {num_objects}",
            path=str(path),
            line=line_no,
        )
    try:
        instance = GameInstance(
            space,
            tuple(ObjectVector(tuple(values)) for values in objects),
            rec["target_index"],
        )
    except Exception as exc:
        raise FormatError(f"invalid instance: {exc}", path=str(path), line=line_no)
    return instance, rec["min_m"], rec["id"]


def _histogram_to_json(histogram: dict[int | None, int]) -> dict[str, int]:
    items = sorted(histogram.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))
    return {("unsolvable" if k is None else str(k)): v for k, v in items}


def _histogram_from_json(histogram: dict[str, int]) -> dict[int | None, int]:
    return {(None if k == "unsolvable" else int(k)): v for k, v in histogram.items()}
