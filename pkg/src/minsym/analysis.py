"""Effective-symbol estimation from accuracy-vs-max-length curves and message logs.

A protocol's effective symbol count is the smallest maximum message length
beyond which accuracy stops improving meaningfully: the smallest L whose
accuracy is within epsilon of the best accuracy on the curve. Curves may come
from the oracle evaluator or from a trained run; both use the tabular format
defined here (see FORMATS.md).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError, FormatError

DEFAULT_EPSILON = 0.02  # below the run-to-run noise of the training curves


@dataclass
class AccuracyCurve:
    """Accuracy per maximum message length, optionally per epoch.

    ``points`` maps L -> accuracy for the curve under analysis; when per-epoch
    data is present, ``by_epoch`` keeps every epoch and ``points`` holds the
    final epoch.
    """

    points: dict[int, float]
    source: str = "oracle"
    by_epoch: dict[int, dict[int, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.points:
            raise DomainError("curve must have at least one point")
        for length, accuracy in self.points.items():
            if length < 1:
                raise DomainError(f"max_length keys must be >= 1, got {length}")
            if not 0.0 <= accuracy <= 1.0:
                raise DomainError(f"accuracy {accuracy} at L={length} outside [0, 1]")


@dataclass(frozen=True)
class MessageLogStats:
    episodes: int
    length_histogram: dict[int, int]
    symbol_histogram: dict[int, int]


def effective_symbols(curve: AccuracyCurve, epsilon: float = DEFAULT_EPSILON) -> int:
    """Smallest L whose accuracy is within epsilon of the curve's best accuracy."""
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"epsilon must be in [0, 1), got {epsilon}")
    best = max(curve.points.values())
    for length in sorted(curve.points):
        if curve.points[length] >= best - epsilon:
            return length
    raise AssertionError("unreachable: the argmax always qualifies")


def accuracy_gap(curve: AccuracyCurve, at_length: int) -> float:
    """Best accuracy on the curve minus the accuracy at ``at_length``."""
    if at_length not in curve.points:
        raise DomainError(f"curve has no point at max_length {at_length}")
    return max(curve.points.values()) - curve.points[at_length]


def message_length_stats(records) -> MessageLogStats:
    """Counts by message length and by vocabulary code over a parsed message log."""
    lengths: Counter[int] = Counter()
    symbols: Counter[int] = Counter()
    episodes = 0
    for record in records:
        episodes += 1
        lengths[len(record["symbols"])] += 1
        symbols.update(record["symbols"])
    return MessageLogStats(
        episodes=episodes,
        length_histogram=dict(sorted(lengths.items())),
        symbol_histogram=dict(sorted(symbols.items())),
    )


def read_message_log(path: str | Path) -> list[dict]:
    """Parse an episode log (one JSON record per line); malformed lines name their number."""
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path=str(path), line=line_no)
            for key in ("id", "max_length", "symbols", "chosen", "success"):
                if key not in record:
                    raise FormatError(f"record missing key {key!r}", path=str(path), line=line_no)
            if not isinstance(record["symbols"], list):
                raise FormatError("symbols must be a list", path=str(path), line=line_no)
            records.append(record)
    return records


def write_message_log(path: str | Path, records) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def write_curve(path: str | Path, curve: AccuracyCurve) -> None:
    """Tab-separated curve file; per-epoch rows are written when available."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# source: {curve.source}\n")
        if curve.by_epoch:
            fh.write("epoch\tmax_length\taccuracy\n")
            for epoch in sorted(curve.by_epoch):
                for length in sorted(curve.by_epoch[epoch]):
                    fh.write(f"{epoch}\t{length}\t{curve.by_epoch[epoch][length]:.6f}\n")
        else:
            fh.write("max_length\taccuracy\n")
            for length in sorted(curve.points):
                fh.write(f"{length}\t{curve.points[length]:.6f}\n")


def read_curve(path: str | Path) -> AccuracyCurve:
    """Inverse of :func:`write_curve`; per-epoch files yield the final epoch as ``points``."""
    path = Path(path)
    source = "unknown"
    header: list[str] | None = None
    by_epoch: dict[int, dict[int, float]] = {}
    points: dict[int, float] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                meta = line[1:].strip()
                if meta.startswith("source:"):
                    source = meta.split(":", 1)[1].strip()
                continue
            fields = line.split("\t")
            if header is None:
                header = fields
                if header not in (["max_length", "accuracy"], ["epoch", "max_length", "accuracy"]):
                    raise FormatError(
                        f"unrecognized curve header {header}", path=str(path), line=line_no
                    )
                continue
            if len(fields) != len(header):
                raise FormatError(
                    f"row has {len(fields)} fields, header has {len(header)}",
                    path=str(path),
                    line=line_no,
                )
            try:
                if len(header) == 2:
                    points[int(fields[0])] = float(fields[1])
                else:
                    epoch, length, accuracy = int(fields[0]), int(fields[1]), float(fields[2])
                    by_epoch.setdefault(epoch, {})[length] = accuracy
            except ValueError as exc:
                raise FormatError(f"bad value: {exc}", path=str(path), line=line_no)
    if header is None:
        raise FormatError("curve file has no header row", path=str(path))
    if by_epoch:
        points = dict(by_epoch[max(by_epoch)])
    if not points:
        raise FormatError("curve file has no data rows", path=str(path))
    return AccuracyCurve(points=points, source=source, by_epoch=by_epoch)
