"""Corpus parsing, the dataset model, stratified splits, and label remapping."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from math import floor
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConfigError,
    EmptyCorpus,
    LabelMapError,
    ParseError,
    StratificationError,
)

DEFAULT_RATIOS = (0.8, 0.1, 0.1)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One labeled sample: a dims x timesteps value matrix plus a class label."""

    id: str
    values: np.ndarray
    label: str

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2:
            raise ValueError(f"series {self.id!r}: values must be a 1-D or 2-D matrix")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ValueError(
                f"series {self.id!r}: need dims >= 1 and timesteps >= 2, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"series {self.id!r}: values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def dims(self) -> int:
        return int(self.values.shape[0])

    @property
    def timesteps(self) -> int:
        return int(self.values.shape[1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self) -> int:
        return hash((self.id, self.label, self.values.shape))


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of series with a consistent dimensionality."""

    name: str
    series: tuple[TimeSeries, ...]
    labels: tuple[str, ...]
    dims: int

    def __post_init__(self):
        seen_ids = set()
        for s in self.series:
            if s.id in seen_ids:
                raise ValueError(f"duplicate series id {s.id!r}")
            seen_ids.add(s.id)
            if s.dims != self.dims:
                raise ValueError(
                    f"series {s.id!r} has {s.dims} dims, dataset declares {self.dims}"
                )
            if s.label not in self.labels:
                raise ValueError(f"series {s.id!r} label {s.label!r} not in label set")

    @classmethod
    def from_series(cls, name: str, series: Sequence[TimeSeries]) -> "Dataset":
        """Build a dataset, collecting labels in first-appearance order."""
        if not series:
            raise EmptyCorpus(f"dataset {name!r} has no series")
        labels: list[str] = []
        for s in series:
            if s.label not in labels:
                labels.append(s.label)
        return cls(name=name, series=tuple(series), labels=tuple(labels), dims=series[0].dims)

    def by_id(self, series_id: str) -> TimeSeries:
        for s in self.series:
            if s.id == series_id:
                return s
        raise KeyError(series_id)

    def __len__(self) -> int:
        return len(self.series)


@dataclass(frozen=True)
class Split:
    """Disjoint train/val/test id lists whose union is the dataset's id set."""

    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    seed: int

    def as_dict(self) -> dict[str, tuple[str, ...]]:
        return {"train": self.train, "val": self.val, "test": self.test}


@dataclass(frozen=True)
class LabelMap:
    """Total mapping from child class tokens to parent class tokens."""

    child_to_parent: Mapping[str, str] = field(default_factory=dict)

    def parent_of(self, label: str) -> str:
        try:
            return self.child_to_parent[label]
        except KeyError:
            raise LabelMapError(f"label {label!r} has no parent in the map") from None


def _parse_value(token: str, line_no: int, col_no: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"non-numeric value {token!r}", line=line_no, col=col_no) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite value {token!r}", line=line_no, col=col_no)
    return v


def parse_ucr_tsv(data: bytes, name: str = "ucr") -> Dataset:
    """Parse a univariate corpus where each line is ``label<sep>v1<sep>v2...``.

    The separator (tab or comma) is sniffed from the first data line; all rows
    must carry the same number of values. Labels are kept as strings and
    collected in first-appearance order.
    """
    text = data.decode("utf-8")
    rows: list[tuple[int, str]] = [
        (i + 1, line) for i, line in enumerate(text.splitlines()) if line.strip()
    ]
    if not rows:
        raise EmptyCorpus("no data rows")

    first = rows[0][1]
    sep = "\t" if "\t" in first else ("," if "," in first else None)
    if sep is None:
        raise ParseError("no tab or comma separator found", line=rows[0][0])

    series: list[TimeSeries] = []
    expected_fields: int | None = None
    for idx, (line_no, line) in enumerate(rows):
        fields = [f.strip() for f in line.split(sep)]
        if expected_fields is None:
            expected_fields = len(fields)
        elif len(fields) != expected_fields:
            raise ParseError(
                f"expected {expected_fields} fields, got {len(fields)}", line=line_no
            )
        label, value_tokens = fields[0], fields[1:]
        if len(value_tokens) < 2:
            raise ParseError("each row needs at least 2 values", line=line_no)
        values = [
            _parse_value(tok, line_no, col + 2) for col, tok in enumerate(value_tokens)
        ]
        series.append(TimeSeries(id=f"{name}_{idx:04d}", values=np.array([values]), label=label))
    return Dataset.from_series(name, series)


def parse_sktime_ts(data: bytes, name: str | None = None) -> Dataset:
    """Parse a ``.ts``-style corpus.

    Header lines start with ``@``; ``@problemName``, ``@classLabel`` and
    ``@data`` are honored, any other ``@`` line is ignored. Data rows are
    colon-separated dimension blocks of comma-separated values with the class
    label as the final field, e.g. ``1,2:3,4:A`` for a 2-dim series labeled A.
    """
    text = data.decode("utf-8")
    problem_name: str | None = None
    declared_labels: list[str] | None = None
    in_data = False
    series: list[TimeSeries] = []
    expected_dims: int | None = None
    idx = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_data:
            if line.startswith("@"):
                key, _, rest = line.partition(" ")
                key = key.lower()
                if key == "@problemname":
                    problem_name = rest.strip()
                elif key == "@classlabel":
                    parts = rest.split()
                    if not parts or parts[0].lower() != "true":
                        raise ParseError(
                            "only labeled corpora are supported (@classLabel true ...)",
                            line=line_no,
                        )
                    declared_labels = parts[1:]
                elif key == "@data":
                    in_data = True
                continue
            raise ParseError("data row before @data marker", line=line_no)

        blocks = line.split(":")
        if len(blocks) < 2:
            raise ParseError("row needs at least one dimension block and a label", line=line_no)
        label = blocks[-1].strip()
        dim_blocks = blocks[:-1]
        if expected_dims is None:
            expected_dims = len(dim_blocks)
        elif len(dim_blocks) != expected_dims:
            raise ParseError(
                f"expected {expected_dims} dimension blocks, got {len(dim_blocks)}",
                line=line_no,
            )
        if declared_labels is not None and label not in declared_labels:
            raise ParseError(f"label {label!r} not declared by @classLabel", line=line_no)

        row_values: list[list[float]] = []
        for block in dim_blocks:
            tokens = [t.strip() for t in block.split(",")]
            row_values.append(
                [_parse_value(tok, line_no, col + 1) for col, tok in enumerate(tokens)]
            )
        lengths = {len(v) for v in row_values}
        if len(lengths) != 1:
            raise ParseError("dimension blocks have unequal lengths", line=line_no)
        if lengths.pop() < 2:
            raise ParseError("each dimension needs at least 2 values", line=line_no)

        ds_name = name or problem_name or "ts"
        series.append(
            TimeSeries(id=f"{ds_name}_{idx:04d}", values=np.array(row_values), label=label)
        )
        idx += 1

    if not in_data:
        raise ParseError("missing @data marker")
    if not series:
        raise EmptyCorpus("no data rows after @data")
    return Dataset.from_series(name or problem_name or "ts", series)


def _largest_remainder(count: int, ratios: Sequence[float]) -> list[int]:
    """Integer partition of `count` by `ratios`, largest fractional part wins."""
    quotas = [count * r for r in ratios]
    base = [floor(q) for q in quotas]
    remainder = count - sum(base)
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:remainder]:
        base[i] += 1
    return base


def stratified_split(
    d: Dataset,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
    strict: bool = False,
) -> Split:
    """Partition the dataset into train/val/test, stratified per class.

    Per class, members are shuffled by a seeded PRNG and partitioned by
    cumulative ratios with largest-remainder rounding, so per-split class
    counts differ from ``class_size * ratio`` by less than one. The same
    (dataset, ratios, seed) always yields the same split.

    With ``strict=True`` every class must have at least 3 members.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ConfigError(f"ratios must be three positive reals, got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"ratios must sum to 1, got {sum(ratios)!r}")

    by_class: dict[str, list[str]] = {label: [] for label in d.labels}
    for s in d.series:
        by_class[s.label].append(s.id)

    rng = random.Random(seed)
    parts: tuple[list[str], list[str], list[str]] = ([], [], [])
    for label in d.labels:
        members = list(by_class[label])
        if strict and len(members) < 3:
            raise StratificationError(
                f"class {label!r} has {len(members)} members, need >= 3 for strict split"
            )
        rng.shuffle(members)
        n_train, n_val, _ = _largest_remainder(len(members), ratios)
        parts[0].extend(members[:n_train])
        parts[1].extend(members[n_train : n_train + n_val])
        parts[2].extend(members[n_train + n_val :])
    return Split(train=tuple(parts[0]), val=tuple(parts[1]), test=tuple(parts[2]), seed=seed)


def remap_labels(d: Dataset, m: LabelMap) -> Dataset:
    """Relabel every series with its parent class; series order is preserved."""
    for label in d.labels:
        if label not in m.child_to_parent:
            raise LabelMapError(f"label {label!r} has no parent in the map")
    relabeled = [
        TimeSeries(id=s.id, values=s.values, label=m.parent_of(s.label)) for s in d.series
    ]
    return Dataset.from_series(d.name, relabeled)


def znormalize(d: Dataset) -> Dataset:
    """Per-series, per-dimension z-normalization (population std; zero-std rows recenter only)."""
    out = []
    for s in d.series:
        arr = np.array(s.values, dtype=np.float64)
        mean = arr.mean(axis=1, keepdims=True)
        std = arr.std(axis=1, keepdims=True)
        std[std == 0.0] = 1.0
        out.append(TimeSeries(id=s.id, values=(arr - mean) / std, label=s.label))
    return Dataset.from_series(d.name, out)


def to_canonical_json(d: Dataset) -> bytes:
    """Serialize to the canonical corpus form: one UTF-8 JSON object, LF-terminated.

    Key order is fixed: name, dims, labels, series; each series carries
    id, label, values (always a dims x timesteps list of lists).
    """
    obj = {
        "name": d.name,
        "dims": d.dims,
        "labels": list(d.labels),
        "series": [
            {"id": s.id, "label": s.label, "values": [list(row) for row in s.values.tolist()]}
            for s in d.series
        ],
    }
    return (json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n").encode("utf-8")


def parse_canonical_json(data: bytes) -> Dataset:
    """Inverse of :func:`to_canonical_json`."""
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"invalid canonical corpus JSON: {exc}") from None
    for key in ("name", "dims", "labels", "series"):
        if key not in obj:
            raise ParseError(f"canonical corpus missing key {key!r}")
    if not obj["series"]:
        raise EmptyCorpus("canonical corpus has no series")
    series = [
        TimeSeries(id=rec["id"], values=np.array(rec["values"], dtype=np.float64), label=rec["label"])
        for rec in obj["series"]
    ]
    ds = Dataset(
        name=obj["name"],
        series=tuple(series),
        labels=tuple(obj["labels"]),
        dims=int(obj["dims"]),
    )
    return ds


def load_corpus(path: str | Path, name: str | None = None) -> Dataset:
    """Load a corpus file, dispatching on extension (.json, .ts, else tab/comma)."""
    path = Path(path)
    data = path.read_bytes()
    suffix = path.suffix.lower()
    if suffix == ".json":
        return parse_canonical_json(data)
    if suffix == ".ts":
        return parse_sktime_ts(data, name=name)
    return parse_ucr_tsv(data, name=name or path.stem)
