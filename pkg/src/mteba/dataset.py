"""Project datasets: schema handling, loading, cleaning and min-max normalization."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"

SCHEMA_KINDS = ("numeric", "categorical", "effort", "size_numeric", "id", "ignore")
PREDICTOR_KINDS = ("numeric", "categorical", "size_numeric")
MISSING_TOKENS = ("", "?")


class DatasetError(ValueError):
    """Raised for unreadable, malformed or schema-inconsistent data."""


@dataclass(frozen=True)
class Column:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in SCHEMA_KINDS:
            raise DatasetError(f"unknown column kind {self.kind!r} for column {self.name!r}")

    @property
    def is_predictor(self) -> bool:
        return self.kind in PREDICTOR_KINDS

    @property
    def feature_kind(self) -> str:
        return CATEGORICAL if self.kind == "categorical" else NUMERIC


@dataclass(frozen=True)
class Schema:
    """Ordered column layout of a dataset file.

    Exactly one column holds the effort; at most one is the size attribute
    (``size_numeric``, which is also a numeric predictor) and at most one
    carries project ids.
    """

    columns: tuple[Column, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        names = [c.name for c in self.columns]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise DatasetError(f"duplicate column names: {', '.join(dupes)}")
        kinds = [c.kind for c in self.columns]
        if kinds.count("effort") != 1:
            raise DatasetError("schema must mark exactly one effort column")
        if kinds.count("size_numeric") > 1:
            raise DatasetError("schema may mark at most one size column")
        if kinds.count("id") > 1:
            raise DatasetError("schema may mark at most one id column")

    @classmethod
    def from_text(cls, text: str) -> "Schema":
        columns = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, sep, kind = line.rpartition(":")
            if not sep or not name.strip():
                raise DatasetError(f"schema line {lineno}: expected 'name:kind', got {line!r}")
            columns.append(Column(name.strip(), kind.strip()))
        return cls(tuple(columns))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @cached_property
    def predictors(self) -> tuple[Column, ...]:
        return tuple(c for c in self.columns if c.is_predictor)

    @property
    def predictor_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.predictors)

    @property
    def feature_kinds(self) -> tuple[str, ...]:
        return tuple(c.feature_kind for c in self.predictors)

    @property
    def effort_name(self) -> str:
        return next(c.name for c in self.columns if c.kind == "effort")

    @property
    def size_name(self) -> str | None:
        return next((c.name for c in self.columns if c.kind == "size_numeric"), None)

    @property
    def size_index(self) -> int | None:
        """Position of the size attribute among the predictors."""
        for i, c in enumerate(self.predictors):
            if c.kind == "size_numeric":
                return i
        return None

    @property
    def id_name(self) -> str | None:
        return next((c.name for c in self.columns if c.kind == "id"), None)

    @cached_property
    def numeric_positions(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.feature_kinds) if k == NUMERIC)

    @cached_property
    def categorical_positions(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.feature_kinds) if k == CATEGORICAL)


def load_schema(path: str | Path) -> Schema:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read schema file {path}: {exc.strerror}") from exc
    return Schema.from_text(text)


@dataclass(frozen=True)
class Project:
    """One historical project.

    ``features`` is aligned to the schema predictors: floats for numeric
    columns, string tokens for categorical ones, ``None`` where missing.
    ``size`` is the raw (never normalized) value of the size attribute.
    """

    id: str
    features: tuple
    effort: float | None
    size: float | None = None

    @property
    def has_missing(self) -> bool:
        return self.effort is None or any(v is None for v in self.features)


@dataclass(frozen=True, eq=False)
class Dataset:
    schema: Schema
    projects: tuple[Project, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "projects", tuple(self.projects))
        width = len(self.schema.predictors)
        ids = set()
        for p in self.projects:
            if len(p.features) != width:
                raise DatasetError(
                    f"project {p.id!r} has {len(p.features)} features, schema expects {width}"
                )
            if p.id in ids:
                raise DatasetError(f"duplicate project id {p.id!r}")
            ids.add(p.id)

    def __len__(self) -> int:
        return len(self.projects)

    def __iter__(self) -> Iterator[Project]:
        return iter(self.projects)

    def __getitem__(self, i: int) -> Project:
        return self.projects[i]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(self.schema, tuple(self.projects[i] for i in indices))

    @cached_property
    def efforts(self) -> np.ndarray:
        return np.array([np.nan if p.effort is None else p.effort for p in self.projects], dtype=float)

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([np.nan if p.size is None else p.size for p in self.projects], dtype=float)

    @cached_property
    def numeric_block(self) -> np.ndarray:
        """(n, numeric predictors) float matrix."""
        pos = self.schema.numeric_positions
        out = np.empty((len(self.projects), len(pos)), dtype=float)
        for r, p in enumerate(self.projects):
            for c, j in enumerate(pos):
                v = p.features[j]
                out[r, c] = np.nan if v is None else v
        return out

    @cached_property
    def categorical_block(self) -> np.ndarray:
        """(n, categorical predictors) object matrix of tokens."""
        pos = self.schema.categorical_positions
        out = np.empty((len(self.projects), len(pos)), dtype=object)
        for r, p in enumerate(self.projects):
            for c, j in enumerate(pos):
                out[r, c] = p.features[j]
        return out


def _detect_delimiter(header: str) -> str:
    return "\t" if "\t" in header else ","


def _parse_number(token: str, column: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DatasetError(
            f"line {lineno}: non-numeric value {token!r} in numeric column {column!r}"
        ) from None
    if not math.isfinite(value):
        raise DatasetError(f"line {lineno}: non-finite value {token!r} in column {column!r}")
    return value


def parse_dataset(text: str, schema: Schema) -> Dataset:
    """Parse delimited text (header row first) into a Dataset."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DatasetError("dataset file has no header row")
    delimiter = _detect_delimiter(lines[0])
    rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    header = [h.strip() for h in rows[0]]
    if schema.effort_name not in header:
        raise DatasetError(f"missing effort column {schema.effort_name!r}")
    if tuple(header) != schema.names:
        missing = [n for n in schema.names if n not in header]
        extra = [n for n in header if n not in schema.names]
        detail = []
        if missing:
            detail.append("missing " + ", ".join(missing))
        if extra:
            detail.append("unexpected " + ", ".join(extra))
        if not detail:
            detail.append("column order differs")
        raise DatasetError("header does not match schema: " + "; ".join(detail))

    projects = []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DatasetError(f"line {lineno}: expected {len(header)} fields, found {len(row)}")
        features = []
        effort = size = None
        pid = str(len(projects) + 1)
        for col, cell in zip(schema.columns, row):
            token = cell.strip()
            missing = token in MISSING_TOKENS
            if col.kind == "id":
                pid = token if token else pid
            elif col.kind == "ignore":
                continue
            elif col.kind == "effort":
                if not missing:
                    effort = _parse_number(token, col.name, lineno)
                    if effort <= 0:
                        raise DatasetError(f"line {lineno}: effort must be positive, got {token!r}")
            elif col.kind == "categorical":
                features.append(None if missing else token)
            else:
                value = None if missing else _parse_number(token, col.name, lineno)
                features.append(value)
                if col.kind == "size_numeric":
                    size = value
        projects.append(Project(pid, tuple(features), effort, size))
    return Dataset(schema, tuple(projects))


def load_dataset(path: str | Path, schema: Schema) -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read dataset file {path}: {exc.strerror}") from exc
    return parse_dataset(text, schema)


def remove_missing(d: Dataset) -> Dataset:
    """Drop every project with a missing cell; order is preserved."""
    return Dataset(d.schema, tuple(p for p in d.projects if not p.has_missing))


@dataclass(frozen=True)
class Normalizer:
    """Per numeric predictor (min, max), in schema order of the numeric columns."""

    schema: Schema
    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.mins, self.maxs)):
            raise DatasetError("normalizer min exceeds max")

    def scale(self, value: float, column: int) -> float:
        lo, hi = self.mins[column], self.maxs[column]
        if hi == lo:
            return 0.0
        return (value - lo) / (hi - lo)

    def unscale(self, value: float, column: int) -> float:
        lo, hi = self.mins[column], self.maxs[column]
        return value * (hi - lo) + lo


def fit_normalizer(d: Dataset) -> Normalizer:
    if len(d) == 0:
        raise DatasetError("cannot fit a normalizer on an empty dataset")
    block = d.numeric_block
    if np.isnan(block).any():
        raise DatasetError("cannot fit a normalizer on data with missing values")
    mins = tuple(float(v) for v in block.min(axis=0))
    maxs = tuple(float(v) for v in block.max(axis=0))
    return Normalizer(d.schema, mins, maxs)


def apply_normalizer(n: Normalizer, d: Dataset) -> Dataset:
    """Min-max scale numeric predictors; categorical values, effort and raw size are kept.

    Values outside the fitted range are not clamped.
    """
    if d.schema != n.schema:
        raise DatasetError("dataset schema does not match the normalizer")
    slot = {j: c for c, j in enumerate(d.schema.numeric_positions)}
    out = []
    for p in d.projects:
        feats = tuple(
            n.scale(v, slot[j]) if j in slot and v is not None else v
            for j, v in enumerate(p.features)
        )
        out.append(replace(p, features=feats))
    return Dataset(d.schema, tuple(out))
