"""Core domain model: instances, plans, score aggregation and rank evaluation.

All rank decisions in the package go through `higher_set`; ties count
against the true location (>=). Aggregation sums rows in ascending photo
index order so every caller sees bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

ROW_NORM_TOL = 1e-6


class ScoreKind(str, Enum):
    LOG_PROBABILITY = "log_probability"
    RAW = "raw"


class PlanStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    BUDGET_EXHAUSTED = "budget_exhausted"


class InvalidInstanceError(ValueError):
    """Raised by validate_instance; carries the full list of violations."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class Instance:
    """An N x M score matrix with a designated true location.

    `scores` is a read-only float64 array. Rows are per-photo score
    vectors; column `true_location` holds the true-location scores.
    """

    scores: np.ndarray
    true_location: int
    photo_ids: tuple[str, ...]
    score_kind: ScoreKind

    @property
    def num_photos(self) -> int:
        return self.scores.shape[0]

    @property
    def num_locations(self) -> int:
        return self.scores.shape[1]

    def id_to_index(self) -> dict[str, int]:
        return {pid: i for i, pid in enumerate(self.photo_ids)}

    def to_json_dict(self) -> dict:
        return {
            "num_photos": self.num_photos,
            "num_locations": self.num_locations,
            "true_location": self.true_location,
            "score_kind": self.score_kind.value,
            "photo_ids": list(self.photo_ids),
            "scores": [[float(v) for v in row] for row in self.scores],
        }


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C")
    out.setflags(write=False)
    return out


def make_instance(scores, true_location: int, photo_ids=None,
                  score_kind: ScoreKind = ScoreKind.LOG_PROBABILITY) -> Instance:
    """Build and validate an Instance from in-memory data."""
    scores = np.asarray(scores, dtype=np.float64)
    if photo_ids is None:
        photo_ids = tuple(f"p{i}" for i in range(scores.shape[0]))
    raw = {
        "num_photos": scores.shape[0] if scores.ndim == 2 else -1,
        "num_locations": scores.shape[1] if scores.ndim == 2 else -1,
        "true_location": true_location,
        "score_kind": score_kind.value if isinstance(score_kind, ScoreKind) else score_kind,
        "photo_ids": list(photo_ids),
        "scores": scores,
    }
    return validate_instance(raw)


def validate_instance(raw: dict) -> Instance:
    """Check every Instance invariant; raise InvalidInstanceError listing all violations."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise InvalidInstanceError(["instance payload must be a JSON object"])

    kind_raw = raw.get("score_kind", ScoreKind.LOG_PROBABILITY.value)
    try:
        kind = ScoreKind(kind_raw)
    except ValueError:
        errors.append(f"unknown score_kind {kind_raw!r}")
        kind = ScoreKind.RAW

    rows = raw.get("scores")
    try:
        mat = np.asarray(rows, dtype=np.float64)
        ragged = mat.ndim != 2
    except (ValueError, TypeError):
        ragged = True
        mat = None
    if ragged:
        # report per-row lengths against the declared / first-row width
        lengths = [len(r) for r in rows] if isinstance(rows, list) else []
        m = raw.get("num_locations") or (lengths[0] if lengths else 0)
        for i, ln in enumerate(lengths):
            if ln != m:
                errors.append(f"row {i} has {ln} entries, expected {m}")
        if not lengths:
            errors.append("scores must be a non-empty list of rows")
        raise InvalidInstanceError(errors or ["scores is not a rectangular matrix"])

    n, m = mat.shape
    if n < 1:
        errors.append("num_photos must be >= 1")
    if m < 2:
        errors.append("num_locations must be >= 2")
    if "num_photos" in raw and raw["num_photos"] != n:
        errors.append(f"num_photos={raw['num_photos']} but scores has {n} rows")
    if "num_locations" in raw and raw["num_locations"] != m:
        errors.append(f"num_locations={raw['num_locations']} but rows have {m} entries")

    bad = np.argwhere(~np.isfinite(mat))
    for i, j in bad[:20]:
        errors.append(f"non-finite score at row {i}, column {j}")

    t = raw.get("true_location")
    if not isinstance(t, (int, np.integer)) or isinstance(t, bool) or not (0 <= t < m):
        errors.append(f"true_location {t!r} not an index in [0, {m})")
        t = 0

    ids = raw.get("photo_ids")
    if ids is None:
        ids = [f"p{i}" for i in range(n)]
    ids = [str(p) for p in ids]
    if len(ids) != n:
        errors.append(f"{len(ids)} photo_ids for {n} photos")
    seen: set[str] = set()
    for pid in ids:
        if pid in seen:
            errors.append(f"duplicate photo_id {pid!r}")
        seen.add(pid)

    if kind is ScoreKind.LOG_PROBABILITY and not bad.size:
        sums = np.exp(mat).sum(axis=1)
        for i in np.nonzero(np.abs(sums - 1.0) > ROW_NORM_TOL)[0]:
            errors.append(
                f"row {i} exponentiates to {sums[i]:.6g}, not a probability row"
            )

    if errors:
        raise InvalidInstanceError(errors)
    return Instance(_freeze(mat), int(t), tuple(ids), kind)


def _kept_indices(instance: Instance, kept: Iterable[int]) -> list[int]:
    idx = sorted(set(int(i) for i in kept))
    if not idx:
        raise ValueError("empty collection")
    if idx[0] < 0 or idx[-1] >= instance.num_photos:
        raise ValueError(f"photo index out of range in kept set: {idx}")
    return idx


def aggregate_scores(instance: Instance, kept: Iterable[int]) -> np.ndarray:
    """Component-wise sum of the kept rows, accumulated in ascending index order."""
    idx = _kept_indices(instance, kept)
    out = np.zeros(instance.num_locations, dtype=np.float64)
    for i in idx:
        out += instance.scores[i]
    return out


def collection_posterior(instance: Instance, kept: Iterable[int]) -> np.ndarray:
    """Normalized location distribution of the kept collection (log-probability instances only)."""
    if instance.score_kind is not ScoreKind.LOG_PROBABILITY:
        raise ValueError("posterior undefined for raw scores")
    s = aggregate_scores(instance, kept)
    s = s - s.max()
    e = np.exp(s)
    return e / e.sum()


def higher_set(score_vector: Sequence[float], t: int) -> set[int]:
    """Locations scoring at least as high as t. Ties count toward the set."""
    s = np.asarray(score_vector, dtype=np.float64)
    if not 0 <= t < s.shape[0]:
        raise ValueError(f"location index {t} out of range")
    st = s[t]
    return {int(j) for j in np.nonzero(s >= st)[0] if j != t}


def protected_k(instance: Instance, kept: Iterable[int]) -> int:
    """|higher_set| of the aggregated kept scores at the true location."""
    return len(higher_set(aggregate_scores(instance, kept), instance.true_location))


def apply_margin(instance: Instance, theta: float) -> Instance:
    """Copy with `theta` added to the true-location column; result is a raw-score instance."""
    theta = float(theta)
    if not math.isfinite(theta) or theta < 0:
        raise ValueError(f"margin must be finite and >= 0, got {theta}")
    mat = np.array(instance.scores)
    mat[:, instance.true_location] += theta
    return Instance(_freeze(mat), instance.true_location, instance.photo_ids,
                    ScoreKind.RAW)


@dataclass(frozen=True)
class DeletionPlan:
    deleted: frozenset[int]
    kept: frozenset[int]
    protected_k: int
    status: PlanStatus

    def deleted_sorted(self) -> list[int]:
        return sorted(self.deleted)

    def kept_sorted(self) -> list[int]:
        return sorted(self.kept)

    def to_json_dict(self, instance: Instance) -> dict:
        ids = instance.photo_ids
        return {
            "deleted": [ids[i] for i in self.deleted_sorted()],
            "kept": [ids[i] for i in self.kept_sorted()],
            "protected_k": self.protected_k,
            "status": self.status.value,
        }


def make_plan(instance: Instance, deleted: Iterable[int],
              status: PlanStatus) -> DeletionPlan:
    """Build a plan, recomputing protected_k from the kept rows."""
    deleted = frozenset(int(i) for i in deleted)
    all_idx = frozenset(range(instance.num_photos))
    if not deleted <= all_idx:
        raise ValueError("deleted set contains invalid photo indices")
    kept = all_idx - deleted
    if not kept:
        raise ValueError("plan must keep at least one photo")
    return DeletionPlan(deleted, kept, protected_k(instance, kept), status)


class Variant(str, Enum):
    TOPK = "topk"
    BUDGET = "budget"


@dataclass(frozen=True)
class ProblemSpec:
    """Which problem to solve: top-k guarantee or fixed deletion budget."""

    variant: Variant
    k: int = 0
    d: int = 0
    keep_set: frozenset[int] = field(default_factory=frozenset)
    margin: float = 0.0

    @staticmethod
    def topk(k: int, keep_set: Iterable[int] = (), margin: float = 0.0) -> "ProblemSpec":
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        return ProblemSpec(Variant.TOPK, k=int(k),
                           keep_set=frozenset(int(i) for i in keep_set),
                           margin=float(margin))

    @staticmethod
    def budget(d: int, keep_set: Iterable[int] = (), margin: float = 0.0) -> "ProblemSpec":
        if d < 0:
            raise ValueError(f"d must be >= 0, got {d}")
        return ProblemSpec(Variant.BUDGET, d=int(d),
                           keep_set=frozenset(int(i) for i in keep_set),
                           margin=float(margin))

    def check(self, instance: Instance) -> None:
        """Validate the spec against instance dimensions."""
        if self.margin < 0 or not math.isfinite(self.margin):
            raise ValueError(f"margin must be finite and >= 0, got {self.margin}")
        if self.variant is Variant.TOPK and not 1 <= self.k <= instance.num_locations - 1:
            raise ValueError(
                f"k={self.k} outside [1, {instance.num_locations - 1}]")
        if self.variant is Variant.BUDGET and not 0 <= self.d <= instance.num_photos - 1:
            raise ValueError(
                f"d={self.d} outside [0, {instance.num_photos - 1}]")
        bad = [i for i in self.keep_set if not 0 <= i < instance.num_photos]
        if bad:
            raise ValueError(f"keep_set indices out of range: {sorted(bad)}")

    def with_keep(self, keep_set: Iterable[int]) -> "ProblemSpec":
        return replace(self, keep_set=frozenset(int(i) for i in keep_set))
