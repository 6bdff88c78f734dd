"""Long-run hype-group classification and cluster band computation."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data import ExternalSeries, _freeze
from .errors import AlignmentError, DataValidationError, NumericalError, UsageError
from .indices import HypeSeries

RAW_LABELS = ("Over-Hyped", "Neutral-Hyped", "Under-Hyped")
CAP_ADJUSTED_LABELS = ("Relatively Hyped", "Moderately Hyped", "Less Prominent")


@dataclass(frozen=True)
class ClusterGroup:
    label: str
    members: tuple[str, ...]
    group_mean: float


@dataclass(frozen=True)
class ClusterAssignment:
    """Ordered partition of entities into hype groups, highest group first."""

    groups: tuple[ClusterGroup, ...]
    method: str

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for group in self.groups:
            if not group.members:
                raise NumericalError(f"degenerate partition: group {group.label!r} is empty")
            overlap = seen & set(group.members)
            if overlap:
                raise DataValidationError(
                    f"entities assigned to multiple groups: {', '.join(sorted(overlap))}"
                )
            seen.update(group.members)
        means = [g.group_mean for g in self.groups]
        for hi, lo in zip(means, means[1:]):
            if not hi > lo:
                raise NumericalError(
                    f"group means must be strictly decreasing, got {means}"
                )

    @classmethod
    def from_memberships(
        cls,
        memberships: Sequence[tuple[str, Sequence[str]]],
        averages: Mapping[str, float],
        method: str = "manual",
    ) -> "ClusterAssignment":
        """Build an assignment from (label, members) pairs; means are computed
        from the averages and groups are ordered highest mean first."""
        groups = []
        for label, members in memberships:
            missing = [m for m in members if m not in averages]
            if missing:
                raise DataValidationError(
                    f"no period average for: {', '.join(missing)}"
                )
            mean = float(np.mean([averages[m] for m in members]))
            groups.append(ClusterGroup(label, tuple(members), mean))
        groups.sort(key=lambda g: -g.group_mean)
        return cls(tuple(groups), method)

    def label_of(self, entity: str) -> str:
        for group in self.groups:
            if entity in group.members:
                return group.label
        raise DataValidationError(f"entity {entity} is not in any group")


@dataclass(frozen=True)
class BandSeries:
    """Per-date cross-member mean with a one-standard-deviation band."""

    dates: tuple[dt.date, ...]
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        for name in ("mean", "lower", "upper"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name), dtype=np.float64)))
        if not (len(self.dates) == len(self.mean) == len(self.lower) == len(self.upper)):
            raise DataValidationError("band series arrays must share one length")
        if (self.lower > self.mean).any() or (self.mean > self.upper).any():
            raise DataValidationError("band must satisfy lower <= mean <= upper")

    @property
    def std(self) -> np.ndarray:
        return self.upper - self.mean


def period_average(series: HypeSeries | ExternalSeries) -> float:
    """Arithmetic mean of a series over all its dates."""
    values = np.asarray(series.values, dtype=np.float64)
    if len(values) == 0:
        raise UsageError("period average of an empty series is undefined")
    return float(values.mean())


def _kmeans1d_partition(values: Sequence[float], k: int) -> list[list[int]]:
    """Exact minimum within-group-sum-of-squares partition of 1-D data.

    Dynamic program over the sorted order; deterministic, no initialization.
    Returns index groups in ascending value order.
    """
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    v = [float(values[i]) for i in order]
    n = len(v)
    prefix = np.concatenate([[0.0], np.cumsum(v)])
    prefix_sq = np.concatenate([[0.0], np.cumsum(np.square(v))])

    def cost(i: int, j: int) -> float:
        # within-group SS of v[i..j] inclusive
        count = j - i + 1
        total = prefix[j + 1] - prefix[i]
        return float(prefix_sq[j + 1] - prefix_sq[i] - total * total / count)

    inf = float("inf")
    best = [[inf] * n for _ in range(k + 1)]
    cut = [[-1] * n for _ in range(k + 1)]
    for j in range(n):
        best[1][j] = cost(0, j)
    for g in range(2, k + 1):
        for j in range(g - 1, n):
            for i in range(g - 1, j + 1):
                candidate = best[g - 1][i - 1] + cost(i, j)
                if candidate < best[g][j]:
                    best[g][j] = candidate
                    cut[g][j] = i
    bounds = []
    j = n - 1
    for g in range(k, 1, -1):
        i = cut[g][j]
        bounds.append((i, j))
        j = i - 1
    bounds.append((0, j))
    bounds.reverse()
    return [[order[t] for t in range(i, j + 1)] for i, j in bounds]


def classify(
    averages: Mapping[str, float],
    k: int = 3,
    method: str = "kmeans1d",
    cutpoints: Sequence[float] | None = None,
    labels: Sequence[str] | None = None,
) -> ClusterAssignment:
    """Partition entities into k hype groups by their period averages.

    thresholds  entity joins the highest group whose cutpoint its average
                meets, scanning the k-1 strictly decreasing cutpoints
    kmeans1d    exact dynamic-programming minimization of within-group sum
                of squares over ordered partitions
    """
    if k < 1:
        raise UsageError("k must be >= 1")
    if method not in ("thresholds", "kmeans1d"):
        raise UsageError(f"method must be 'thresholds' or 'kmeans1d', got {method!r}")
    entities = list(averages)
    if len(entities) < k:
        raise NumericalError(f"cannot form {k} groups from {len(entities)} entities")
    if len(set(averages.values())) < k:
        raise NumericalError(
            f"degenerate partition: fewer than {k} distinct period averages"
        )
    if labels is None:
        labels = CAP_ADJUSTED_LABELS if k == 3 else tuple(f"group_{i + 1}" for i in range(k))
    if len(labels) != k:
        raise UsageError(f"need {k} labels, got {len(labels)}")

    if method == "thresholds":
        if cutpoints is None or len(cutpoints) != k - 1:
            raise UsageError(f"thresholds method needs {k - 1} cutpoints")
        cuts = [float(c) for c in cutpoints]
        for hi, lo in zip(cuts, cuts[1:]):
            if not hi > lo:
                raise UsageError(f"cutpoints must be strictly decreasing, got {cuts}")
        member_lists: list[list[str]] = [[] for _ in range(k)]
        for entity in entities:
            value = averages[entity]
            slot = k - 1
            for g, cut in enumerate(cuts):
                if value >= cut:
                    slot = g
                    break
            member_lists[slot].append(entity)
    else:
        index_groups = _kmeans1d_partition([averages[e] for e in entities], k)
        member_lists = [[entities[i] for i in group] for group in reversed(index_groups)]

    groups = []
    for label, members in zip(labels, member_lists):
        members = sorted(members, key=lambda e: (-averages[e], e))
        mean = float(np.mean([averages[m] for m in members])) if members else float("nan")
        groups.append(ClusterGroup(label, tuple(members), mean))
    return ClusterAssignment(tuple(groups), method)


def cluster_averages(
    assignment: ClusterAssignment, averages: Mapping[str, float]
) -> dict[str, float]:
    """Unweighted mean of member period-averages, per group label."""
    out: dict[str, float] = {}
    for group in assignment.groups:
        missing = [m for m in group.members if m not in averages]
        if missing:
            raise DataValidationError(
                f"group {group.label!r}: no period average for {', '.join(missing)}"
            )
        out[group.label] = float(np.mean([averages[m] for m in group.members]))
    return out


def cluster_band(member_series: Sequence[HypeSeries]) -> BandSeries:
    """Per-date cross-member mean and sample std band over aligned series."""
    if len(member_series) < 2:
        raise UsageError("cluster band needs at least 2 member series")
    dates = member_series[0].dates
    for series in member_series[1:]:
        if series.dates != dates:
            raise AlignmentError(
                f"series {series.entity} dates do not match series {member_series[0].entity}"
            )
    matrix = np.column_stack([s.values for s in member_series])
    mean = matrix.mean(axis=1)
    std = matrix.std(axis=1, ddof=1)
    return BandSeries(dates, mean, mean - std, mean + std)
