"""Developmental distribution statistics over labeled corpora.

Age binning, per-1,000-utterance rates with Wilson intervals,
subject/object log-ratios, subject shares, cross-construction deltas with
bootstrap CIs, and per-child longitudinal summaries. Counting is
associative, so shards can be binned separately and merged.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .labels import (EMBEDDED_Q, MATRIX_Q, OBJECT_LABELS, RC, SUBJECT_LABELS, Label)

GROUP_ADULT = "adult"
GROUP_CHILD = "child"
GROUPS = (GROUP_ADULT, GROUP_CHILD)

CONSTRUCTIONS = (MATRIX_Q, EMBEDDED_Q, RC)

DEFAULT_Z = 1.96
DEFAULT_EPSILON = 0.5  # per-1,000 units
DEFAULT_MIN_COUNT = 10
DEFAULT_RESAMPLES = 10_000


@dataclass(frozen=True)
class BinSpec:
    """Half-open age bins [min_age + k*width, min_age + (k+1)*width)."""

    width_months: int = 6
    min_age: float = 3.0
    max_age: float = 80.0

    def __post_init__(self):
        if self.width_months <= 0:
            raise ValueError("bin width must be positive")
        if not self.min_age < self.max_age:
            raise ValueError("min_age must be below max_age")

    def bin_index(self, age: float) -> int | None:
        if not (self.min_age <= age < self.max_age):
            return None
        return int((age - self.min_age) // self.width_months)

    def bin_start(self, index: int) -> float:
        return self.min_age + index * self.width_months


@dataclass(frozen=True)
class LabeledUtterance:
    """The slice of an utterance the statistics need."""

    child_age_months: float | None
    speaker_group: str
    labels: frozenset[Label]


@dataclass
class Cell:
    n: int = 0
    label_counts: Counter = field(default_factory=Counter)


@dataclass
class BinTable:
    spec: BinSpec
    cells: dict[tuple[int, str], Cell] = field(default_factory=dict)
    dropped_no_age: int = 0
    dropped_out_of_range: int = 0
    dropped_other_group: int = 0

    def cell(self, bin_index: int, group: str) -> Cell:
        return self.cells.setdefault((bin_index, group), Cell())

    def merge(self, other: "BinTable") -> "BinTable":
        if other.spec != self.spec:
            raise ValueError("cannot merge tables with different bin specs")
        for key, cell in other.cells.items():
            mine = self.cells.setdefault(key, Cell())
            mine.n += cell.n
            mine.label_counts.update(cell.label_counts)
        self.dropped_no_age += other.dropped_no_age
        self.dropped_out_of_range += other.dropped_out_of_range
        self.dropped_other_group += other.dropped_other_group
        return self

    def family_counts(self, bin_index: int, group: str,
                      construction: str) -> tuple[int, int]:
        """(subject count, object count) for a construction in one cell."""
        cell = self.cells.get((bin_index, group))
        if cell is None:
            return 0, 0
        subj = sum(cell.label_counts[l] for l in SUBJECT_LABELS[construction])
        obj = sum(cell.label_counts[l] for l in OBJECT_LABELS[construction])
        return subj, obj


def analysis_group(speaker_group: str, include_other_child: bool = False) -> str | None:
    if speaker_group == "adult":
        return GROUP_ADULT
    if speaker_group == "target_child":
        return GROUP_CHILD
    if speaker_group == "other_child" and include_other_child:
        return GROUP_ADULT
    return None


def bin_utterances(utterances: Iterable[LabeledUtterance], spec: BinSpec,
                   include_other_child: bool = False) -> BinTable:
    """Count utterances per (age bin, speaker side).

    An utterance counts once toward a cell's n and once per label it
    carries; utterances missing age or outside the bin range are dropped
    and tallied.
    """
    table = BinTable(spec=spec)
    for utt in utterances:
        group = analysis_group(utt.speaker_group, include_other_child)
        if group is None:
            table.dropped_other_group += 1
            continue
        if utt.child_age_months is None:
            table.dropped_no_age += 1
            continue
        index = spec.bin_index(utt.child_age_months)
        if index is None:
            table.dropped_out_of_range += 1
            continue
        cell = table.cell(index, group)
        cell.n += 1
        for label in utt.labels:
            cell.label_counts[label] += 1
    return table


def wilson_interval(count: int, n: int, z: float = DEFAULT_Z) -> tuple[float, float]:
    """Wilson score bounds for a binomial proportion count/n."""
    if n < 1:
        raise ValueError("wilson_interval requires n >= 1")
    if not 0 <= count <= n:
        raise ValueError("count must lie in 0..n")
    p = count / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return center - half, center + half


@dataclass(frozen=True)
class RateEstimate:
    label: Label
    bin_index: int
    bin_start: float
    group: str
    count: int
    n: int
    rate_per_1000: float
    wilson_low: float
    wilson_high: float


def rate_table(table: BinTable, labels: Sequence[Label] | None = None,
               z: float = DEFAULT_Z) -> list[RateEstimate]:
    """One RateEstimate per (label, bin, group) cell; cells with n=0 omitted."""
    wanted = list(Label) if labels is None else list(labels)
    out = []
    for (bin_index, group) in sorted(table.cells):
        cell = table.cells[(bin_index, group)]
        if cell.n == 0:
            continue
        for label in wanted:
            count = cell.label_counts.get(label, 0)
            low, high = wilson_interval(count, cell.n, z)
            out.append(RateEstimate(
                label=label, bin_index=bin_index,
                bin_start=table.spec.bin_start(bin_index), group=group,
                count=count, n=cell.n, rate_per_1000=count / cell.n * 1000,
                wilson_low=low, wilson_high=high))
    return out


@dataclass(frozen=True)
class LogRatioPoint:
    construction: str
    bin_index: int
    bin_start: float
    group: str
    subj_rate: float
    obj_rate: float
    epsilon: float
    value: float


def log_ratio_series(table: BinTable, construction: str,
                     epsilon: float = DEFAULT_EPSILON) -> list[LogRatioPoint]:
    """log((subj_rate + eps) / (obj_rate + eps)) on per-1,000 rates, natural
    log; positive values mean a subject bias."""
    out = []
    for (bin_index, group) in sorted(table.cells):
        cell = table.cells[(bin_index, group)]
        if cell.n == 0:
            continue
        subj, obj = table.family_counts(bin_index, group, construction)
        subj_rate = subj / cell.n * 1000
        obj_rate = obj / cell.n * 1000
        value = math.log((subj_rate + epsilon) / (obj_rate + epsilon))
        out.append(LogRatioPoint(
            construction=construction, bin_index=bin_index,
            bin_start=table.spec.bin_start(bin_index), group=group,
            subj_rate=subj_rate, obj_rate=obj_rate, epsilon=epsilon, value=value))
    return out


@dataclass(frozen=True)
class SubjectShare:
    construction: str
    bin_index: int
    bin_start: float
    group: str
    count_subj: int
    count_obj: int

    @property
    def p_subj(self) -> float:
        return self.count_subj / (self.count_subj + self.count_obj)


def subject_share_table(table: BinTable,
                        constructions: Sequence[str] = CONSTRUCTIONS) -> list[SubjectShare]:
    """p_subj per (construction, bin, group); zero-denominator cells omitted."""
    out = []
    for construction in constructions:
        for (bin_index, group) in sorted(table.cells):
            subj, obj = table.family_counts(bin_index, group, construction)
            if subj + obj == 0:
                continue
            out.append(SubjectShare(
                construction=construction, bin_index=bin_index,
                bin_start=table.spec.bin_start(bin_index), group=group,
                count_subj=subj, count_obj=obj))
    return out


@dataclass(frozen=True)
class DeltaSubj:
    pair: tuple[str, str]
    group: str
    n_bins: int
    mean: float | None
    ci_low: float | None
    ci_high: float | None
    min_count: int
    n_resamples: int
    seed: int


def delta_subj(table: BinTable, pair: tuple[str, str], group: str,
               min_count: int = DEFAULT_MIN_COUNT,
               n_resamples: int = DEFAULT_RESAMPLES,
               seed: int = 0) -> DeltaSubj:
    """Mean over qualifying bins of p_subj(c1) - p_subj(c2), with a seeded
    percentile bootstrap (resampling bins with replacement) for the 95% CI.

    A bin qualifies when both constructions have subj+obj >= min_count in
    that (bin, group) cell. Zero qualifying bins yields an explicit empty
    result rather than an error.
    """
    c1, c2 = pair
    deltas = []
    indices = sorted({b for (b, g) in table.cells if g == group})
    for bin_index in indices:
        s1, o1 = table.family_counts(bin_index, group, c1)
        s2, o2 = table.family_counts(bin_index, group, c2)
        if s1 + o1 >= min_count and s2 + o2 >= min_count:
            deltas.append(s1 / (s1 + o1) - s2 / (s2 + o2))
    if not deltas:
        return DeltaSubj(pair, group, 0, None, None, None,
                         min_count, n_resamples, seed)
    arr = np.asarray(deltas, dtype=float)
    rng = np.random.default_rng(seed)
    resampled = arr[rng.integers(0, len(arr), size=(n_resamples, len(arr)))]
    means = resampled.mean(axis=1)
    ci_low, ci_high = np.percentile(means, [2.5, 97.5])
    return DeltaSubj(pair, group, len(arr), float(arr.mean()),
                     float(ci_low), float(ci_high), min_count, n_resamples, seed)


@dataclass(frozen=True)
class MonthRow:
    month: int
    n_adult: int
    n_child: int
    fgd_adult: int
    fgd_child: int

    @property
    def rate_adult(self) -> float | None:
        return self.fgd_adult / self.n_adult * 1000 if self.n_adult else None

    @property
    def rate_child(self) -> float | None:
        return self.fgd_child / self.n_child * 1000 if self.n_child else None

    @property
    def adult_child_ratio(self) -> float | None:
        """>1 means the construction is more prevalent in adult speech.
        Undefined when the child rate is zero or either stream is empty."""
        if self.rate_adult is None or not self.rate_child:
            return None
        return self.rate_adult / self.rate_child


@dataclass
class LongitudinalReport:
    months: list[MonthRow]
    label_totals: dict[tuple[Label, str], int]
    dropped_no_age: int


def child_longitudinal_summary(utterances: Iterable[LabeledUtterance],
                               fgd_labels: frozenset[Label] | None = None,
                               month_range: tuple[int, int] | None = None,
                               include_other_child: bool = False) -> LongitudinalReport:
    """Per-month exposure summary for one target child's transcripts.

    Counts both speech streams by calendar month of child age: total
    utterances, utterances carrying any label in `fgd_labels` (default:
    every label), per-1,000 rates, and the adult/child rate ratio (None
    when the child rate is zero). Also accumulates per-label totals per
    group over the included months.
    """
    if fgd_labels is None:
        fgd_labels = frozenset(Label)
    totals: dict[int, dict[str, list[int]]] = {}
    label_totals: dict[tuple[Label, str], int] = {}
    dropped = 0
    for utt in utterances:
        group = analysis_group(utt.speaker_group, include_other_child)
        if group is None:
            continue
        if utt.child_age_months is None:
            dropped += 1
            continue
        month = int(math.floor(utt.child_age_months))
        if month_range is not None and not (month_range[0] <= month <= month_range[1]):
            continue
        slot = totals.setdefault(month, {g: [0, 0] for g in GROUPS})[group]
        slot[0] += 1
        if utt.labels & fgd_labels:
            slot[1] += 1
        for label in utt.labels:
            key = (label, group)
            label_totals[key] = label_totals.get(key, 0) + 1
    months = [MonthRow(month=m,
                       n_adult=v[GROUP_ADULT][0], n_child=v[GROUP_CHILD][0],
                       fgd_adult=v[GROUP_ADULT][1], fgd_child=v[GROUP_CHILD][1])
              for m, v in sorted(totals.items())]
    return LongitudinalReport(months=months, label_totals=label_totals,
                              dropped_no_age=dropped)
