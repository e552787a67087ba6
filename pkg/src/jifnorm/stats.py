"""Correlations, between-field effect measures, and distribution screens.

Field effects are tested without distributional assumptions: a one-way
random-effects decomposition by the method of moments gives the between-
and within-field variance components, and a label-permutation test gives
the significance of the observed separation. The permutation p-value uses
the add-one estimator (1 + exceedances) / (n_perm + 1), so it can never
be exactly zero. Components are on the raw scale of the indicator, so
reductions and significance patterns are comparable across counting
variants but coefficient magnitudes are not comparable with model-based
estimates on transformed scales.

Fields smaller than ``min_group_size`` journals are excluded before any
of these computations, mirroring the usual treatment of tiny residual
categories.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ._tsv import iter_rows, write_rows
from .corpus import JournalTable
from .indicators import IndicatorTable


class StatsError(Exception):
    pass


@dataclass
class FieldScheme:
    """A unique assignment of each journal to one broad field."""

    name: str
    assignment: dict[str, str]
    min_group_size: int = 10

    def group_arrays(self, values: dict[str, float]
                     ) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
        """Align values with field labels and apply the size filter.

        Returns (values, integer labels, retained field codes, excluded
        field codes); journals must all be assigned, fields below
        ``min_group_size`` are dropped along with their journals.
        """
        ids = sorted(values)
        missing = [j for j in ids if j not in self.assignment]
        if missing:
            raise StatsError(
                f"{len(missing)} journals lack a field assignment "
                f"(first: {missing[0]!r})")
        fields = [self.assignment[j] for j in ids]
        sizes: dict[str, int] = {}
        for f in fields:
            sizes[f] = sizes.get(f, 0) + 1
        retained = sorted(f for f, n in sizes.items() if n >= self.min_group_size)
        excluded = sorted(f for f, n in sizes.items() if n < self.min_group_size)
        pos = {f: i for i, f in enumerate(retained)}
        v, g = [], []
        for j, f in zip(ids, fields):
            if f in pos:
                v.append(values[j])
                g.append(pos[f])
        return (np.array(v, dtype=np.float64), np.array(g, dtype=np.int64),
                retained, excluded)


def load_field_scheme(path: str | Path, name: Optional[str] = None,
                      min_group_size: int = 10) -> FieldScheme:
    """Load a two-column TSV (journal_id, field)."""
    assignment: dict[str, str] = {}
    for lineno, fields in iter_rows(path):
        if fields[0] == "journal_id":
            continue
        if len(fields) != 2:
            raise StatsError(f"{path}:{lineno}: expected 2 columns")
        jid, code = fields
        if jid in assignment and assignment[jid] != code:
            raise StatsError(f"{path}:{lineno}: journal {jid!r} assigned twice")
        assignment[jid] = code
    return FieldScheme(name=name or Path(path).stem, assignment=assignment,
                       min_group_size=min_group_size)


def save_field_scheme(scheme: FieldScheme, path: str | Path) -> None:
    rows = [[jid, scheme.assignment[jid]] for jid in sorted(scheme.assignment)]
    write_rows(path, ["journal_id", "field"], rows)


def scheme_from_journals(journals: JournalTable, min_group_size: int = 10
                         ) -> FieldScheme:
    return FieldScheme(name="journal-table",
                       assignment={j.journal_id: j.field_code for j in journals},
                       min_group_size=min_group_size)


@dataclass
class VarCompResult:
    indicator_id: str
    sigma2_between: float
    sigma2_within: float
    eta2: float
    perm_p: float = float("nan")
    groups_used: int = 0
    n_journals: int = 0
    excluded_fields: list[str] = field(default_factory=list)
    dispersion_by_field: dict[str, float] = field(default_factory=dict)


def _check_pair(x: Sequence[float], y: Sequence[float]
                ) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1 or xa.size != ya.size:
        raise StatsError("inputs must be 1-d sequences of equal length")
    if xa.size < 3:
        raise StatsError("need at least 3 observations")
    return xa, ya


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation; zero variance on either side is an error
    (undefined, reported rather than propagated as NaN)."""
    xa, ya = _check_pair(x, y)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("correlation undefined: zero variance")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def average_ranks(x: Sequence[float]) -> np.ndarray:
    """Ranks 1..n with tied values receiving their average rank."""
    xa = np.asarray(x, dtype=np.float64)
    order = np.argsort(xa, kind="stable")
    xs = xa[order]
    ranks = np.empty(xa.size, dtype=np.float64)
    i = 0
    while i < xa.size:
        j = i
        while j + 1 < xa.size and xs[j + 1] == xs[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank-order correlation: Pearson applied to average ranks."""
    xa, ya = _check_pair(x, y)
    return pearson(average_ranks(xa), average_ranks(ya))


@dataclass
class CorrelationMatrix:
    """Square matrix with rank-order correlations in the upper triangle and
    product-moment correlations in the lower one; the diagonal is empty."""

    ids: list[str]
    matrix: np.ndarray
    n_journals: int
    undefined_pairs: list[tuple[str, str]] = field(default_factory=list)

    def to_tsv(self, path: str | Path) -> None:
        rows = []
        for i, rid in enumerate(self.ids):
            row = [rid]
            for j in range(len(self.ids)):
                v = self.matrix[i, j]
                row.append("" if np.isnan(v) else f"{v:.4f}")
            rows.append(row)
        write_rows(path, ["indicator_id"] + list(self.ids), rows,
                   preamble=[f"n_journals\t{self.n_journals}",
                             "upper triangle: rank-order (Spearman); "
                             "lower triangle: product-moment (Pearson)"])


def correlation_matrix(tables: list[IndicatorTable]) -> CorrelationMatrix:
    """Pairwise correlations over the journals common to all tables."""
    if len(tables) < 2:
        raise StatsError("need at least two indicator tables")
    common = set(tables[0].values)
    for t in tables[1:]:
        common &= set(t.values)
    if len(common) < 3:
        raise StatsError(
            f"only {len(common)} journals shared by all tables; need >= 3")
    ids = sorted(common)
    data = [np.array([t.values[j] for j in ids]) for t in tables]
    k = len(tables)
    matrix = np.full((k, k), np.nan)
    undefined = []
    for i in range(k):
        for j in range(i + 1, k):
            try:
                matrix[i, j] = spearman(data[i], data[j])
                matrix[j, i] = pearson(data[i], data[j])
            except StatsError:
                undefined.append((tables[i].indicator_id, tables[j].indicator_id))
    return CorrelationMatrix(ids=[t.indicator_id for t in tables],
                             matrix=matrix, n_journals=len(ids),
                             undefined_pairs=undefined)


def _group_ss(values: np.ndarray, labels: np.ndarray, k: int
              ) -> tuple[float, float, np.ndarray]:
    """(SS_between, SS_total, group sizes) for integer labels 0..k-1."""
    n = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.bincount(labels, weights=values, minlength=k)
    mean = values.mean()
    ss_total = float(((values - mean) ** 2).sum())
    ss_between = float((n * (sums / n - mean) ** 2).sum())
    return ss_between, ss_total, n


def eta_squared(values: dict[str, float], scheme: FieldScheme) -> float:
    """Share of the total sum of squares explained by field membership."""
    v, g, retained, _ = scheme.group_arrays(values)
    if len(retained) < 2:
        raise StatsError("need at least 2 retained fields")
    ss_between, ss_total, _ = _group_ss(v, g, len(retained))
    if ss_total == 0.0:
        raise StatsError("eta squared undefined: zero total sum of squares")
    return ss_between / ss_total


def varcomp_moments(values: dict[str, float], scheme: FieldScheme,
                    indicator_id: str = "") -> VarCompResult:
    """One-way random-effects variance components by the method of moments.

    sigma2_within is the within-field mean square; sigma2_between is
    (MS_between - MS_within) / n0 clamped at zero, with
    n0 = (N - sum(n_i^2)/N) / (k - 1).
    """
    v, g, retained, excluded = scheme.group_arrays(values)
    k = len(retained)
    if k < 2:
        raise StatsError("need at least 2 retained fields")
    n_total = v.size
    ss_between, ss_total, sizes = _group_ss(v, g, k)
    ss_within = ss_total - ss_between
    ms_within = ss_within / (n_total - k)
    ms_between = ss_between / (k - 1)
    n0 = (n_total - float((sizes ** 2).sum()) / n_total) / (k - 1)
    sigma2_between = max(0.0, (ms_between - ms_within) / n0)
    eta2 = ss_between / ss_total if ss_total > 0 else 0.0

    dispersion: dict[str, float] = {}
    for i, code in enumerate(retained):
        group = v[g == i]
        mean = float(group.mean())
        var = float(group.var(ddof=1)) if group.size > 1 else 0.0
        dispersion[code] = var / mean if mean != 0.0 else float("nan")

    return VarCompResult(indicator_id=indicator_id,
                         sigma2_between=sigma2_between,
                         sigma2_within=ms_within, eta2=eta2,
                         groups_used=k, n_journals=n_total,
                         excluded_fields=excluded,
                         dispersion_by_field=dispersion)


def _perm_stat(values: np.ndarray, labels: np.ndarray, k: int,
               statistic: str, n0: float, n_total: int) -> float:
    ss_between, ss_total, _ = _group_ss(values, labels, k)
    if statistic == "eta2":
        return ss_between / ss_total if ss_total > 0 else 0.0
    ms_within = (ss_total - ss_between) / (n_total - k)
    ms_between = ss_between / (k - 1)
    return max(0.0, (ms_between - ms_within) / n0)


def permutation_test(values: dict[str, float], scheme: FieldScheme,
                     statistic: str = "eta2", n_perm: int = 999,
                     seed: int = 0, n_threads: int = 1) -> float:
    """Right-tailed label-permutation p-value for the field effect.

    Field labels are shuffled uniformly; each permutation index draws from
    its own seed-sequence child, so the result is identical for any thread
    count.
    """
    if statistic not in ("eta2", "sigma2_between"):
        raise StatsError(f"unknown permutation statistic {statistic!r}")
    if n_perm < 999:
        raise StatsError("n_perm must be at least 999")
    v, g, retained, _ = scheme.group_arrays(values)
    k = len(retained)
    if k < 2:
        raise StatsError("need at least 2 retained fields")
    n_total = v.size
    sizes = np.bincount(g, minlength=k).astype(np.float64)
    n0 = (n_total - float((sizes ** 2).sum()) / n_total) / (k - 1)

    observed = _perm_stat(v, g, k, statistic, n0, n_total)
    children = np.random.SeedSequence(seed).spawn(n_perm)

    def one(i: int) -> float:
        rng = np.random.default_rng(children[i])
        return _perm_stat(v, rng.permutation(g), k, statistic, n0, n_total)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            stats = list(pool.map(one, range(n_perm)))
    else:
        stats = [one(i) for i in range(n_perm)]
    exceed = sum(1 for s in stats if s >= observed)
    return (1 + exceed) / (n_perm + 1)


def analyze_indicator(indicator: IndicatorTable, scheme: FieldScheme,
                      statistic: str = "eta2", n_perm: int = 999,
                      seed: int = 0, n_threads: int = 1) -> VarCompResult:
    """Variance components plus permutation significance for one indicator."""
    result = varcomp_moments(indicator.values, scheme,
                             indicator_id=indicator.indicator_id)
    result.perm_p = permutation_test(indicator.values, scheme,
                                     statistic=statistic, n_perm=n_perm,
                                     seed=seed, n_threads=n_threads)
    return result


def variance_reduction(reference: VarCompResult, alternative: VarCompResult
                       ) -> float:
    """Relative drop of the between-field component versus a reference;
    negative when the alternative is worse."""
    if reference.sigma2_between == 0.0:
        raise StatsError("variance reduction undefined: reference component is 0")
    return ((reference.sigma2_between - alternative.sigma2_between)
            / reference.sigma2_between)


def ks_normality(values: Sequence[float]) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a normal fitted with
    the sample's mean and (ddof=1) variance. A screen only: no p-value."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    n = v.size
    if n < 5:
        raise StatsError("need at least 5 observations")
    sd = float(v.std(ddof=1))
    if sd == 0.0:
        raise StatsError("normality screen undefined: zero variance")
    z = (v - v.mean()) / sd
    cdf = np.array([0.5 * (1.0 + math.erf(x / math.sqrt(2.0))) for x in z])
    i = np.arange(1, n + 1)
    d_plus = float((i / n - cdf).max())
    d_minus = float((cdf - (i - 1) / n).max())
    return max(d_plus, d_minus)
