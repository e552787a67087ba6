"""Ratio indicators derived from count tables and citable-item counts.

A quasi impact factor divides a journal's citation total for a window by
the number of citable items it published in that window; the fc/p ratio
divides all-years fractional citations by the census year's citable
items. Journals with a zero denominator are routed to
``undefined_journals`` rather than being assigned a fabricated 0, and are
excluded from downstream percentile and variance runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ._tsv import iter_rows, write_rows
from .corpus import Corpus, JournalTable
from .counts import CountMode, CountTable, WindowSpec

DEFAULT_CITABLE_TYPES = frozenset({"article", "review"})

DENOMINATOR_WINDOWS = ("two_year", "five_year", "census_only")

_QUASI_IF_ID = {
    ("two_year", "IC"): "IF2-IC", ("five_year", "IC"): "IF5-IC",
    ("two_year", "FC"): "IF2-FC", ("five_year", "FC"): "IF5-FC",
    ("two_year", "FC+"): "IF2-FC+", ("five_year", "FC+"): "IF5-FC+",
}


class IndicatorError(Exception):
    pass


@dataclass
class DenominatorTable:
    window: str                  # two_year | five_year | census_only
    values: dict[str, int]

    def __post_init__(self):
        if self.window not in DENOMINATOR_WINDOWS:
            raise IndicatorError(f"unknown denominator window {self.window!r}")


@dataclass
class IndicatorTable:
    indicator_id: str
    values: dict[str, float]
    undefined_journals: set[str] = field(default_factory=set)
    warnings: list[str] = field(default_factory=list)

    def to_tsv(self, path: str | Path) -> None:
        rows = [[jid, self.indicator_id, f"{self.values[jid]:.6f}"]
                for jid in sorted(self.values)]
        write_rows(path, ["journal_id", "indicator_id", "value"], rows)
        if self.undefined_journals:
            sidecar = Path(str(path) + ".undefined")
            write_rows(sidecar, ["journal_id"],
                       [[jid] for jid in sorted(self.undefined_journals)])


def read_indicator_table(path: str | Path) -> IndicatorTable:
    """Read an indicator TSV written by :meth:`IndicatorTable.to_tsv`."""
    values: dict[str, float] = {}
    indicator_id = Path(path).stem
    for lineno, fields in iter_rows(path):
        if fields[0] == "journal_id":
            continue
        if len(fields) != 3:
            raise IndicatorError(
                f"{path}:{lineno}: expected 3 columns, got {len(fields)}")
        jid, ind, value = fields
        indicator_id = ind
        try:
            values[jid] = float(value)
        except ValueError:
            raise IndicatorError(f"{path}:{lineno}: bad value {value!r}") from None
    return IndicatorTable(indicator_id=indicator_id, values=values)


def window_years(window: str, census_year: int) -> range:
    if window == "two_year":
        return range(census_year - 2, census_year)
    if window == "five_year":
        return range(census_year - 5, census_year)
    return range(census_year, census_year + 1)


def compute_denominator(journals: JournalTable, window: str, census_year: int,
                        citable_types: frozenset[str] = DEFAULT_CITABLE_TYPES,
                        corpus: Optional[Corpus] = None) -> DenominatorTable:
    """Sum citable items over the window's years.

    Declared ``items_by_year`` counts are used as-is (they are citable
    counts by definition of the journal master). For journals with no
    declared counts at all, item counts are derived from the corpus's own
    documents of the given citable types, when a corpus is supplied.
    """
    derived: dict[tuple[str, int], int] = {}
    if corpus is not None:
        for doc in corpus.documents:
            if doc.doc_type in citable_types:
                key = (doc.journal_id, doc.pub_year)
                derived[key] = derived.get(key, 0) + 1
    years = window_years(window, census_year)
    values: dict[str, int] = {}
    for j in journals:
        if j.items_by_year:
            total = sum(j.items_by_year.get(y, 0) for y in years)
        else:
            total = sum(derived.get((j.journal_id, y), 0) for y in years)
        values[j.journal_id] = total
    return DenominatorTable(window=window, values=values)


def _divide(indicator_id: str, numerators: dict[str, float],
            denominators: dict[str, int]) -> IndicatorTable:
    values: dict[str, float] = {}
    undefined: set[str] = set()
    for jid in numerators:
        denom = denominators.get(jid, 0)
        if denom > 0:
            values[jid] = numerators[jid] / denom
        else:
            undefined.add(jid)
    return IndicatorTable(indicator_id=indicator_id, values=values,
                          undefined_journals=undefined)


def quasi_if(numerators: CountTable, denominators: DenominatorTable
             ) -> IndicatorTable:
    """Per-journal citation total over citable items for the same window."""
    if numerators.window.kind != denominators.window:
        raise IndicatorError(
            f"window mismatch: numerator {numerators.window.kind}, "
            f"denominator {denominators.window}")
    indicator_id = _QUASI_IF_ID.get((numerators.window.kind, numerators.mode.label))
    if indicator_id is None:
        raise IndicatorError(
            f"no quasi impact factor defined for window {numerators.window.kind!r}")
    return _divide(indicator_id, numerators.values, denominators.values)


def fc_over_p(all_year_fc: CountTable, items_census: DenominatorTable
              ) -> IndicatorTable:
    """All-years fractional citations over census-year citable items."""
    if all_year_fc.window.kind != "all_years":
        raise IndicatorError("fc/p numerator must use the all_years window")
    if all_year_fc.mode != CountMode("fractional", "in_window"):
        raise IndicatorError("fc/p numerator must be fractional with the "
                             "in-window (all valid years) base")
    if items_census.window != "census_only":
        raise IndicatorError("fc/p denominator must be census-year items")
    return _divide("FC/P", all_year_fc.values, items_census.values)


def count_indicator(table: CountTable) -> IndicatorTable:
    """View a count table as an indicator (for percentiles, correlations,
    variance runs). Every journal is defined; totals may be 0."""
    return IndicatorTable(indicator_id=table.variable_id,
                          values={j: float(v) for j, v in table.values.items()})


def denominator_indicator(table: DenominatorTable, indicator_id: str
                          ) -> IndicatorTable:
    return IndicatorTable(indicator_id=indicator_id,
                          values={j: float(v) for j, v in table.values.items()})


def import_external_indicator(path: str | Path, indicator_id: str,
                              journals: JournalTable) -> IndicatorTable:
    """Load externally supplied per-journal values (e.g. published impact
    factors). Journals absent from the master are rejected into the
    table's warning list; non-numeric values are record-level errors."""
    values: dict[str, float] = {}
    warnings: list[str] = []
    for lineno, fields in iter_rows(path):
        if fields[0] == "journal_id":
            continue
        if len(fields) == 3:
            jid, _, value = fields
        elif len(fields) == 2:
            jid, value = fields
        else:
            warnings.append(f"{path}:{lineno}: expected 2 or 3 columns")
            continue
        try:
            v = float(value)
        except ValueError:
            warnings.append(f"{path}:{lineno}: non-numeric value {value!r}")
            continue
        if jid not in journals.by_id:
            warnings.append(f"{path}:{lineno}: unknown journal {jid!r}")
            continue
        values[jid] = v
    return IndicatorTable(indicator_id=indicator_id, values=values,
                          warnings=warnings)
