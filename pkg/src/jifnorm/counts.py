"""Per-journal citation totals for a (window, counting mode) pair.

Windows are anchored on the census year Y: ``two_year`` covers {Y-2, Y-1},
``five_year`` covers {Y-5 .. Y-1}, ``all_years`` covers [1900, Y]. Years
classified pre-1900 or beyond the census year never fall in any window.

Counting modes:

* integer — every matched, valid, in-window reference contributes 1.
* fractional, in-window base — each such reference contributes 1/k where
  k is the citing document's number of valid in-window references,
  matched or not. Fractionation follows citing-side behavior, so
  unmatched venues still widen the denominator.
* fractional, whole-list base (the "+" variants) — each contributes
  1/NRef, NRef being the document's declared total reference count.

With the in-window base a citing document hands out at most total weight
1 (exactly 1 when all its in-window references match), which is what
normalizes fractional totals to document counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._tsv import write_rows
from .corpus import Corpus, Document, JournalTable
from .refmatch import RefTable, STATUS_VALID, YEAR_VALID, match_corpus

WINDOW_KINDS = ("two_year", "five_year", "all_years")


class CountError(Exception):
    pass


@dataclass(frozen=True)
class WindowSpec:
    kind: str
    census_year: int

    def __post_init__(self):
        if self.kind not in WINDOW_KINDS:
            raise CountError(f"unknown window kind {self.kind!r}")

    @property
    def lo(self) -> int:
        if self.kind == "two_year":
            return self.census_year - 2
        if self.kind == "five_year":
            return self.census_year - 5
        return 1900

    @property
    def hi(self) -> int:
        if self.kind == "all_years":
            return self.census_year
        return self.census_year - 1

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class CountMode:
    counting: str                    # "integer" | "fractional"
    fraction_base: str = "in_window"  # "in_window" | "all_refs"; fractional only

    def __post_init__(self):
        if self.counting not in ("integer", "fractional"):
            raise CountError(f"unknown counting mode {self.counting!r}")
        if self.fraction_base not in ("in_window", "all_refs"):
            raise CountError(f"unknown fraction base {self.fraction_base!r}")

    @property
    def label(self) -> str:
        if self.counting == "integer":
            return "IC"
        return "FC+" if self.fraction_base == "all_refs" else "FC"


INTEGER = CountMode("integer")
FRACTIONAL = CountMode("fractional", "in_window")
FRACTIONAL_PLUS = CountMode("fractional", "all_refs")

_WINDOW_SUFFIX = {"two_year": "2", "five_year": "5", "all_years": ""}


def variable_id(window: WindowSpec, mode: CountMode) -> str:
    """Canonical citation-total variable name, e.g. TC-IC2, TC-FC5+."""
    suffix = _WINDOW_SUFFIX[window.kind]
    base = {"IC": f"TC-IC{suffix}", "FC": f"TC-FC{suffix}",
            "FC+": f"TC-FC{suffix}+"}[mode.label]
    return base


@dataclass
class CountTable:
    window: WindowSpec
    mode: CountMode
    values: dict[str, float]
    contributing_docs: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def variable_id(self) -> str:
        return variable_id(self.window, self.mode)

    def to_tsv(self, path: str | Path) -> None:
        is_int = self.mode.counting == "integer"
        rows = []
        for jid in sorted(self.values):
            v = self.values[jid]
            rows.append([jid, self.window.kind, self.mode.label,
                         str(int(v)) if is_int else f"{v:.9f}"])
        write_rows(path, ["journal_id", "window", "mode", "value"], rows)


def in_window(year: int, w: WindowSpec) -> bool:
    """Window membership for a year that already has status ``valid``."""
    return w.lo <= year <= w.hi


def fractional_weights(doc: Document, w: WindowSpec, mode: CountMode
                       ) -> dict[int, float]:
    """Per-reference weights for one citing document (reference index ->
    weight). References must already be parsed.

    Integer mode lists only matched valid in-window references (weight 1);
    the fractional modes list every valid in-window reference at 1/k or
    1/NRef. A document with no in-window references, or a zero
    denominator, contributes nothing.
    """
    in_win = []
    for i, ref in enumerate(doc.refs):
        parsed = ref.parsed
        if parsed is None:
            raise CountError(f"document {doc.doc_id!r} has unparsed references")
        if parsed.year_status == YEAR_VALID and in_window(parsed.year, w):
            in_win.append((i, parsed))
    if not in_win:
        return {}
    if mode.counting == "integer":
        return {i: 1.0 for i, p in in_win if p.matched_journal is not None}
    if mode.fraction_base == "in_window":
        k = len(in_win)
        return {i: 1.0 / k for i, _ in in_win}
    if doc.ref_count == 0:
        return {}
    return {i: 1.0 / doc.ref_count for i, _ in in_win}


def count_citations(corpus: Corpus, journals: JournalTable, w: WindowSpec,
                    mode: CountMode, ref_table: Optional[RefTable] = None
                    ) -> CountTable:
    """Sum per-journal citation weights over the whole corpus.

    The reduction runs over references sorted by (journal, document), so
    floating-point totals are reproducible regardless of input order or
    parallel upstream loading.
    """
    if w.census_year != corpus.census_year:
        raise CountError(
            f"window census year {w.census_year} != corpus {corpus.census_year}")
    if ref_table is None:
        ref_table = match_corpus(corpus, journals)

    n_journals = len(ref_table.journal_ids)
    valid = ref_table.status == STATUS_VALID
    inwin = valid & (ref_table.year >= w.lo) & (ref_table.year <= w.hi)

    # k = valid in-window references per citing document (matched or not)
    k = np.bincount(ref_table.doc_index[inwin], minlength=ref_table.n_docs)
    contributing = int((k > 0).sum())
    bad = ref_table.doc_ref_count < k
    if bad.any():
        i = int(np.argmax(bad))
        raise CountError(
            f"document {corpus.documents[i].doc_id!r} declares NRef "
            f"{int(ref_table.doc_ref_count[i])} below its in-window "
            f"reference count {int(k[i])}")

    counted = inwin & (ref_table.journal_index >= 0)
    jidx = ref_table.journal_index[counted]
    didx = ref_table.doc_index[counted]

    if mode.counting == "integer":
        totals = np.bincount(jidx, minlength=n_journals).astype(np.int64)
        values = {jid: int(totals[i]) for i, jid in enumerate(ref_table.journal_ids)}
        return CountTable(window=w, mode=mode, values=values,
                          contributing_docs=contributing)

    if mode.fraction_base == "in_window":
        weights = 1.0 / k[didx]
    else:
        nref = ref_table.doc_ref_count[didx]
        weights = np.where(nref > 0, 1.0 / np.maximum(nref, 1), 0.0)

    order = np.lexsort((didx, jidx))
    totals = np.bincount(jidx[order], weights=weights[order],
                         minlength=n_journals)
    values = {jid: float(totals[i]) for i, jid in enumerate(ref_table.journal_ids)}
    return CountTable(window=w, mode=mode, values=values,
                      contributing_docs=contributing)
