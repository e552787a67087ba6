import numpy as np
import pytest

from jifnorm import (Corpus, Document, Journal, JournalTable, RawReference,
                     load_corpus, match_corpus)
from jifnorm.counts import (CountError, CountMode, FRACTIONAL, FRACTIONAL_PLUS,
                            INTEGER, WindowSpec, count_citations,
                            fractional_weights, in_window, variable_id)

from conftest import CENSUS
from _oracle import full_pipeline


@pytest.fixture(scope="module")
def oracle(data_dir):
    return full_pipeline(data_dir / "fixture_corpus.jsonl",
                         data_dir / "fixture_journals.tsv", CENSUS)


@pytest.mark.parametrize("year,kind,expected", [
    (2008, "two_year", True), (2009, "two_year", True),
    (2005, "two_year", False), (2010, "two_year", False),
    (2005, "five_year", True), (2004, "five_year", False),
    (2010, "five_year", False),
    (1900, "all_years", True), (2010, "all_years", True),
])
def test_in_window(year, kind, expected):
    assert in_window(year, WindowSpec(kind, CENSUS)) is expected


def test_variable_ids():
    assert variable_id(WindowSpec("two_year", CENSUS), INTEGER) == "TC-IC2"
    assert variable_id(WindowSpec("five_year", CENSUS), FRACTIONAL) == "TC-FC5"
    assert variable_id(WindowSpec("all_years", CENSUS), INTEGER) == "TC-IC"
    assert variable_id(WindowSpec("two_year", CENSUS), FRACTIONAL_PLUS) == "TC-FC2+"


def _doc_with(refs, nref=None):
    journals = JournalTable([Journal("A", "A", ["J A"], "F", {}),
                             Journal("B", "B", ["J B"], "F", {})])
    doc = Document("d1", "A", 2010, "article",
                   [RawReference(r) for r in refs],
                   nref if nref is not None else len(refs))
    corpus = Corpus(2010, [doc])
    match_corpus(corpus, journals)
    return doc, corpus, journals


def test_fractional_weights_in_window():
    doc, _, _ = _doc_with(["J A|2009", "J A|2008", "J B|2009", "UNKNOWN|2008"])
    w = fractional_weights(doc, WindowSpec("two_year", CENSUS), FRACTIONAL)
    assert w == {0: 0.25, 1: 0.25, 2: 0.25, 3: 0.25}


def test_fractional_weights_whole_list_base():
    doc, _, _ = _doc_with(["J A|2009", "J A|2008", "J B|2009", "J B|2008"],
                          nref=40)
    w = fractional_weights(doc, WindowSpec("two_year", CENSUS), FRACTIONAL_PLUS)
    assert w == {0: 0.025, 1: 0.025, 2: 0.025, 3: 0.025}


def test_fractional_weights_no_in_window_refs():
    doc, _, _ = _doc_with(["J A|2001", "J B|1999"])
    assert fractional_weights(doc, WindowSpec("two_year", CENSUS), FRACTIONAL) == {}


def test_integer_weights_only_matched():
    doc, _, _ = _doc_with(["J A|2009", "UNKNOWN|2009"])
    w = fractional_weights(doc, WindowSpec("two_year", CENSUS), INTEGER)
    assert w == {0: 1.0}


def test_single_doc_weights_sum_to_one():
    _, corpus, journals = _doc_with(["J A|2009", "J A|2008"])
    table = count_citations(corpus, journals, WindowSpec("two_year", CENSUS),
                            FRACTIONAL)
    assert table.values["A"] == pytest.approx(1.0)
    assert table.values["B"] == 0.0
    integer = count_citations(corpus, journals, WindowSpec("two_year", CENSUS),
                              INTEGER)
    assert integer.values["A"] == 2


def test_counts_match_oracle_on_fixture(merged_fixture, oracle):
    corpus, journals = merged_fixture
    for kind, suffix in (("two_year", "2"), ("five_year", "5"), ("all_years", "")):
        w = WindowSpec(kind, CENSUS)
        for mode, label in ((INTEGER, "IC"), (FRACTIONAL, "FC"),
                            (FRACTIONAL_PLUS, "FC+")):
            if label == "FC+" and kind == "all_years":
                continue
            name = f"TC-{label[:2]}{suffix}" + ("+" if label == "FC+" else "")
            table = count_citations(corpus, journals, w, mode)
            expected = oracle["counts"][name]
            assert set(table.values) == set(expected)
            for jid, v in expected.items():
                if mode is INTEGER:
                    assert table.values[jid] == v, (name, jid)
                else:
                    assert table.values[jid] == pytest.approx(v, rel=1e-9), (name, jid)
            assert table.contributing_docs == oracle["counts"][name + ":contributing"]


def test_window_monotonicity(merged_fixture):
    corpus, journals = merged_fixture
    t2 = count_citations(corpus, journals, WindowSpec("two_year", CENSUS), INTEGER)
    t5 = count_citations(corpus, journals, WindowSpec("five_year", CENSUS), INTEGER)
    ta = count_citations(corpus, journals, WindowSpec("all_years", CENSUS), INTEGER)
    for jid in t2.values:
        assert t2.values[jid] <= t5.values[jid] <= ta.values[jid]


def test_per_document_bound_fractional(merged_fixture):
    """With the in-window base, total handed out never exceeds the number
    of contributing documents."""
    corpus, journals = merged_fixture
    for kind in ("two_year", "five_year", "all_years"):
        table = count_citations(corpus, journals, WindowSpec(kind, CENSUS),
                                FRACTIONAL)
        assert sum(table.values.values()) <= table.contributing_docs + 1e-12


def test_whole_list_totals_below_in_window_totals(merged_fixture):
    corpus, journals = merged_fixture
    for kind in ("two_year", "five_year"):
        fc = count_citations(corpus, journals, WindowSpec(kind, CENSUS), FRACTIONAL)
        fcp = count_citations(corpus, journals, WindowSpec(kind, CENSUS),
                              FRACTIONAL_PLUS)
        for jid in fc.values:
            assert fcp.values[jid] <= fc.values[jid] + 1e-12


def test_document_permutation_invariance(fixture_paths, merged_fixture):
    corpus, journals = merged_fixture
    base = count_citations(corpus, journals, WindowSpec("five_year", CENSUS),
                           FRACTIONAL)
    rng = np.random.default_rng(7)
    for _ in range(3):
        shuffled = Corpus(corpus.census_year,
                          [corpus.documents[i]
                           for i in rng.permutation(len(corpus.documents))])
        other = count_citations(shuffled, journals,
                                WindowSpec("five_year", CENSUS), FRACTIONAL)
        for jid, v in base.values.items():
            assert other.values[jid] == pytest.approx(v, rel=1e-9)


def test_integer_mode_permutation_exact(merged_fixture):
    corpus, journals = merged_fixture
    base = count_citations(corpus, journals, WindowSpec("all_years", CENSUS),
                           INTEGER)
    shuffled = Corpus(corpus.census_year, list(reversed(corpus.documents)))
    other = count_citations(shuffled, journals, WindowSpec("all_years", CENSUS),
                            INTEGER)
    assert other.values == base.values


def test_census_year_mismatch_is_error(merged_fixture):
    corpus, journals = merged_fixture
    with pytest.raises(CountError):
        count_citations(corpus, journals, WindowSpec("two_year", 2009), INTEGER)


def test_count_table_tsv_round_digits(merged_fixture, tmp_path):
    corpus, journals = merged_fixture
    table = count_citations(corpus, journals, WindowSpec("two_year", CENSUS),
                            FRACTIONAL)
    out = tmp_path / "t.tsv"
    table.to_tsv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "journal_id\twindow\tmode\tvalue"
    value = lines[1].split("\t")[3]
    assert len(value.split(".")[1]) == 9

    integer = count_citations(corpus, journals, WindowSpec("two_year", CENSUS),
                              INTEGER)
    integer.to_tsv(out)
    assert "." not in out.read_text().splitlines()[1].split("\t")[3]
