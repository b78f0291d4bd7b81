import numpy as np
import pytest

from app.core.exceptions import DuplicateRunEntryError, TrecFormatError
from app.domain.entities.trec import TrecQrelRecord, TrecRunRecord
from app.infrastructure.formats.trec import (
    attach_teacher_scores,
    dataset_to_run_records,
    join_run_qrels,
    parse_qrels,
    parse_trec_run,
    qrels_to_mapping,
    run_to_dataset,
    run_to_mapping,
    write_qrels,
    write_trec_run,
)


def test_parse_reference_run_line(fixtures_dir):
    """Test the reference run line parses field by field."""
    text = (fixtures_dir / "msmarco_dev_teacher.run").read_text()
    [record] = parse_trec_run(text)
    assert record.query_id == "1101282"
    assert record.placeholder == "Q0"
    assert record.doc_id == "8007514"
    assert record.rank == 1
    assert record.score == 3.5860724449157715
    assert record.tag == "msmarco_dev_teacher"


def test_reference_files_are_reproduced_byte_for_byte(fixtures_dir):
    """Test writing parsed reference files gives the original bytes."""
    run_bytes = (fixtures_dir / "msmarco_dev_teacher.run").read_text()
    assert write_trec_run(parse_trec_run(run_bytes)) == run_bytes
    qrel_bytes = (fixtures_dir / "msmarco_dev.qrels").read_text()
    assert write_qrels(parse_qrels(qrel_bytes)) == qrel_bytes


def test_parse_reference_qrel_line(fixtures_dir):
    """Test the reference qrel line parses field by field."""
    [record] = parse_qrels((fixtures_dir / "msmarco_dev.qrels").read_text())
    assert record == TrecQrelRecord("1101282", "8007514", 1.0, "0")


def test_scores_keep_full_precision():
    """Test awkward doubles survive a write and a parse."""
    scores = [0.1 + 0.2, 1e-300, -2.5e17, 3.5860724449157715]
    records = [TrecRunRecord("q", f"d{i}", i + 1, s, "t") for i, s in enumerate(scores)]
    parsed = parse_trec_run(write_trec_run(records))
    assert [r.score for r in parsed] == scores


@pytest.mark.parametrize("line,message", [
    ("q Q0 d 1 2.0", "expected 6 fields"),
    ("q Q0 d one 2.0 t", "unparseable rank"),
    ("q Q0 d 0 2.0 t", "rank must be >= 1"),
    ("q Q0 d 1 nan t", "score must be finite"),
    ("q Q0 d 1 abc t", "unparseable score"),
])
def test_malformed_run_lines(line, message):
    """Test malformed run lines report the line number."""
    with pytest.raises(TrecFormatError) as exc_info:
        parse_trec_run("q Q0 x 1 1.0 t\n" + line + "\n", "bad.run")
    assert message in str(exc_info.value)
    assert exc_info.value.line_number == 2
    assert exc_info.value.source == "bad.run"


def test_malformed_qrel_lines():
    """Test short lines and negative labels."""
    with pytest.raises(TrecFormatError):
        parse_qrels("q 0 d\n")
    with pytest.raises(TrecFormatError):
        parse_qrels("q 0 d -1\n")


def test_blank_lines_are_skipped():
    """Test blank lines between records are ignored."""
    assert len(parse_trec_run("q Q0 a 1 1.0 t\n\n   \nq Q0 b 2 0.5 t\n")) == 2


def test_duplicate_run_entry():
    """Test a repeated (query, doc) pair is an error."""
    records = parse_trec_run("q Q0 a 1 1.0 t\nq Q0 a 2 0.5 t\n")
    with pytest.raises(DuplicateRunEntryError):
        run_to_mapping(records)


def test_qrel_mapping_last_judgment_wins():
    """Test the later of two judgments is kept."""
    mapping = qrels_to_mapping(parse_qrels("q 0 a 1\nq 0 a 3\n"))
    assert mapping == {"q": {"a": 3.0}}


def test_join_run_and_qrels(fixtures_dir):
    """Test joining labels onto run documents."""
    run = parse_trec_run((fixtures_dir / "small.run").read_text())
    qrels = parse_qrels((fixtures_dir / "small.qrels").read_text())
    joined = join_run_qrels(run, qrels, name="small")
    by_query = joined.dataset.by_query()
    np.testing.assert_array_equal(by_query["q1"].relevance, [0.0, 1.0, 0.0])
    np.testing.assert_array_equal(by_query["q1"].teacher_scores, [2.5, 1.5, 0.5])
    # d9 is judged but never retrieved
    assert joined.dropped_qrel_docs == 1
    assert joined.empty_queries == ["q3"]


def test_attach_teacher_scores(tiny_dataset):
    """Test teacher scores are copied onto matching documents."""
    run = [
        TrecRunRecord("q1", "c", 1, 9.0, "t"),
        TrecRunRecord("q1", "a", 2, 8.0, "t"),
        TrecRunRecord("q1", "b", 3, 7.0, "t"),
        TrecRunRecord("q2", "d", 1, 1.0, "t"),
        TrecRunRecord("q2", "e", 2, 0.0, "t"),
    ]
    ds = attach_teacher_scores(tiny_dataset, run)
    np.testing.assert_array_equal(ds.lists[0].teacher_scores, [8.0, 7.0, 9.0])
    with pytest.raises(TrecFormatError):
        attach_teacher_scores(tiny_dataset, run[:4])


def test_dataset_to_run_records_ranks_by_score(tiny_dataset):
    """Test records come out ranked, ties broken by doc_id."""
    scores = {"q1": np.array([1.0, 2.0, 1.0]), "q2": np.array([0.0, 0.0])}
    records = dataset_to_run_records(tiny_dataset, scores, "student")
    assert [(r.query_id, r.doc_id, r.rank) for r in records] == [
        ("q1", "b", 1), ("q1", "a", 2), ("q1", "c", 3), ("q2", "d", 1), ("q2", "e", 2),
    ]


def test_run_to_dataset_keeps_appearance_order(fixtures_dir):
    """Test a run becomes teacher-only lists."""
    ds = run_to_dataset(parse_trec_run((fixtures_dir / "small.run").read_text()))
    assert ds.query_ids == ("q1", "q2", "q3")
    assert not ds.has_relevance()
    assert ds.lists[2].doc_ids == ("d7", "d8")


def test_random_run_and_qrels_round_trip():
    """Test 10,000 random run and qrel records survive write then parse unchanged."""
    rng = np.random.default_rng(77)
    run = [
        TrecRunRecord(
            f"q{rng.integers(0, 500)}", f"doc-{i}", int(rng.integers(1, 1000)),
            float(rng.normal(scale=10.0 ** rng.integers(-6, 7))), f"tag{rng.integers(0, 3)}",
        )
        for i in range(10_000)
    ]
    qrels = [
        TrecQrelRecord(
            f"q{rng.integers(0, 500)}", f"doc-{i}",
            float(rng.integers(0, 5)) if i % 3 else float(rng.uniform(0.0, 4.0)),
        )
        for i in range(10_000)
    ]
    assert parse_trec_run(write_trec_run(run)) == run
    assert parse_qrels(write_qrels(qrels)) == qrels
    assert write_trec_run(parse_trec_run(write_trec_run(run))) == write_trec_run(run)
