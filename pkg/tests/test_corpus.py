import json
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from redacteval.corpus import (
    Corpus,
    Document,
    balance_by_label,
    load_records,
    save_records,
    split_corpus,
)
from redacteval.errors import DataError


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def test_load_well_formed(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, [
        {"id": "a", "text": "one", "label": "x"},
        {"id": "b", "text": "two", "label": "y"},
        {"id": "c", "text": "three", "label": "x"},
    ])
    corpus = load_records(path)
    assert len(corpus) == 3
    assert corpus.labels == {"x", "y"}
    assert corpus.documents[1] == Document(id="b", text="two", label="y")


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    corpus = load_records(path)
    assert len(corpus) == 0
    assert corpus.labels == frozenset()


def test_load_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_records(tmp_path / "nope.jsonl")


def test_load_duplicate_id_names_line(tmp_path):
    path = tmp_path / "dup.jsonl"
    write_jsonl(path, [
        {"id": "a", "text": "one", "label": "x"},
        {"id": "a", "text": "two", "label": "x"},
    ])
    with pytest.raises(DataError, match="line 2.*duplicate id"):
        load_records(path)


def test_load_malformed_line_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a", "text": "one", "label": "x"}\nnot json\n')
    with pytest.raises(DataError, match="line 2"):
        load_records(path)


def test_load_missing_field_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    write_jsonl(path, [{"id": "a", "text": "one"}])
    with pytest.raises(DataError, match="line 1.*label"):
        load_records(path)


def test_save_load_roundtrip(tmp_path):
    docs = [Document(id=f"d{i}", text=f"text {i}", label="x") for i in range(4)]
    path = tmp_path / "r.jsonl"
    save_records(docs, path)
    assert load_records(path).documents == tuple(docs)


def _corpus(counts: dict[str, int]) -> Corpus:
    docs = []
    for label, n in counts.items():
        docs.extend(Document(id=f"{label}{i}", text="w", label=label) for i in range(n))
    return Corpus(tuple(docs))


def test_balance_already_balanced():
    corpus = _corpus({"A": 10, "B": 10})
    balanced = balance_by_label(corpus, seed=0)
    assert Counter(d.label for d in balanced.documents) == {"A": 10, "B": 10}


def test_balance_downsamples_to_min_class():
    corpus = _corpus({"A": 10, "B": 4})
    balanced = balance_by_label(corpus, seed=0)
    assert Counter(d.label for d in balanced.documents) == {"A": 4, "B": 4}


def test_balance_deterministic():
    corpus = _corpus({"A": 10, "B": 4, "C": 7})
    ids_1 = {d.id for d in balance_by_label(corpus, seed=5).documents}
    ids_2 = {d.id for d in balance_by_label(corpus, seed=5).documents}
    assert ids_1 == ids_2


def test_balance_empty_corpus():
    with pytest.raises(ValueError):
        balance_by_label(Corpus(()), seed=0)


def test_split_80_20_counts():
    corpus = _corpus({"A": 50, "B": 50})
    split = split_corpus(corpus, 0.8, seed=1)
    assert Counter(d.label for d in split.train.documents) == {"A": 40, "B": 40}
    assert Counter(d.label for d in split.test.documents) == {"A": 10, "B": 10}


def test_split_half_of_two_per_class():
    corpus = _corpus({"A": 2, "B": 2})
    split = split_corpus(corpus, 0.5, seed=1)
    assert Counter(d.label for d in split.train.documents) == {"A": 1, "B": 1}
    assert Counter(d.label for d in split.test.documents) == {"A": 1, "B": 1}


def test_split_rejects_bad_fraction():
    corpus = _corpus({"A": 2, "B": 2})
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            split_corpus(corpus, bad, seed=0)


@given(
    st.dictionaries(
        st.sampled_from(["A", "B", "C", "D"]),
        st.integers(min_value=1, max_value=30),
        min_size=1,
    ),
    st.integers(min_value=0, max_value=2**31),
)
def test_split_is_partition(counts, seed):
    corpus = _corpus(counts)
    split = split_corpus(corpus, 0.8, seed=seed)
    train_ids = {d.id for d in split.train.documents}
    test_ids = {d.id for d in split.test.documents}
    assert train_ids.isdisjoint(test_ids)
    assert train_ids | test_ids == {d.id for d in corpus.documents}
    # stratification within one document of the requested ratio
    for label, n in counts.items():
        got = sum(1 for d in split.train.documents if d.label == label)
        assert abs(got - 0.8 * n) <= 1.0


@given(
    st.dictionaries(
        st.sampled_from(["A", "B", "C"]),
        st.integers(min_value=1, max_value=25),
        min_size=1,
    ),
    st.integers(min_value=0, max_value=2**31),
)
def test_balance_makes_all_classes_equal(counts, seed):
    balanced = balance_by_label(_corpus(counts), seed=seed)
    sizes = set(Counter(d.label for d in balanced.documents).values())
    assert len(sizes) == 1
    assert sizes == {min(counts.values())}
