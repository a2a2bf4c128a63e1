from __future__ import annotations

from importlib.resources import files

import pytest

from redacteval.corpus import Document
from redacteval.gibberish import train_detector
from redacteval import tfidf


@pytest.fixture(scope="session")
def english_reference() -> list[str]:
    text = files("redacteval.data").joinpath("english_reference.txt").read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip()]


@pytest.fixture(scope="session")
def english_detector(english_reference):
    return train_detector(english_reference)


@pytest.fixture()
def tiny_model():
    """The three-document corpus used for hand-checked TFIDF values."""
    docs = [
        Document(id="d1", text="a b", label="x"),
        Document(id="d2", text="a c", label="x"),
        Document(id="d3", text="a", label="x"),
    ]
    return tfidf.fit(docs, min_df=0.3, stopwords=frozenset())


def make_docs(texts_labels: list[tuple[str, str]]) -> list[Document]:
    return [
        Document(id=f"doc{i}", text=text, label=label)
        for i, (text, label) in enumerate(texts_labels)
    ]
