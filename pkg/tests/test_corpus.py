import json

import pytest

from causal_elicit.corpus import (
    Topic,
    corpus_path,
    generate_documents,
    load_corpus,
    read_documents,
    slugify,
)
from causal_elicit.errors import CorruptCorpus, TransportError
from causal_elicit.llm_gateway import Gateway, MockProvider, ProviderConfig

TOPIC = Topic.from_text("Trade policy and the yen")


def test_slugify():
    assert slugify("Trade policy and the yen") == "trade-policy-and-the-yen"
    assert slugify("  US/Japan: 2026!! ") == "us-japan-2026"
    assert len(slugify("x" * 500)) <= 80
    assert slugify("???").startswith("topic-")


def test_three_documents_with_ids_0_1_2(tmp_path, mock_gateway):
    docs = generate_documents(TOPIC, 3, mock_gateway, tmp_path)
    assert [d.doc_id for d in docs] == [0, 1, 2]
    assert all(d.topic_slug == TOPIC.slug and d.text for d in docs)
    assert len({d.prompt_fingerprint for d in docs}) == 1


def test_default_configuration_makes_100_documents(tmp_path):
    docs = generate_documents(TOPIC, 100, Gateway(ProviderConfig(seed=42)), tmp_path)
    assert len(docs) == 100
    # same prompt, different nonce: the documents differ
    assert len({d.text for d in docs}) > 50


def test_round_trip(tmp_path, mock_gateway):
    docs = generate_documents(TOPIC, 5, mock_gateway, tmp_path)
    assert load_corpus(TOPIC.slug, tmp_path) == docs


def test_hand_written_two_line_corpus(tmp_path):
    path = corpus_path(tmp_path, "hand")
    path.parent.mkdir(parents=True)
    path.write_text(
        '{"doc_id": 0, "text": "Tariffs rise."}\n{"doc_id": 1, "text": "The yen weakens."}\n',
        encoding="utf-8",
    )
    docs = load_corpus("hand", tmp_path)
    assert [d.text for d in docs] == ["Tariffs rise.", "The yen weakens."]
    assert docs[0].topic_slug == "hand"


def test_malformed_line_3(tmp_path):
    path = tmp_path / "documents.jsonl"
    path.write_text(
        '{"doc_id": 0, "text": "a"}\n{"doc_id": 1, "text": "b"}\n{"doc_id": 2, "text": \n',
        encoding="utf-8",
    )
    with pytest.raises(CorruptCorpus) as info:
        read_documents(path)
    assert info.value.line == 3


def test_duplicate_doc_id_is_corrupt(tmp_path):
    path = tmp_path / "documents.jsonl"
    path.write_text('{"doc_id": 0, "text": "a"}\n{"doc_id": 0, "text": "b"}\n', encoding="utf-8")
    with pytest.raises(CorruptCorpus) as info:
        read_documents(path)
    assert info.value.line == 2


def test_missing_corpus_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus("absent", tmp_path)


class FailAt(MockProvider):
    """Mock provider that fails on one doc id and counts generation calls."""

    def __init__(self, cfg, fail_on=None):
        super().__init__(cfg)
        self.fail_on = fail_on
        self.generated = []

    def chat(self, req):
        if self.fail_on is not None and str(req.nonce) == str(self.fail_on):
            raise TransportError("injected failure")
        self.generated.append(int(req.nonce))
        return super().chat(req)


def test_resume_after_failure_at_doc_40(tmp_path):
    cfg = ProviderConfig(seed=3, max_parallel=1)
    first = FailAt(cfg, fail_on=40)
    with pytest.raises(TransportError):
        generate_documents(TOPIC, 100, Gateway(cfg, provider=first), tmp_path)
    assert sorted(d.doc_id for d in load_corpus(TOPIC.slug, tmp_path)) == list(range(40))

    second = FailAt(cfg)
    docs = generate_documents(TOPIC, 100, Gateway(cfg, provider=second), tmp_path)
    assert sorted(second.generated) == list(range(40, 100))
    assert [d.doc_id for d in docs] == list(range(100))

    # resumed corpus is the one an uninterrupted run produces
    clean = generate_documents(TOPIC, 100, Gateway(cfg), tmp_path / "clean")
    assert [d.text for d in docs] == [d.text for d in clean]


def test_records_are_single_json_lines(tmp_path, mock_gateway):
    generate_documents(TOPIC, 2, mock_gateway, tmp_path)
    lines = corpus_path(tmp_path, TOPIC.slug).read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    rec = json.loads(lines[0])
    assert set(rec) >= {"doc_id", "topic_slug", "text", "model", "created_at", "prompt_fingerprint"}


def test_n_must_be_positive(tmp_path, mock_gateway):
    with pytest.raises(ValueError):
        generate_documents(TOPIC, 0, mock_gateway, tmp_path)
