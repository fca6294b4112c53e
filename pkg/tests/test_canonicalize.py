import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_elicit.canonicalize import (
    CanonicalRegistry,
    UniqueVocabulary,
    candidates,
    canonicalize,
    canonicalize_embedding_first,
    canonicalize_incremental,
    name_cluster,
    parse_match,
    read_registry,
    unique_preserve_order,
    write_registry,
)
from causal_elicit.errors import NoEvents
from causal_elicit.llm_gateway import Gateway, MockProvider, ProviderConfig

from conftest import FakeTransport, chat_body, remote_gateway


class FixedNamer(MockProvider):
    """Mock provider that names every cluster with the same string."""

    def __init__(self, cfg, name):
        super().__init__(cfg)
        self.name = name

    def chat(self, req):
        return self.name if req.task == "name" else super().chat(req)


@pytest.mark.parametrize(
    "lists, expected",
    [
        ([["a", "b"], ["b", "c"]], ["a", "b", "c"]),
        ([[]], []),
        ([["x", "x", "x"]], ["x"]),
        ({1: ["b"], 0: ["a", ""]}, ["a", "b"]),
    ],
)
def test_unique_preserve_order(lists, expected):
    vocab = unique_preserve_order(lists)
    assert vocab == expected
    assert vocab.M == len(expected)
    assert all(vocab.index[u] == k for k, u in enumerate(expected))


@given(st.lists(st.lists(st.sampled_from("abcdefg"), max_size=6), max_size=6))
def test_vocabulary_is_distinct_and_covers_every_mention(lists):
    vocab = unique_preserve_order(lists)
    assert len(set(vocab)) == vocab.M
    assert set(vocab) == {s for lst in lists for s in lst}


def test_name_cluster_mock_echoes_first_example(mock_gateway):
    assert name_cluster(["tariffs rise", "tariffs go up"], mock_gateway) == "tariffs rise"


def test_banned_name_retried_once_then_fallback(remote_cfg):
    transport = FakeTransport(default=chat_body("Other"))
    gw = remote_gateway(remote_cfg, transport)
    assert name_cluster(["tariffs rise", "x"], gw) == "tariffs rise"
    assert len(transport.calls) == 2


def test_long_name_twice_falls_back(remote_cfg):
    eleven = " ".join(["word"] * 11)
    transport = FakeTransport([chat_body(eleven), chat_body(eleven)])
    assert name_cluster(["e1"], remote_gateway(remote_cfg, transport)) == "e1"


def test_second_attempt_accepted(remote_cfg):
    transport = FakeTransport([chat_body("misc"), chat_body("- Yen weakens.\nextra")])
    assert name_cluster(["e1"], remote_gateway(remote_cfg, transport)) == "Yen weakens."


def test_transport_failure_falls_back(remote_cfg):
    transport = FakeTransport(default=(500, {}))
    assert name_cluster(["e1", "e2"], remote_gateway(remote_cfg, transport)) == "e1"


def test_all_mentions_identical(mock_gateway):
    reg, lists = canonicalize_embedding_first([["a"], ["a"], ["a"]], 30, mock_gateway)
    assert reg.names == ["a"]
    assert lists == {0: ["a"], 1: ["a"], 2: ["a"]}
    assert reg.events[0].occurrences == [(0, 0), (1, 0), (2, 0)]


def test_colliding_cluster_names_merge():
    cfg = ProviderConfig(seed=1)
    gw = Gateway(cfg, provider=FixedNamer(cfg, "trade shock"))
    lists = [["tariffs rise", "oil spikes"], ["yen weakens", "oil spikes"]]
    reg, out = canonicalize_embedding_first(lists, 3, gw)
    assert len(reg.events) == 1
    assert sorted(reg.events[0].members) == sorted(["tariffs rise", "oil spikes", "yen weakens"])
    assert out == {0: ["trade shock"] * 2, 1: ["trade shock"] * 2}


def test_no_events_raises(mock_gateway):
    with pytest.raises(NoEvents):
        canonicalize_embedding_first([[], []], 30, mock_gateway)


def test_embedding_first_is_a_function_over_vocab(mock_gateway):
    lists = [["yen weakens", "the yen weakens"], ["oil prices spike", "yen weakens"], []]
    reg, out = canonicalize_embedding_first(lists, 30, mock_gateway)
    for raw, canon in zip([s for lst in lists for s in lst], [s for k in sorted(out) for s in out[k]]):
        assert reg.events[reg.map[raw]].name == canon
    assert [ev.canon_id for ev in reg.events] == list(range(len(reg.events)))
    assert out[2] == []


def test_candidates_empty_registry(mock_gateway):
    assert candidates(CanonicalRegistry(), "x", mock_gateway) == []


def test_candidates_exact_member_ranks_first(mock_gateway):
    reg = CanonicalRegistry()
    reg.new_event("Oil", "oil prices spike")
    reg.new_event("Yen", "yen weakens against the dollar")
    out = candidates(reg, "yen weakens against the dollar", mock_gateway, tau=0.1)
    assert out[0][0].name == "Yen"
    assert out[0][1] == pytest.approx(1.0)


def test_candidates_high_threshold_dissimilar(mock_gateway):
    reg = CanonicalRegistry()
    for name in ["tariffs rise", "oil prices spike", "central bank hikes"]:
        reg.new_event(name, name)
    t = "yen weakens"
    H = mock_gateway.embed_batch([t] + reg.names)
    cos = H[1:] @ H[0]
    assert (cos < 0.99).all()
    assert candidates(reg, t, mock_gateway, tau=0.99) == []


def test_parse_match():
    assert parse_match('{"match": true, "canon_id": 2, "name": "X"}', {2}) == (True, 2, "X")
    assert parse_match('sure: {"match": true, "canon_id": 3, "name": "X"}', {2}) == (False, None, "")
    assert parse_match("no json", {0}) == (False, None, "")
    assert parse_match('{"match": false}', {0}) == (False, None, "")


def test_incremental_exact_duplicate(mock_gateway):
    reg, out = canonicalize_incremental([["oil spikes"], ["oil spikes"]], mock_gateway)
    assert len(reg.events) == 1
    assert reg.events[0].occurrences == [(0, 0), (1, 0)]
    assert out == {0: ["oil spikes"], 1: ["oil spikes"]}


def test_incremental_rename_reaches_earlier_documents(mock_gateway):
    def matcher(t, scored):
        ev = scored[0][0]
        return True, ev.canon_id, "Yen depreciation"

    lists = [["yen weakens sharply"], ["tariffs rise"], ["yen weakens sharply in 2026"]]
    reg, out = canonicalize_incremental(lists, mock_gateway, tau=0.5, matcher=matcher)
    assert out[0] == ["Yen depreciation"]
    assert out[2] == ["Yen depreciation"]
    assert out[1] == ["tariffs rise"]
    ev = reg.by_name("Yen depreciation")
    assert sorted(ev.members) == ["yen weakens sharply", "yen weakens sharply in 2026"]


def test_incremental_never_matching_keeps_every_mention(mock_gateway):
    lists = [["a b c", "a b c d"], ["a b c d", "x y z"], ["a b c e"]]
    reg, out = canonicalize_incremental(lists, mock_gateway, tau=0.0,
                                        matcher=lambda t, s: (False, None, ""))
    distinct = {s for lst in lists for s in lst}
    assert len(reg.events) == len(distinct)
    assert out == dict(enumerate(lists))


def test_rename_to_existing_name_is_skipped(mock_gateway):
    def matcher(t, scored):
        # propose the name of a different event
        return True, scored[0][0].canon_id, "zzz"

    lists = [["zzz"], ["yen weakens"], ["yen weakens now"]]
    reg, out = canonicalize_incremental(lists, mock_gateway, tau=0.5, matcher=matcher)
    assert reg.names.count("zzz") == 1
    assert out[2] == [reg.events[reg.map["yen weakens now"]].name]


def test_registry_round_trip(tmp_path, mock_gateway):
    reg, _ = canonicalize_embedding_first([["a", "b"], ["b", "c"]], 30, mock_gateway)
    write_registry(tmp_path / "m.json", reg, {"k_max": 30})
    back, params = read_registry(tmp_path / "m.json")
    assert back == reg
    assert params == {"k_max": 30}


def test_registry_rejects_member_in_two_events():
    data = {"events": [{"canon_id": 0, "name": "A", "members": ["x"]},
                       {"canon_id": 1, "name": "B", "members": ["x"]}]}
    with pytest.raises(ValueError):
        CanonicalRegistry.from_dict(json.loads(json.dumps(data)))


@pytest.mark.parametrize("method", ["embedding", "incremental", "both"])
def test_dispatch_maps_every_raw_mention(method, mock_gateway):
    lists = [["yen weakens", "oil prices spike"], ["the yen weakens", "tariffs rise"]]
    reg, out = canonicalize(lists, mock_gateway, method=method, k_max=3)
    for d, lst in enumerate(lists):
        assert [reg.events[reg.map[s]].name for s in lst] == out[d]


def test_unknown_method(mock_gateway):
    with pytest.raises(ValueError):
        canonicalize([["a"]], mock_gateway, method="nope")


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.lists(st.sampled_from(["a b", "c d", "a b c", "e f g", "h"]), max_size=4),
             min_size=1, max_size=5).filter(lambda ls: any(ls)),
    st.integers(1, 6),
)
def test_canonical_count_bounded(lists, k_max):
    gw = Gateway(ProviderConfig(seed=0))
    reg, _ = canonicalize_embedding_first(lists, k_max, gw)
    assert len(reg.events) <= min(k_max, unique_preserve_order(lists).M)


def test_vocabulary_indexing():
    vocab = UniqueVocabulary(["a", "b"])
    assert vocab[1] == "b" and list(vocab) == ["a", "b"] and len(vocab) == 2
    assert np.array_equal(np.arange(vocab.M), [vocab.index[u] for u in vocab])
