import numpy as np
import pydot
import pytest

from causal_elicit.discovery import Cpdag, WeightedDag
from causal_elicit.report import GraphBundle, render_report, to_dot, write_report


def parse(text):
    (graph,) = pydot.graph_from_dot_data(text)
    return graph


def names(nodes):
    return sorted(n.get_name().strip('"') for n in nodes)


def test_empty_two_node_graph():
    g = parse(to_dot(Cpdag(2, labels=["a", "b"])))
    assert names(g.get_nodes()) == ["a", "b"]
    assert g.get_edges() == []


def test_collider_has_two_arrows():
    text = to_dot(Cpdag(3, {(0, 2), (1, 2)}, labels=["X", "Y", "Z"]))
    assert text.count("->") == 2
    edges = sorted((e.get_source().strip('"'), e.get_destination().strip('"')) for e in parse(text).get_edges())
    assert edges == [("X", "Z"), ("Y", "Z")]


def test_undirected_edge_has_no_arrowhead():
    text = to_dot(Cpdag(2, set(), {frozenset((0, 1))}, labels=["a", "b"]))
    (edge,) = parse(text).get_edges()
    assert edge.get("dir") == "none"


def test_weighted_edge_label():
    B = np.array([[0.0, 0.0], [0.8, 0.0]])
    text = to_dot(WeightedDag([0, 1], B, ["x1", "x2"]))
    (edge,) = parse(text).get_edges()
    assert edge.get_source().strip('"') == "x1" and edge.get_destination().strip('"') == "x2"
    assert edge.get("label").strip('"') == "0.80"


def test_awkward_labels_are_quoted():
    labels = ['say "hi"', "back\\slash", "multi\nline"]
    g = parse(to_dot(Cpdag(3, {(0, 1)}, labels=labels)))
    assert len(g.get_nodes()) == 3 and len(g.get_edges()) == 1


def test_dot_is_deterministic():
    g = Cpdag(3, {(2, 0), (1, 0)}, labels=["c", "b", "a"])
    assert to_dot(g) == to_dot(Cpdag(3, {(1, 0), (2, 0)}, labels=["c", "b", "a"]))


def bundle(labels, pc_edges=()):
    n = len(labels)
    return GraphBundle(
        pc=Cpdag(n, set(pc_edges), labels=labels),
        ges=Cpdag(n, labels=labels),
        lingam=WeightedDag(list(range(n)), np.zeros((n, n)), labels),
        labels=labels,
    )


def test_report_table_has_a_row_per_event():
    labels = [f"event {k}" for k in range(30)]
    text = render_report(bundle(labels), {"matrix_shape": [100, 30]})
    rows = [ln for ln in text.splitlines() if ln.startswith("| ") and ln[2].isdigit()]
    assert len(rows) == 30
    assert rows[0] == "| 1 | event 0 |"


def test_empty_pc_section_says_no_edges():
    text = render_report(bundle(["a", "b"]), {})
    pc_section = text.split("## PC")[1].split("## GES")[0]
    assert "(no edges)" in pc_section


def test_report_lists_dropped_columns_and_edges():
    text = render_report(bundle(["a", "b"], [(0, 1)]), {"dropped_columns": [["c", "all-1"]]})
    assert "- a -> b" in text
    assert "- c (all-1)" in text


def test_write_report_files(tmp_path):
    paths = write_report(bundle(["a", "b"]), {}, tmp_path)
    for key in ("pc", "ges", "lingam"):
        assert (tmp_path / "graphs" / f"{key}.dot").read_text().startswith(f'digraph "{key}"')
    assert paths["report"].exists()


def test_bundle_requires_shared_labels():
    with pytest.raises(ValueError):
        GraphBundle(Cpdag(2, labels=["a", "b"]), Cpdag(2, labels=["a", "c"]),
                    WeightedDag([0, 1], np.zeros((2, 2)), ["a", "b"]), ["a", "b"])
