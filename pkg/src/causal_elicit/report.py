"""DOT export and the human-readable run report."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .discovery.graphs import Cpdag, WeightedDag


@dataclass
class GraphBundle:
    pc: Cpdag
    ges: Cpdag
    lingam: WeightedDag
    labels: list

    def __post_init__(self):
        for g in (self.pc, self.ges, self.lingam):
            if list(g.labels) != list(self.labels):
                raise ValueError("all graphs in a bundle must share one label list")


def _q(s):
    s = " ".join(str(s).split())
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g, name="G"):
    """DOT text for a CPDAG or weighted DAG; nodes and edges in sorted label order."""
    lines = [f"digraph {_q(name)} {{"]
    for label in sorted(g.labels):
        lines.append(f"  {_q(label)};")
    for src, dst, extra in g.edge_list():
        if isinstance(g, WeightedDag):
            attr = f' [label="{extra:.2f}"]'
        else:
            attr = "" if extra else " [dir=none]"
        lines.append(f"  {_q(src)} -> {_q(dst)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _edge_lines(g):
    out = []
    for src, dst, extra in g.edge_list():
        if isinstance(g, WeightedDag):
            out.append(f"- {src} -> {dst} ({extra:.2f})")
        else:
            out.append(f"- {src} {'->' if extra else '--'} {dst}")
    return out or ["(no edges)"]


def render_report(bundle, manifest):
    topic = manifest.get("topic", {}).get("text", "")
    n_rows = manifest.get("matrix_shape", ["?", "?"])[0]
    lines = [f"# Causal hypothesis report: {topic}", ""]
    lines += [
        "Edges describe conditional co-occurrence in the sampled narratives. "
        "They are hypotheses for review, not validated causal claims.",
        "",
        "## Canonical events",
        "",
        "| ID | Canonical event |",
        "|---:|:---|",
    ]
    for k, label in enumerate(bundle.labels, start=1):
        cell = label.replace("|", r"\|")
        lines.append(f"| {k} | {cell} |")
    lines += ["", "## Matrix", "", f"{n_rows} documents x {len(bundle.labels)} canonical events", ""]
    params = manifest.get("params", {})
    sections = [
        (f"## PC (alpha={params.get('alpha')}, max_cond={params.get('max_cond')})", bundle.pc),
        (f"## GES (score={params.get('score')})", bundle.ges),
        (f"## LiNGAM ({params.get('lingam_method')})", bundle.lingam),
    ]
    for title, g in sections:
        lines += [title, ""]
        if isinstance(g, WeightedDag):
            lines += [
                "Binary columns violate LiNGAM's continuous non-Gaussian noise "
                "assumption; read orientations and weights with caution.",
                "",
            ]
        lines += _edge_lines(g) + [""]
    lines += ["## Dropped columns", ""]
    dropped = manifest.get("dropped_columns", [])
    lines += [f"- {label} ({reason})" for label, reason in dropped] or ["(none)"]
    return "\n".join(lines) + "\n"


def write_report(bundle, manifest, dir):
    """Write ``graphs/{pc,ges,lingam}.dot`` and ``report.md`` under ``dir``."""
    dir = Path(dir)
    (dir / "graphs").mkdir(parents=True, exist_ok=True)
    paths = {}
    for key in ("pc", "ges", "lingam"):
        path = dir / "graphs" / f"{key}.dot"
        path.write_text(to_dot(getattr(bundle, key), key), encoding="utf-8")
        paths[key] = path
    paths["report"] = dir / "report.md"
    paths["report"].write_text(render_report(bundle, manifest), encoding="utf-8")
    return paths
