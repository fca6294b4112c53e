"""Stage-by-stage orchestration with a checksummed run manifest.

Stages run in a fixed order and each one reads only what the previous stages
wrote to ``{out}/{topic_slug}/``. A stage is skipped when the manifest says it
finished, its outputs are on disk, its parameters are unchanged and nothing
upstream was redone. Outputs edited by hand are accepted as the new truth:
their checksum is re-recorded and every later stage runs again.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import canonicalize as canon
from . import corpus, extraction, incidence
from .corpus import Topic
from .discovery import Cpdag, WeightedDag, direct_lingam, ges, ica_lingam, pc
from .llm_gateway import Gateway, ProviderConfig
from .report import GraphBundle, write_report

logger = logging.getLogger(__name__)

STAGES = ("generate", "extract", "canonicalize", "matrix", "discover")
MANIFEST_FILE = "manifest.json"
GRAPHS_FILE = "graphs/graphs.json"

STAGE_OUTPUTS = {
    "generate": [corpus.CORPUS_FILE],
    "extract": [extraction.RAW_EVENTS_FILE],
    "canonicalize": [canon.CANON_MAP_FILE, canon.CANON_EVENTS_FILE],
    "matrix": [incidence.MATRIX_FILE],
    "discover": ["graphs/pc.dot", "graphs/ges.dot", "graphs/lingam.dot", GRAPHS_FILE, "report.md"],
}

PROVIDER_KEYS = ("provider", "base_url", "chat_model", "seed")
STAGE_PARAMS = {
    "generate": ("n", "temperature", "time_anchor", *PROVIDER_KEYS),
    "extract": PROVIDER_KEYS,
    "canonicalize": ("k_max", "m", "tau", "top_k", "canon_method", "embed_model", "embed_dim",
                     *PROVIDER_KEYS),
    "matrix": (),
    "discover": ("alpha", "max_cond", "ci_method", "score", "ess", "lingam_method",
                 "lingam_prune"),
}


@dataclass
class PipelineConfig:
    # defaults: 100 documents, at most 30 canonical events, alpha 0.1, 5 naming examples
    n: int = 100
    k_max: int = 30
    alpha: float = 0.1
    m: int = 5
    max_cond: int = 3
    tau: float = 0.80
    top_k: int = 5
    seed: int = 42
    canon_method: str = "embedding"
    ci_method: str = "gsq"
    score: str = "bic"
    ess: float = 1.0
    lingam_method: str = "direct"
    lingam_prune: float = 0.05
    temperature: float = 1.0
    time_anchor: str = "it is currently January 2026"
    provider: str = "mock"
    base_url: str = ""
    api_key_env: str = "OPENAI_API_KEY"
    chat_model: str = "mock-chat"
    embed_model: str = "mock-embed"
    embed_dim: int = 256
    max_parallel: int = 4
    max_retries: int = 3
    out: str = "runs"

    def provider_config(self):
        return ProviderConfig(
            kind=self.provider,
            base_url=self.base_url,
            api_key_env=self.api_key_env,
            chat_model=self.chat_model,
            embed_model=self.embed_model,
            embed_dim=self.embed_dim,
            max_parallel=self.max_parallel,
            max_retries=self.max_retries,
            seed=self.seed,
        )

    def params(self):
        return dataclasses.asdict(self)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _now():
    return datetime.now(timezone.utc).isoformat()


def _write_json_atomic(path, data):
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)


class Run:
    """One topic directory plus its manifest."""

    def __init__(self, topic: Topic, cfg: PipelineConfig, gateway: Optional[Gateway] = None):
        self.topic = topic
        self.cfg = cfg
        self.dir = Path(cfg.out) / topic.slug
        self._gateway = gateway
        self.manifest_path = self.dir / MANIFEST_FILE
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        else:
            self.manifest = {
                "topic": {"text": topic.text, "slug": topic.slug},
                "params": {},
                "stage_params": {},
                "stage_status": {s: "pending" for s in STAGES},
                "checksums": {},
                "dropped_columns": [],
                "timestamps": {"created": _now()},
                "errors": {},
            }
        self.manifest["params"] = cfg.params()

    @property
    def gateway(self):
        if self._gateway is None:
            self._gateway = Gateway(self.cfg.provider_config())
        return self._gateway

    def path(self, name):
        return self.dir / name

    def save(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        _write_json_atomic(self.manifest_path, self.manifest)

    def stage_params(self, stage):
        p = self.cfg.params()
        return {k: p[k] for k in STAGE_PARAMS[stage]}

    def outputs_present(self, stage):
        return all(self.path(f).exists() for f in STAGE_OUTPUTS[stage])

    def outputs_edited(self, stage):
        recorded = self.manifest["checksums"].get(stage, {})
        return any(recorded.get(f) != sha256_file(self.path(f)) for f in STAGE_OUTPUTS[stage])

    def record_outputs(self, stage):
        self.manifest["checksums"][stage] = {
            f: sha256_file(self.path(f)) for f in STAGE_OUTPUTS[stage]
        }

    def needs_run(self, stage):
        m = self.manifest
        if m["stage_status"].get(stage) != "done" or not self.outputs_present(stage):
            return True
        return m["stage_params"].get(stage) != self.stage_params(stage)


# -- stages -----------------------------------------------------------------


def _stage_generate(run):
    corpus.generate_documents(
        run.topic, run.cfg.n, run.gateway, run.cfg.out,
        temperature=run.cfg.temperature, time_anchor=run.cfg.time_anchor,
    )


def _stage_extract(run):
    docs = corpus.read_documents(run.path(corpus.CORPUS_FILE), run.topic.slug)
    lists = extraction.extract_all(docs, run.gateway)
    extraction.write_event_lists(run.path(extraction.RAW_EVENTS_FILE), lists)


def _stage_canonicalize(run):
    cfg = run.cfg
    lists = extraction.read_event_lists(run.path(extraction.RAW_EVENTS_FILE))
    reg, rewritten = canon.canonicalize(
        lists, run.gateway, method=cfg.canon_method, k_max=cfg.k_max, m=cfg.m,
        seed=cfg.seed, tau=cfg.tau, top_k=cfg.top_k,
    )
    params = {"k_max": cfg.k_max, "m": cfg.m, "tau": cfg.tau, "seed": cfg.seed,
              "method": cfg.canon_method}
    canon.write_registry(run.path(canon.CANON_MAP_FILE), reg, params)
    extraction.write_event_lists(run.path(canon.CANON_EVENTS_FILE), rewritten)


def _stage_matrix(run):
    lists = extraction.read_event_lists(run.path(extraction.RAW_EVENTS_FILE))
    reg, _ = canon.read_registry(run.path(canon.CANON_MAP_FILE))
    vocab = canon.unique_preserve_order(lists)
    X = incidence.build_raw_matrix(lists, vocab)
    Z = incidence.drop_noninformative(incidence.aggregate(X, reg))
    run.manifest["dropped_columns"] = [list(d) for d in Z.dropped]
    run.manifest["matrix_shape"] = list(Z.shape)
    incidence.write_matrix_csv(run.path(incidence.MATRIX_FILE), Z)


def discover(Z, cfg: PipelineConfig):
    """Run PC, GES and LiNGAM on an incidence matrix."""
    data = np.asarray(Z.data)
    labels = list(Z.col_labels)
    lingam = direct_lingam if cfg.lingam_method == "direct" else ica_lingam
    return GraphBundle(
        pc=pc(data, alpha=cfg.alpha, max_cond=cfg.max_cond, labels=labels, method=cfg.ci_method),
        ges=ges(data, score=cfg.score, ess=cfg.ess, labels=labels),
        lingam=lingam(data.astype(float), prune=cfg.lingam_prune, labels=labels),
        labels=labels,
    )


def bundle_to_dict(bundle):
    return {
        "labels": bundle.labels,
        "pc": {"directed": sorted(bundle.pc.directed),
               "undirected": sorted(sorted(e) for e in bundle.pc.undirected)},
        "ges": {"directed": sorted(bundle.ges.directed),
                "undirected": sorted(sorted(e) for e in bundle.ges.undirected)},
        "lingam": {"order": list(map(int, bundle.lingam.order)),
                   "B": bundle.lingam.B.tolist(), "converged": bundle.lingam.converged},
    }


def bundle_from_dict(d):
    labels = d["labels"]
    n = len(labels)

    def cp(g):
        return Cpdag(n, {tuple(e) for e in g["directed"]},
                     {frozenset(e) for e in g["undirected"]}, list(labels))

    lg = d["lingam"]
    return GraphBundle(
        pc=cp(d["pc"]), ges=cp(d["ges"]),
        lingam=WeightedDag(lg["order"], np.array(lg["B"]), list(labels), lg["converged"]),
        labels=list(labels),
    )


def _stage_discover(run):
    Z = incidence.read_matrix_csv(run.path(incidence.MATRIX_FILE))
    bundle = discover(Z, run.cfg)
    write_report(bundle, run.manifest, run.dir)
    _write_json_atomic(run.path(GRAPHS_FILE), bundle_to_dict(bundle))
    return bundle


STAGE_FUNCS = {
    "generate": _stage_generate,
    "extract": _stage_extract,
    "canonicalize": _stage_canonicalize,
    "matrix": _stage_matrix,
    "discover": _stage_discover,
}


def _execute(run, stage):
    status = run.manifest["stage_status"]
    logger.info("running stage %s", stage)
    status[stage] = "running"
    run.manifest["errors"].pop(stage, None)
    try:
        result = STAGE_FUNCS[stage](run)
    except Exception as exc:
        status[stage] = "failed"
        run.manifest["errors"][stage] = f"{type(exc).__name__}: {exc}"
        run.save()
        raise
    status[stage] = "done"
    run.manifest["stage_params"][stage] = run.stage_params(stage)
    run.manifest["timestamps"][stage] = _now()
    run.record_outputs(stage)
    run.save()
    return result


def clear_outputs(run_dir):
    """Delete the artifacts this pipeline writes (not the directory itself)."""
    run_dir = Path(run_dir)
    for files in STAGE_OUTPUTS.values():
        for f in files:
            (run_dir / f).unlink(missing_ok=True)
    (run_dir / MANIFEST_FILE).unlink(missing_ok=True)


def run_pipeline(topic, cfg=None, from_stage=None, only=None, fresh=False, gateway=None):
    """Run the pipeline for ``topic`` and return the graph bundle.

    ``from_stage`` forces that stage and everything after it to run.
    ``only`` runs a single stage against the artifacts already on disk.
    """
    cfg = cfg or PipelineConfig()
    topic = topic if isinstance(topic, Topic) else Topic.from_text(topic)
    for s in (from_stage, only):
        if s is not None and s not in STAGES:
            raise ValueError(f"unknown stage {s!r}; expected one of {STAGES}")
    if fresh:
        clear_outputs(Path(cfg.out) / topic.slug)
    run = Run(topic, cfg, gateway)
    run.save()

    if only is not None:
        idx = STAGES.index(only)
        for prev in STAGES[:idx]:
            if not run.outputs_present(prev):
                raise FileNotFoundError(f"stage {only!r} needs the outputs of {prev!r}")
        result = _execute(run, only)
        for later in STAGES[idx + 1:]:
            run.manifest["stage_status"][later] = "pending"
        run.save()
        return result if only == "discover" else None

    force_from = STAGES.index(from_stage) if from_stage else len(STAGES)
    upstream_changed = False
    bundle = None
    for k, stage in enumerate(STAGES):
        if k < force_from and not upstream_changed and not run.needs_run(stage):
            if run.outputs_edited(stage):
                logger.info("outputs of %s were edited; re-running later stages", stage)
                run.record_outputs(stage)
                run.save()
                upstream_changed = True
            continue
        if k < force_from and from_stage and not upstream_changed:
            # before the forced stage: take whatever is on disk
            if run.outputs_present(stage):
                continue
        result = _execute(run, stage)
        upstream_changed = True
        if stage == "discover":
            bundle = result
    if bundle is None:
        bundle = bundle_from_dict(json.loads(run.path(GRAPHS_FILE).read_text(encoding="utf-8")))
    return bundle
