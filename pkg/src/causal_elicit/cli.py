"""``causal-elicit`` command line."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

import yaml

from .errors import CausalElicitError
from .pipeline import STAGES, PipelineConfig, run_pipeline

# flag name -> (config field, type)
FLAGS = {
    "n": int, "k-max": int, "alpha": float, "m": int, "max-cond": int, "tau": float,
    "top-k": int, "seed": int, "canon-method": str, "ci-method": str, "score": str,
    "ess": float, "lingam-method": str, "lingam-prune": float, "temperature": float,
    "time-anchor": str, "provider": str, "base-url": str, "api-key-env": str,
    "chat-model": str, "embed-model": str, "embed-dim": int, "max-parallel": int,
    "max-retries": int, "out": str,
}
CHOICES = {
    "provider": ("mock", "remote"),
    "canon-method": ("embedding", "incremental", "both"),
    "ci-method": ("gsq", "chi2"),
    "score": ("bic", "bdeu"),
    "lingam-method": ("direct", "ica"),
}


def load_config_file(path):
    """Read a flat ``key: value`` YAML file; keys may use ``-`` or ``_``."""
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected key: value pairs")
    fields = {f.name for f in dataclasses.fields(PipelineConfig)}
    out = {}
    for key, value in data.items():
        name = str(key).replace("-", "_")
        if name == "topic":
            out["topic"] = str(value)
            continue
        if name not in fields:
            raise ValueError(f"{path}: unknown key {key!r}")
        out[name] = value
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="causal-elicit",
        description="Elicit candidate causal graphs from LLM-generated documents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", *STAGES):
        p = sub.add_parser(name, help="all stages" if name == "run" else f"only the {name} stage")
        p.add_argument("--topic", help="topic text (or set it in the config file)")
        p.add_argument("--config", help="YAML file of key: value settings")
        p.add_argument("-v", "--verbose", action="store_true")
        for flag, typ in FLAGS.items():
            p.add_argument(f"--{flag}", type=typ, default=None, choices=CHOICES.get(flag))
        if name == "run":
            p.add_argument("--from", dest="from_stage", choices=STAGES,
                           help="re-run this stage and everything after it")
            p.add_argument("--fresh", action="store_true",
                           help="delete this topic's artifacts before running")
    return parser


def resolve_config(args):
    settings = dataclasses.asdict(PipelineConfig())
    topic = None
    if args.config:
        from_file = load_config_file(args.config)
        topic = from_file.pop("topic", None)
        settings.update(from_file)
    for flag in FLAGS:
        value = getattr(args, flag.replace("-", "_"))
        if value is not None:
            settings[flag.replace("-", "_")] = value
    return args.topic or topic, PipelineConfig(**settings)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        topic, cfg = resolve_config(args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not topic:
        print("error: a topic is required (--topic or config file)", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            run_pipeline(topic, cfg, from_stage=args.from_stage, fresh=args.fresh)
        else:
            run_pipeline(topic, cfg, only=args.command)
    except (CausalElicitError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
