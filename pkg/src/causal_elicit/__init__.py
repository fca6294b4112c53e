"""Elicit candidate causal graphs from LLM-generated scenario documents."""

__version__ = "0.1.0"
