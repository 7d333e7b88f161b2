"""Streaming speech-translation policy engine: scripted runs, latency and
quality metrics, trace replay and CoT dataset construction.

The heavy lifting lives in the compiled ``_core`` extension; this package
just re-exports its functions.
"""

from ._core import (
    ConfigError,
    Error,
    MetricError,
    ParseError,
    average_lagging,
    build_cot_dataset,
    corpus_bleu,
    fixture_roundtrip,
    mwer_segment,
    replay_trace,
    run_fixture,
    stream_laal,
)

__all__ = [
    "ConfigError",
    "Error",
    "MetricError",
    "ParseError",
    "average_lagging",
    "build_cot_dataset",
    "corpus_bleu",
    "fixture_roundtrip",
    "mwer_segment",
    "replay_trace",
    "run_fixture",
    "stream_laal",
]

__version__ = "0.1.0"
