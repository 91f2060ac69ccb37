"""Ontology alignment via knowledge-graph embeddings.

Thin wrapper around the compiled extension; see the project README for the
file formats and the CLI.
"""

try:
    # installed layout: the extension lives inside this package
    from ._kgealign import (
        align_files,
        cli,
        evaluate_files,
        evaluate_pairs,
        generate_benchmark,
        model_names,
    )
except ImportError:  # development layout: extension on PYTHONPATH
    from _kgealign import (
        align_files,
        cli,
        evaluate_files,
        evaluate_pairs,
        generate_benchmark,
        model_names,
    )

__all__ = [
    "align_files",
    "cli",
    "evaluate_files",
    "evaluate_pairs",
    "generate_benchmark",
    "model_names",
]
