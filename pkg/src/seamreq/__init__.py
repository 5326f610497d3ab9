"""Seamless requirements: contracted specification drivers as verifiable requirements.

Requirements are written as deferred classes of self-contained routines with
natural-language comments.  The package parses and resolves them, verifies
them against class contracts, verifies command bodies by weakest
precondition, infers postconditions from drivers, and derives traceability
matrices and readable requirements documents.
"""

from importlib.resources import files as _files

__version__ = "0.1.0"


def corpus_path(name: str = "") -> str:
    """Filesystem path of a bundled example source (or of the corpus directory)."""
    base = _files(__name__) / "corpus"
    return str(base / name) if name else str(base)
