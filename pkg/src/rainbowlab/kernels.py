"""Search-kernel backend selection.

The compiled kernel is preferred when it imported cleanly; the pure-Python
kernel is the always-available fallback and the semantic reference.  Set
RAINBOWLAB_BACKEND=pure or =compiled to force a choice (forcing "compiled"
when the extension is unavailable is an error).
"""

from __future__ import annotations

import os
from typing import Sequence

from . import _purekernel
from .core import InvalidInputError

try:
    from . import _fastkernel
except ImportError:  # extension not built on this install
    _fastkernel = None

FOUND = _purekernel.FOUND
NONE = _purekernel.NONE
BUDGET = _purekernel.BUDGET
TIMEOUT = _purekernel.TIMEOUT

# The compiled kernel keeps a k*n byte table of used values per coordinate;
# beyond this n the pure kernel's per-coordinate sets are the safer choice.
COMPILED_MAX_N = 1 << 22

DEFAULT_MAX_NODES = 10**18


def compiled_available() -> bool:
    return _fastkernel is not None


def backend_name(backend: str | None = None) -> str:
    """Resolve a backend request ('pure', 'compiled', or None for auto)."""
    choice = backend or os.environ.get("RAINBOWLAB_BACKEND", "").lower() or "auto"
    if choice == "auto":
        return "compiled" if compiled_available() else "pure"
    if choice == "compiled" and not compiled_available():
        raise InvalidInputError("compiled kernel requested but the extension is not built")
    if choice not in ("pure", "compiled"):
        raise InvalidInputError(f"unknown kernel backend {choice!r}")
    return choice


def search_indices(
    n: int,
    k: int,
    families: Sequence[Sequence[int]],
    max_nodes: int = DEFAULT_MAX_NODES,
    deadline: float = 0.0,
    backend: str | None = None,
) -> tuple[int, list[int] | None, int]:
    """Run the rainbow search over index-encoded families.

    Families are searched in the order given; callers that want the
    smallest-domain-first heuristic must pre-order them.
    """
    name = backend_name(backend)
    if name == "compiled" and n <= COMPILED_MAX_N:
        return _fastkernel.search(n, k, families, max_nodes, deadline)
    return _purekernel.search(n, k, families, max_nodes, deadline)
