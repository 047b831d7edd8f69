"""Built-in benchmark graphs shipped with the package."""

from __future__ import annotations

from importlib import resources

from .errors import UnknownDatasetError
from .graph import Graph, parse_edge_list

_BUILTIN = {
    "karate": "karate.tsv",
}


def builtin_dataset_names() -> list[str]:
    return sorted(_BUILTIN)


def load_builtin_dataset(name: str) -> Graph:
    """Load a bundled dataset by name.

    "karate" is the classic 34-member karate-club friendship network
    (78 undirected unit-weight edges, labels "1".."34").
    """
    try:
        filename = _BUILTIN[name]
    except KeyError:
        raise UnknownDatasetError(
            f"unknown dataset {name!r}; available: {', '.join(builtin_dataset_names())}"
        ) from None
    text = resources.files("rsmc").joinpath("data", filename).read_text(encoding="utf-8")
    return parse_edge_list(text, directed=False)
