"""Python interface to the livebib core: queries, search, libraries,
curation and citation metrics."""

from ._native import (
    PRESET_BROAD,
    PRESET_STRICT,
    Catalog,
    Corpus,
    Curation,
    Index,
    LivebibError,
    Query,
    acronyms,
    citation_table,
    render_report,
    tokenize,
)

__all__ = [
    "PRESET_BROAD",
    "PRESET_STRICT",
    "Catalog",
    "Corpus",
    "Curation",
    "Index",
    "LivebibError",
    "Query",
    "acronyms",
    "citation_table",
    "render_report",
    "tokenize",
]
