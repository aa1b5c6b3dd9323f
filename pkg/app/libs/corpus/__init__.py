"""Corpus.

Data model I/O: expression tables, detection calls and class labels.
"""

from app.libs.corpus.labels import infer_labels, label_dataset, parse_label_table
from app.libs.corpus.tables import (
    parse_call_table,
    parse_expression_table,
    read_text,
    render_table,
    write_table,
)

__all__ = [
    "infer_labels",
    "label_dataset",
    "parse_call_table",
    "parse_expression_table",
    "parse_label_table",
    "read_text",
    "render_table",
    "write_table",
]
