from .formatting import csv_text, emit, format_number, json_text, markdown_table, to_jsonable

__all__ = [
    "csv_text",
    "emit",
    "format_number",
    "json_text",
    "markdown_table",
    "to_jsonable",
]
