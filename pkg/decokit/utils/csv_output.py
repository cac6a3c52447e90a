"""
CSV table output with a '#'-prefixed comment header
"""

import csv
import io
import sys
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from decokit.config import CSV_DIGITS, PROJECT_NAME, SCHEMA_VERSION


def format_number(value: float) -> str:
    """Shortest-safe decimal form with CSV_DIGITS significant digits"""
    return format(float(value), f".{CSV_DIGITS}g")


class CsvTable(BaseModel):
    """Rows of numbers plus comment lines written before and after them"""

    columns: List[str]
    rows: List[List[float]] = Field(default_factory=list)
    comments: List[str] = Field(default_factory=list)
    footer: List[str] = Field(default_factory=list)

    def column(self, name: str) -> List[float]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def render(self, version: str) -> str:
        """
        Render the table as text

        The first line is always '# decoherence-kit v<version> schema=<n>'.
        """
        buffer = io.StringIO()
        buffer.write(f"# {PROJECT_NAME} v{version} schema={SCHEMA_VERSION}\n")
        for line in self.comments:
            buffer.write(f"# {line}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_number(v) for v in row])
        for line in self.footer:
            buffer.write(f"# {line}\n")
        return buffer.getvalue()


def write_text(text: str, path: Optional[str] = None):
    """Write to `path`, or to stdout when no path is given"""
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def read_table(text: str) -> CsvTable:
    """Parse text produced by CsvTable.render back into a table"""
    lines = text.splitlines()
    comments, footer, body = [], [], []
    for line in lines[1:]:
        if line.startswith("#"):
            (footer if body else comments).append(line[1:].strip())
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows: List[Sequence[float]] = [[float(v) for v in row] for row in reader]
    return CsvTable(columns=columns, rows=rows, comments=comments, footer=footer)
