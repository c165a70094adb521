"""Reader for the simulation CSV format.

Files start with a ``# key=value`` metadata preamble, then a header row,
then numeric rows.  Everything is returned as-is: metadata values stay
strings (templates convert the few they use), table cells become floats.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import NamedTuple

from .errors import RenderError, SchemaError


class Table(NamedTuple):
    path: Path
    metadata: dict[str, str]
    columns: tuple[str, ...]
    rows: list[list[float]]

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def ref(self, key: str) -> float:
        """Metadata value as a float (presence is checked by the template)."""
        return float(self.metadata[key])


def read_table(path: str | Path) -> Table:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise RenderError(f"cannot read {p}: {exc}") from None

    lines = text.splitlines()
    metadata: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        key, sep, value = body.partition("=")
        if sep:
            metadata[key.strip()] = value
        i += 1

    table_lines = [ln for ln in lines[i:] if ln.strip()]
    if not table_lines:
        raise SchemaError(f"{p}: no header row after the metadata preamble")

    reader = csv.reader(table_lines)
    columns = tuple(next(reader))
    rows: list[list[float]] = []
    for rownum, cells in enumerate(reader, start=2):
        if len(cells) != len(columns):
            raise SchemaError(
                f"{p}: table row {rownum} has {len(cells)} cells, "
                f"header has {len(columns)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise SchemaError(
                f"{p}: non-numeric cell in table row {rownum}: {cells!r}"
            ) from None
    return Table(path=p, metadata=metadata, columns=columns, rows=rows)
