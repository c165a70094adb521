"""Parser for the simulator's CSV contract.

Layout: ``# key=value`` metadata lines, then one comma-separated header
row, then float data rows.  Kept independent of the simulator package on
purpose; the CSV file is the interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .schema import SchemaError


@dataclass(frozen=True)
class CsvTable:
    path: Path
    metadata: dict
    header: tuple
    data: np.ndarray  # shape (rows, len(header))

    def column(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.header.index(name)]
        except ValueError:
            raise SchemaError(
                f"{self.path}: no column '{name}' (has {list(self.header)})")

    def meta_float(self, key: str) -> float:
        try:
            return float(self.metadata[key])
        except KeyError:
            raise SchemaError(
                f"{self.path}: no metadata key '{key}' "
                f"(has {sorted(self.metadata)})")
        except ValueError:
            raise SchemaError(
                f"{self.path}: metadata '{key}={self.metadata[key]}' "
                f"is not a number")


def read_table(path) -> CsvTable:
    path = Path(path)
    metadata = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if header is not None:
                    raise SchemaError(
                        f"{path}:{lineno}: metadata line after the header")
                body = line.lstrip("#").strip()
                key, sep, value = body.partition("=")
                if not sep:
                    raise SchemaError(
                        f"{path}:{lineno}: metadata without '=': {line!r}")
                metadata[key.strip()] = value
                continue
            cells = line.split(",")
            if header is None:
                header = tuple(cells)
                continue
            if len(cells) != len(header):
                raise SchemaError(
                    f"{path}:{lineno}: {len(cells)} cells, header has "
                    f"{len(header)}")
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: non-numeric cell in {line!r}")
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return CsvTable(path=path, metadata=metadata, header=header,
                    data=np.asarray(rows, dtype=float))
