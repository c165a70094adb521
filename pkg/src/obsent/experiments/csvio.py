"""CSV emission and parsing with a '#'-prefixed metadata preamble.

Layout: metadata lines ``# key=value`` first, then one header row, then
data rows.  Floats are printed with 12 significant digits so reruns diff
byte-identically; the ``created`` metadata line is the one sanctioned
exception and is excluded from comparisons.
"""

from __future__ import annotations

from datetime import datetime, timezone

import numpy as np


def format_value(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return format(float(x), ".12g")
    return str(x)


def write_csv(path, metadata: dict, header: list, rows) -> None:
    lines = []
    for key, value in metadata.items():
        lines.append(f"# {key}={format_value(value)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(cell) for cell in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def read_csv(path):
    """Return (metadata dict, header list, value array of shape (rows, cols)).

    Non-numeric cells are kept as strings in an object array.
    """
    metadata, header, rows = {}, None, []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                metadata[key] = value
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append(cells)
    parsed = []
    for row in rows:
        out = []
        for cell in row:
            try:
                out.append(float(cell))
            except ValueError:
                out.append(cell)
        parsed.append(out)
    try:
        data = np.asarray(parsed, dtype=float)
    except (ValueError, TypeError):
        data = np.asarray(parsed, dtype=object)
    return metadata, header or [], data
