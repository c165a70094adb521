class SchemaError(Exception):
    """Input CSV does not match what a template needs.

    Raised with a message that spells out the expectation (columns,
    metadata keys, or hash agreement) and what the file actually
    contains, so a failing batch run is diagnosable from the log alone.
    """


def require_columns(template_id: str, path, header, needed) -> None:
    missing = [c for c in needed if c not in header]
    if missing:
        raise SchemaError(
            f"template {template_id}: {path}: missing columns {missing}; "
            f"file has {list(header)}")


def require_metadata(template_id: str, path, metadata, needed) -> None:
    missing = [k for k in needed if k not in metadata]
    if missing:
        raise SchemaError(
            f"template {template_id}: {path}: missing metadata keys "
            f"{missing}; file has {sorted(metadata)}")
