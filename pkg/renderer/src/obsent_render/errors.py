"""Error types raised while reading tables or rendering figures."""


class RenderError(Exception):
    """Base class for renderer failures."""


class SchemaError(RenderError):
    """Input CSV does not provide what the template needs.

    The message always spells out the full expected schema so a failure
    is actionable without opening the source.
    """


class HashMismatchError(RenderError):
    """Multi-file figure fed CSVs with differing config hashes."""
