"""Errors raised while reading experiment CSV files."""


class SchemaMismatch(ValueError):
    """The file's header does not match any known experiment schema."""


class EmptyInput(ValueError):
    """The file parses but contains no data rows."""
