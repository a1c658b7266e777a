"""Exception types shared across the package."""


class FormatError(ValueError):
    """A file or byte payload does not match its declared format.

    Messages name the byte offset of the first offending byte where one
    is known.
    """


class ConfigError(ValueError):
    """Invalid parameter combination or mismatched operands."""
