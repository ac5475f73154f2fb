"""Exception raised when an input file violates its tabular contract."""


class MalformedInput(Exception):
    """The CSV or JSON input does not match the layout this package expects."""
