"""Exception hierarchy shared by all kirchlip modules."""


class KirchError(Exception):
    """Base class for library errors."""


class InputError(KirchError, ValueError):
    """A precondition on the caller's input does not hold."""


class ResourceError(KirchError):
    """A configured search or size bound was exceeded."""


class InternalContradiction(KirchError, AssertionError):
    """A state the mathematics rules out; signals an implementation bug."""
