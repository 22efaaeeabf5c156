"""Exception types shared by the library and the command line."""


class InvalidArgument(ValueError):
    """Input violates an operation's precondition."""


class ResourceLimit(RuntimeError):
    """Input is too large for the requested (brute-force) path."""
