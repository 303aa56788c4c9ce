"""Exception types shared across the package."""


class PermbaseError(Exception):
    pass


class InputError(PermbaseError, ValueError):
    """Malformed or inconsistent input (degree mismatch, non-subgroup, ...)."""


class ResourceError(PermbaseError):
    """A configured budget would be exceeded."""


class StateError(PermbaseError):
    """An operation was called on an object in the wrong state."""


class InternalError(PermbaseError):
    """An invariant that should hold by construction failed."""
