"""Exception hierarchy shared by every module."""


class TropivolError(Exception):
    """Base class; the CLI maps these to exit status 1."""


class ArityError(TropivolError):
    """Mismatched profiles, lengths or matrix shapes."""


class DomainError(TropivolError):
    """An input violates an operation's precondition."""


class ClosureError(TropivolError):
    """A purported group or subgroup is not closed under multiplication."""


class FiltrationError(TropivolError):
    """A ramification filtration is not a descending chain of subgroups ending at {1}."""


class EquivarianceError(TropivolError):
    """A lattice map does not commute with the group action."""


class InconsistencyError(TropivolError):
    """Conductor data combine to an impossible (negative or non-integral) value."""


class SingularMapError(TropivolError):
    """An affine change of variables has a zero scale factor."""


class InvalidFiberError(TropivolError):
    """Special-fiber data do not have the declared dimension."""


class UnsupportedError(TropivolError):
    """The input lies outside the representable fragment."""


def describe(e: Exception) -> str:
    """Message prefixed by the error kind, e.g. ``arity error: ...``."""
    name = type(e).__name__
    if type(e) is TropivolError or not name.endswith("Error"):
        return str(e)
    words = "".join(" " + c.lower() if c.isupper() else c for c in name[: -len("Error")]).strip()
    return f"{words} error: {e}"
