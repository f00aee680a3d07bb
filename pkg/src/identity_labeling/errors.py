"""Exception types shared across the package."""


class IdentityLabelingError(Exception):
    """Base class for all package errors."""


class MalformedModelError(IdentityLabelingError, ValueError):
    """A coefficient model or network has an invalid structure."""


class UnknownConceptError(IdentityLabelingError, LookupError):
    """A concept, cue or identity token is not present in the loaded vocabulary."""

    def __init__(self, term, kind=None):
        self.term = term
        self.kind = kind
        where = f" ({kind})" if kind else ""
        super().__init__(f"unknown concept {term!r}{where}")

    def __str__(self):
        return self.args[0]


class DataFormatError(IdentityLabelingError, ValueError):
    """An input file could not be parsed.

    ``path`` and ``line`` locate the problem when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}"
            if line is not None:
                loc += f":{line}"
            loc += ": "
        super().__init__(loc + message)


class FitError(IdentityLabelingError, RuntimeError):
    """A model fit could not be carried out."""
