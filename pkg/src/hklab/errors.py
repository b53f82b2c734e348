"""Exception hierarchy shared by the library and the command line tool.

Every error carries an exit code so the CLI can map failures without
inspecting messages: 2 parse, 3 violated mathematical precondition,
4 resource or retry exhaustion, 5 internal inconsistency.
"""


class HKError(Exception):
    exit_code = 5


class ParseError(HKError):
    """Malformed input text; offset is a 0-based byte offset when known."""

    exit_code = 2

    def __init__(self, message, offset=None, line=None):
        self.offset = offset
        self.line = line
        where = []
        if line is not None:
            where.append("line %d" % line)
        if offset is not None:
            where.append("offset %d" % offset)
        if where:
            message = "%s (%s)" % (message, ", ".join(where))
        super().__init__(message)


class PreconditionError(HKError):
    """An operation was called outside its mathematical domain."""

    exit_code = 3


class FieldMismatchError(PreconditionError):
    pass


class RingMismatchError(PreconditionError):
    pass


class UnsupportedCharacteristicError(PreconditionError):
    pass


class NotAUnitError(PreconditionError):
    pass


class NotPreparableError(PreconditionError):
    pass


class NotMPrimaryError(PreconditionError):
    pass


class SingularMatrixError(PreconditionError):
    pass


class NeedsFieldExtension(PreconditionError):
    """A root is missing over the current field but exists in a small extension.

    degree is the extension degree that is guaranteed to contain the root.
    """

    def __init__(self, message, degree):
        self.degree = degree
        super().__init__(message)


class ResourceError(HKError):
    exit_code = 4


class RetryExhaustedError(ResourceError):
    pass


class KernelCapacityError(ResourceError):
    pass


class InternalCheckError(HKError):
    """A self check that should be unreachable failed; always a bug."""

    exit_code = 5
