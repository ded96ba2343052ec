class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ConvergenceError(RuntimeError):
    """The QR iteration exhausted its budget.

    ``partial`` holds the eigenvalues emitted before the failure.
    """

    def __init__(self, message, partial=None, iterations=0):
        super().__init__(message)
        self.partial = partial
        self.iterations = iterations
