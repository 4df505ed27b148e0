"""Exception types shared across the package.

The split mirrors the CLI exit codes: contract violations are caller bugs
(exit 1), numerical failures are runtime conditions (exit 2), and in-run
check failures are reported separately (exit 3).
"""


class ContractError(ValueError):
    """An input violates an operation's stated contract."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or lost validity."""


class KappaTooSmallError(NumericalError):
    """The resolvent shift does not clear the bottom of the spectrum."""


class BlowUpError(NumericalError):
    """Time integration aborted on an exploding or non-finite state."""

    def __init__(self, time, sup_norm):
        self.time = time
        self.sup_norm = sup_norm
        super().__init__(
            "solution blow-up at t=%.6g (sup-norm %.3e)" % (time, sup_norm)
        )
