"""Exception types raised by the simulator."""


class SpinChannelError(Exception):
    """Base class for all errors raised by :mod:`spinchannel`."""


class DegenerateGroundState(SpinChannelError):
    """The environment ground state is not unique (a zero-energy mode exists).

    ``energies`` holds the offending quasiparticle energies and, when raised by
    the exact-diagonalization oracle, ``candidates`` holds the competing
    lowest energies of the two parity sectors.
    """

    def __init__(self, message, energies=None, candidates=None):
        super().__init__(message)
        self.energies = energies
        self.candidates = candidates


class SizeLimitExceeded(SpinChannelError):
    """An exact (exponential-cost) path was requested beyond its size guard."""


class InsufficientWindow(SpinChannelError):
    """Too few points above the threshold to fit a short-time decay rate."""


class NoRevivalFound(SpinChannelError):
    """No fidelity revival could be located in the given series."""


class ConfigError(SpinChannelError):
    """A run configuration could not be parsed or is inconsistent."""


class NumericalFailure(SpinChannelError):
    """A dense linear-algebra kernel failed (e.g. eigensolver non-convergence)."""
