"""Secrecy outage analysis for relay-jammed satellite downlinks.

Subpackages by concern:

* :mod:`secsat.numerics` - Bessel, Marcum Q, chi-square laws, quadrature
* :mod:`secsat.channel` - fading channels, null-space jamming
* :mod:`secsat.secrecy` - secrecy capacity and outage probability
* :mod:`secsat.relay_selection` - choosing the jamming relay
* :mod:`secsat.power_allocation` - splitting power between satellite and relay
* :mod:`secsat.experiments` - scenarios, seeded runs, CSV output
"""

from .errors import (
    ConvergenceError,
    DegenerateChannelError,
    DimensionMismatchError,
    DomainError,
    ScenarioError,
    SecsatError,
)

__version__ = "0.1.0"

__all__ = [
    "SecsatError",
    "DomainError",
    "DegenerateChannelError",
    "DimensionMismatchError",
    "ConvergenceError",
    "ScenarioError",
    "__version__",
]
