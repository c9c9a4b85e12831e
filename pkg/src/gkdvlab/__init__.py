"""Pseudospectral laboratory for the septic generalized KdV equation with
unit-cube randomized data: spectral grid operators, the randomization map,
dispersive-weighted space-time norms, two cross-validating solvers, and
Monte Carlo tail diagnostics.
"""

__version__ = "0.1.0"

from . import grid, montecarlo, norms, params, probes, solver, spacetime, streams, wiener

__all__ = [
    "__version__",
    "grid",
    "montecarlo",
    "norms",
    "params",
    "probes",
    "solver",
    "spacetime",
    "streams",
    "wiener",
]
