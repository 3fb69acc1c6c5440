"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
the most specific one that applies rather than bare ValueError/RuntimeError.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Malformed or out-of-contract input (bad shapes, domains, schemas)."""


class CapabilityError(RuntimeError):
    """A request that is well-formed but exceeds a configured size cap.

    Raised instead of attempting work that would materialize an astronomically
    large hypothesis family or decode against one.
    """


class OptimizerInconclusive(RuntimeError):
    """Design optimization finished without meeting its convergence test."""
