"""Exception hierarchy shared by every rovellalab module.

All library errors derive from :class:`RovellaError`.  Errors that a caller
could have prevented by passing valid input additionally derive from
``ValueError`` so that generic validation code can catch one base class;
runtime breakdowns (failed iteration, degenerate orbits) derive from
``RuntimeError`` instead.
"""

from __future__ import annotations


class RovellaError(Exception):
    """Base class for every error raised by this package."""


class InputDomainError(RovellaError, ValueError):
    """A numeric argument lies outside the domain of the requested operation."""


class NonDifferentiableError(InputDomainError):
    """Derivative requested at a point where the map is not differentiable."""


class PoleError(InputDomainError):
    """Evaluation requested at a pole of the quantity (derivative factor,
    domination ratio, projection) where it is genuinely infinite."""


class StableManifoldError(InputDomainError):
    """A flow-model map was applied to a point on the local stable manifold,
    which never reaches the target cross-section."""


class ProjectionUndefinedError(InputDomainError):
    """A projection was applied at a point where its defining formula
    degenerates (e.g. the angular coordinate at the poles)."""


class SpecError(RovellaError, ValueError):
    """A parameter record violates its own validity constraints."""


class StructuralError(RovellaError, ValueError):
    """Arrays or records passed together disagree in shape or labeling."""


class HypothesisViolationError(RovellaError, ValueError):
    """Input data fails a hypothesis that the requested bound requires."""


class ConvergenceError(RovellaError, RuntimeError):
    """An iterative scheme exhausted its budget before reaching tolerance."""


class DegeneracyError(RovellaError, RuntimeError):
    """An orbit or construction degenerated (hit a fixed point, collapsed
    below floating-point resolution) before the requested length.

    The optional ``index`` attribute records where the degeneracy happened.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index
