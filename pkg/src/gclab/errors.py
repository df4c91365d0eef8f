"""Exception taxonomy for the workbench.

Checker entry points report violations through Report records instead of
raising; exceptions are reserved for misuse of an operation (violated
preconditions, unusable inputs).
"""


class GCLabError(Exception):
    """Base class for all workbench errors."""


# --- jet calculus ---------------------------------------------------------

class DomainViolation(GCLabError):
    """Point lies outside a field's declared domain."""


class OrderOverflow(GCLabError):
    """A jet of higher order than the chart's configured maximum was requested."""


class DivisionNearZero(GCLabError):
    """Jet division with denominator value inside the guard band."""


class NegativeArgument(GCLabError):
    """log/sqrt/real-power of a jet whose value is not strictly positive."""


# --- generalized tangent bundle -------------------------------------------

class DimensionMismatch(GCLabError):
    """Operands live on charts of different dimension."""


class ZeroConformalFactor(GCLabError):
    """Conformal factor vanishes (or is inside the guard band)."""


# --- courant calculus ------------------------------------------------------

class NonInvariantSection(GCLabError):
    """Strict mode: a section fails the Lie-derivative invariance check."""


# --- structures -------------------------------------------------------------

class NotAlmostComplex(GCLabError):
    """Endomorphism does not square to -Id on TM."""


class DegenerateForm(GCLabError):
    """2-form is singular where non-degeneracy is required."""


class RankDeficiency(GCLabError):
    """Eigenprojector rank differs from the expected bundle rank."""


class VerdictDisagreement(GCLabError):
    """Two independent criteria for the same property disagree."""


class NonCommuting(GCLabError):
    """Candidate pair of structures fails to commute."""


class IndefiniteMetric(GCLabError):
    """Candidate generalized metric is not positive definite."""


class ToleranceAmbiguity(GCLabError):
    """Singular values straddle the rank-decision band."""


class TypeJump(GCLabError):
    """Structure type is not constant across the sample set."""


# --- deformations ------------------------------------------------------------

class DegenerateFrame(GCLabError):
    """Canonical 4-frame has rank < 4 (or degenerate pairing) at a sample."""


class PathDisagreement(GCLabError):
    """Closed-form and generic computation of the same quantity disagree."""


# --- twist engine -------------------------------------------------------------

class PreconditionUnmet(GCLabError):
    """A check was invoked although a prerequisite report failed."""


class IncompatibleBivector(GCLabError):
    """Bivector is not type-compatible with the complex structure."""


class NotHyperKahler(GCLabError):
    """Triple of structures fails the quaternionic relations."""


# --- kk pipeline ---------------------------------------------------------------

class SingularInput(GCLabError):
    """Denominator data (f^2-1 or G(X0,X0)) inside the guard band."""


class NonPositiveHamiltonian(GCLabError):
    """Hamiltonian function is not positive on the requested domain."""


class VanishingKillingField(GCLabError):
    """Killing field vanishes at a sample."""


class J3NotAForm(GCLabError):
    """pr_T of the third structure applied to X0 is not numerically zero."""


class FrameDegeneracy(GCLabError):
    """Required subbundle frame could not be constructed at a sample."""


# --- toric models ----------------------------------------------------------------

class SingularPsi(GCLabError):
    """det(Hess tau + C) vanishes at a sample."""


class NotConvex(GCLabError):
    """Hessian of the symplectic potential is not positive definite."""


class KahlerDegenerate(GCLabError):
    """4D closed-form valid only for C12 != 0 was requested with C12 = 0."""


class UnknownPotential(GCLabError):
    """Unrecognized builtin potential name."""


class ParameterOutOfRange(GCLabError):
    """Builtin potential parameter outside its admissible range."""


class ConstraintViolation(GCLabError):
    """A sign/positivity constraint of a data builder fails; message says which."""


# --- scenarios / CLI ---------------------------------------------------------------

class ParseError(GCLabError):
    """Scenario file is not well formed; message carries line/column."""


class UnknownKey(GCLabError):
    """Unknown (or missing required) scenario key; message carries location."""


class ExpressionError(GCLabError):
    """Scenario expression does not parse in the closed field grammar."""
