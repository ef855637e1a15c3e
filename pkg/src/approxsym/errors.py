"""Exception taxonomy shared by all modules."""


class ApproxSymError(Exception):
    """Base class for all package errors."""


class SyntaxErrorAt(ApproxSymError):
    """Parse failure, carrying 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownSymbol(ApproxSymError):
    """Strict-mode parse encountered an undeclared identifier."""


class NotPolynomial(ApproxSymError):
    """collect() was asked for a generator the expression is not polynomial in."""


class DerivativeOverflow(ApproxSymError):
    """A total derivative would exceed the jet space's transient bound r+1."""


class SingularAtEpsZero(ApproxSymError):
    """eps-expansion hit a division by something vanishing identically at eps=0."""


class OrderMismatch(ApproxSymError):
    """Series arithmetic on series of different truncation orders."""


class MissingFamilyIndex(ApproxSymError):
    """Recursion operator applied to a named function without a family index."""


class CacheMissing(ApproxSymError):
    """Generator applied at a prolongation order that was never computed."""


class NotAVariationalSymmetry(ApproxSymError):
    """Flux assembly requested for a generator/gauge pair with nonzero residual."""


class FormulaMismatch(ApproxSymError):
    """Residual is zero but the assembled fluxes fail the divergence check."""


class CannotSolveForLeadingDerivative(ApproxSymError):
    """Euler-Lagrange hierarchy is not solvable for the second derivatives."""


class AnsatzIncomplete(ApproxSymError):
    """Determining extraction met a family function with no declared ansatz."""


class SymbolicPivotAmbiguity(ApproxSymError):
    """Elimination would need to decide whether a symbolic constant expression is zero."""

    def __init__(self, pivot):
        super().__init__(f"cannot decide whether pivot is zero: {pivot}")
        self.pivot = pivot


class UnboundSymbol(ApproxSymError):
    """Numeric compilation met a symbol with no binding."""


class NonFiniteState(ApproxSymError):
    """Integration produced an overflow or NaN."""


class UnknownModel(ApproxSymError):
    """No builtin model with the requested name."""


class ModelError(ApproxSymError):
    """Model file failed schema validation; message carries the offending path."""
