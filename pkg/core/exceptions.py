"""
Error hierarchy for the Green's function toolkit.

Every error is a ValueError carrying a stable ``code`` so the CLI can print
a single machine-readable line.
"""

from typing import Optional, Sequence, Tuple


class GreensError(ValueError):
    """Base class for all numerical and validation failures"""

    code = 'greens_error'

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def one_line(self) -> str:
        """Render as ``<code>: <message>`` on a single line"""
        text = ' '.join(str(self.message).split())
        return f"{self.code}: {text}"


class GridError(GreensError):
    code = 'invalid_grid'


class GridMismatchError(GridError):
    code = 'grid_mismatch'


class CoefficientError(GreensError):
    """A coefficient function produced a non-finite value"""

    code = 'non_finite_coefficient'

    def __init__(self, message: str, node: Optional[int] = None, x: Optional[float] = None,
                 k: Optional[int] = None):
        super().__init__(message)
        self.node = node
        self.x = x
        self.k = k


class SingularPivotError(GreensError):
    code = 'singular_pivot'

    def __init__(self, message: str, node: int):
        super().__init__(message)
        self.node = node


class ResolventConvergenceError(GreensError):
    code = 'resolvent_not_converged'

    def __init__(self, message: str, terms_used: int, last_term_norm: float):
        super().__init__(message)
        self.terms_used = terms_used
        self.last_term_norm = last_term_norm


class ResolventDisagreementError(GreensError):
    code = 'resolvent_disagreement'

    def __init__(self, message: str, deviation: float):
        super().__init__(message)
        self.deviation = deviation


class ExponentOverflowError(GreensError):
    code = 'exponent_overflow'

    def __init__(self, message: str, node_pair: Tuple[int, int]):
        super().__init__(message)
        self.node_pair = node_pair


class RootConvergenceError(GreensError):
    code = 'roots_not_converged'

    def __init__(self, message: str, residuals: Sequence[float]):
        super().__init__(message)
        self.residuals = list(residuals)


class ImaginaryResidueError(GreensError):
    code = 'imaginary_residue'

    def __init__(self, message: str, ratio: float):
        super().__init__(message)
        self.ratio = ratio


class DerivativeOrderError(GreensError):
    code = 'derivative_unavailable'


class ResonanceError(GreensError):
    """The homogeneous Dirichlet problem has a nontrivial solution"""

    code = 'resonant_interval'

    def __init__(self, message: str, w_const: float, threshold: float):
        super().__init__(message)
        self.w_const = w_const
        self.threshold = threshold


class ExpressionSyntaxError(GreensError):
    code = 'syntax_error'

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ExpressionDomainError(GreensError):
    code = 'domain_error'

    def __init__(self, message: str, subexpression: str):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class RunConfigError(GreensError):
    code = 'invalid_config'


class NonFiniteValueError(GreensError):
    code = 'non_finite_values'


class InvalidArgumentError(GreensError):
    code = 'invalid_argument'
