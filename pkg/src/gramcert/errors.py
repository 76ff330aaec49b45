"""Exception hierarchy shared by all modules."""


class GramCertError(Exception):
    """Base class for every error raised by this package."""

    code = "error"


# blockmat


class ShapeMismatch(GramCertError, ValueError):
    code = "shape_mismatch"


class NotHermitianDiagonal(GramCertError, ValueError):
    code = "not_hermitian_diagonal"


class NotHermitian(GramCertError, ValueError):
    code = "not_hermitian"


class PartitionMismatch(GramCertError, ValueError):
    code = "partition_mismatch"


class BlockIndexError(GramCertError, IndexError):
    code = "index_out_of_range"


# positivity


class EigenFailure(GramCertError, ArithmeticError):
    code = "eigen_failure"


class DiagonalNotPSD(GramCertError, ValueError):
    code = "diagonal_not_psd"

    def __init__(self, block, eigenvalue):
        super().__init__(f"diagonal block {block} has eigenvalue {eigenvalue:.3e}")
        self.block = block
        self.eigenvalue = eigenvalue


class SingularPivot(GramCertError, ArithmeticError):
    code = "singular_pivot"

    def __init__(self, block, eigenvalue, epsilon):
        super().__init__(
            f"pivot {block} numerically singular (min eigenvalue {eigenvalue:.3e}) "
            f"at epsilon={epsilon:.1e}"
        )
        self.block = block
        self.eigenvalue = eigenvalue
        self.epsilon = epsilon


# gramfactor


class NotPSD(GramCertError, ValueError):
    code = "not_psd"


class NotPSDDiagonal(GramCertError, ValueError):
    code = "not_psd_diagonal"

    def __init__(self, block, eigenvalue):
        super().__init__(f"diagonal block {block} has eigenvalue {eigenvalue:.3e}")
        self.block = block
        self.eigenvalue = eigenvalue


class CrossBoundViolation(GramCertError, ArithmeticError):
    """A tentative column entry exceeded the norm threshold M."""

    code = "cross_bound_violation"

    def __init__(self, i, j, norm):
        super().__init__(
            f"column entry ({i},{j}) has norm {norm:.3e}; "
            "the cross-entry bounds may not hold numerically"
        )
        self.i = i
        self.j = j
        self.norm = norm


class IndefinitePivot(CrossBoundViolation):
    """An updated diagonal pivot came out indefinite, so T is not PSD."""

    code = "indefinite_pivot"

    def __init__(self, i, eigenvalue):
        GramCertError.__init__(
            self, f"pivot {i} is indefinite (min eigenvalue {eigenvalue:.3e})"
        )
        self.i = i
        self.j = i
        self.norm = float("inf")
        self.eigenvalue = eigenvalue


class ResidualNotConverged(GramCertError, ArithmeticError):
    code = "residual_not_converged"

    def __init__(self, residual, factor):
        super().__init__(f"residual {residual:.3e} did not reach the tolerance")
        self.residual = residual
        self.factor = factor


# schwarz


class NotUnitVector(GramCertError, ValueError):
    code = "not_unit_vector"


class ZeroOperator(GramCertError, ValueError):
    code = "zero_operator"


# douglas


class NotASolution(GramCertError, ValueError):
    code = "not_a_solution"


# spectral


class SingularDiagonal(GramCertError, ArithmeticError):
    code = "singular_diagonal"


class GammaOutOfRange(GramCertError, ValueError):
    code = "gamma_out_of_range"


class InvalidBound(GramCertError, ValueError):
    code = "invalid_bound"


class CertificateRefused(GramCertError, ArithmeticError):
    """The eigen oracle contradicted the coercivity bound."""

    code = "certificate_refused"

    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


# testkit / io


class InvalidSpec(GramCertError, ValueError):
    code = "invalid_spec"


class SchemaError(GramCertError, ValueError):
    code = "schema_error"
