"""Positivity certificates and factorizations for Hermitian block matrices."""

__version__ = "0.1.0"

from .blockmat import (  # noqa: E402
    BlockMatrix,
    BlockPartition,
    ModuleVector,
    RankOneBlock,
    assemble,
    block_diag,
    cross_entry_value,
    inner_product,
    quadratic_form,
)
from .douglas import DouglasInstance, DouglasReport, majorization_lambda, range_inclusion_check, solve  # noqa: E402
from .errors import GramCertError  # noqa: E402
from .gramfactor import GramFactor, RegularizationSchedule, gram_factor, matrix_sqrt_psd  # noqa: E402
from .positivity import (  # noqa: E402
    CrossEntryReport,
    PositivityCertificate,
    Verdict,
    cross_entry_check,
    min_eig_oracle,
    positivity_verdict,
    schur_chain,
)
from .schwarz import (  # noqa: E402
    PowerPair,
    SchwarzProblem,
    SchwarzResult,
    TabulatedPair,
    continuity_probe,
    optimize_s,
    schwarz_constant_exact,
    schwarz_quotient,
)
from .spectral import CoercivityInstance, GapCertificate, coercivity_delta, gamma_exact, gap_certificate  # noqa: E402
from .testkit import InstanceSpec, generate, numerical_radius_sampled  # noqa: E402
