"""Exact mutual information for finite channels, with concavity diagnostics."""

from .errors import (
    AlphabetMismatch,
    BudgetTooSmall,
    DegenerateChannel,
    DomainError,
    HardCapExceeded,
    InfogapError,
    RateOutOfRange,
    ValidationError,
    ZeroMarginal,
)
from .discrete import (
    DiscreteChannel,
    JointTable,
    SignalDist,
    conditional_mi,
    entropy,
    mutual_information,
    observe_through,
)
from .bernoulli_gap import (
    SWEEP_HEADER,
    UNIFORM_BINARY,
    BernoulliPairParams,
    ConvergenceRow,
    GapReport,
    SweepRow,
    bernoulli_channel,
    g_function,
    gap_report,
    sweep_heatmap,
    taylor_convergence_check,
    taylor_gap_closed_form,
    taylor_i_terms,
    write_sweep_csv,
)
from .gaussian import (
    CenteredGram,
    GaussianChannelSpec,
    MonteCarloBudget,
    PsdLimitRow,
    QuadratureBudget,
    centered_gram,
    gaussian_mi,
    immse_derivative_check,
    joint_gaussian_mi,
    psd_limit_check,
    q1_gaussian_check,
)
from .community import (
    SbmParams,
    TruncationPolicy,
    block_mi,
    hessian_entries,
    j_function,
    limit_hessian_combination,
    nonpositivity_triple,
    phi_function,
    poisson_pmf,
    poissonized_mi,
    psi_function,
    quadratic_form_at_zero,
)
from .checks import CHECK_ORDER, CheckResult, run_checks

__all__ = [
    "AlphabetMismatch",
    "BernoulliPairParams",
    "BudgetTooSmall",
    "CHECK_ORDER",
    "CenteredGram",
    "CheckResult",
    "ConvergenceRow",
    "DegenerateChannel",
    "DiscreteChannel",
    "DomainError",
    "GapReport",
    "GaussianChannelSpec",
    "HardCapExceeded",
    "InfogapError",
    "JointTable",
    "MonteCarloBudget",
    "PsdLimitRow",
    "QuadratureBudget",
    "RateOutOfRange",
    "SWEEP_HEADER",
    "SbmParams",
    "SignalDist",
    "SweepRow",
    "TruncationPolicy",
    "UNIFORM_BINARY",
    "ValidationError",
    "ZeroMarginal",
    "bernoulli_channel",
    "block_mi",
    "centered_gram",
    "conditional_mi",
    "entropy",
    "g_function",
    "gap_report",
    "gaussian_mi",
    "hessian_entries",
    "immse_derivative_check",
    "j_function",
    "joint_gaussian_mi",
    "limit_hessian_combination",
    "mutual_information",
    "nonpositivity_triple",
    "observe_through",
    "phi_function",
    "poisson_pmf",
    "poissonized_mi",
    "psd_limit_check",
    "psi_function",
    "q1_gaussian_check",
    "quadratic_form_at_zero",
    "run_checks",
    "sweep_heatmap",
    "taylor_convergence_check",
    "taylor_gap_closed_form",
    "taylor_i_terms",
    "write_sweep_csv",
]
