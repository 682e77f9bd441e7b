"""gevlab: a numerical laboratory for diagonal spectral operators.

Models operators with discrete spectrum as coordinate multiplication on a
sequence space, evolves y' = A y from admissible initial data, decides
order-beta regularity of vectors and solutions by certified series tests,
and mechanically reproduces the refutation constructions for spectra that
escape the admissible region.
"""

from .asymptotics import AsymForm, AsymTerm, TailBounds
from .borel_calculus import (
    CompositeSymbol,
    DomainCriterion,
    DomainVerdict,
    ExpSymbol,
    GevreyExpSymbol,
    PowerNorms,
    PowerSymbol,
    SymbolFunction,
    apply_symbol,
    catalog_symbols,
    compose,
    domain_member_direct,
    domain_member_prop31,
    power_norms,
)
from .catalog import builtin_spectra, builtin_vectors
from .counterexamples import (
    AnalyticAtZero,
    AnalyticUnknown,
    CounterexampleArtifacts,
    NotAnalytic,
    PlanCase,
    SupportView,
    ViolatingSpectrumPlan,
    analytic_at_zero_probe,
    build_counterexample,
    build_violating_spectrum,
    plan_for_spectrum,
)
from .errors import (
    ConsistencyError,
    CounterexampleError,
    DomainError,
    GevlabError,
    HarnessError,
    JobSpecError,
    PlanError,
    SpectrumError,
    VectorError,
)
from .evolution import (
    AdmissibilityCertificate,
    DecayDominates,
    ExplicitFinite,
    ReBoundedAbove,
    SolutionHandle,
    Undetermined,
    WitnessFailure,
    check_admissible,
    derivative,
    pairing,
    solve,
    weak_solution_residual,
)
from .gevrey_classifier import (
    GevreyFlavor,
    GevreyVerdict,
    HarnessReport,
    OrderEstimate,
    RatioTail,
    RegionHolds,
    RegionReport,
    RegionUnknown,
    RegionViolated,
    estimate_order,
    region_condition,
    solution_class_at,
    theorem_equivalence_harness,
    vector_class,
    vector_class_beta0,
)
from .logdomain import LogPolar, complex_logsum, logsumexp, wrap_phase
from .series import (
    ConvergenceCertificate,
    SeriesBudget,
    SeriesStatus,
    certify_log_series,
    DEFAULT_BUDGET,
)
from .spectral_core import (
    SPECTRAL_MEASURE_BOUND,
    BorelPredicate,
    CoefficientVector,
    CustomSpectrum,
    ExplicitSpectrum,
    PairingMeasure,
    PowerLawSpectrum,
    SpectrumFamily,
    abs_gt,
    abs_le,
    conjugate_exponent,
    disk,
    halfplane_re_ge,
    multiplicativity_check,
    predicate_all,
    predicate_and,
    predicate_none,
    project,
    total_variation,
)

__version__ = "0.1.0"
