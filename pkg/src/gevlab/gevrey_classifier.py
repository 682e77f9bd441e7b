"""Regularity classification of vectors and solutions.

Membership of order beta is probed through the exponential domains
D(e^{s|A|^{1/beta}}): a positive critical scale s* marks the Roumieu class,
s* = +infinity the Beurling class.  The universal ("for all s") Beurling
statement is decided by closed-form exponent comparison on supported
families, with the numeric certificate at the largest probed s kept as a
consistency check.  The geometric spectral-region test and the growth-order
estimator live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .asymptotics import GrowthKind, classify_form
from .borel_calculus import (
    DomainVerdict,
    GevreyExpSymbol,
    domain_member_direct,
    power_norms,
)
from .errors import ConsistencyError, DomainError, HarnessError, VectorError
from .evolution import SolutionHandle, check_admissible, solve
from .logdomain import NEG_INF
from .series import DEFAULT_BUDGET, SeriesBudget, SeriesStatus
from .spectral_core import (
    CoefficientVector,
    CustomSpectrum,
    ExplicitSpectrum,
    PowerLawSpectrum,
    SpectrumFamily,
    abs_gt,
    project,
)

_S_LO = 2.0**-20
_S_HI = 2.0**20
_BISECT_STEPS = 60


class GevreyFlavor(Enum):
    ROUMIEU = "roumieu"
    BEURLING = "beurling"


@dataclass(frozen=True)
class GevreyVerdict:
    """Class membership verdict with the certified critical-scale bracket.

    member is True only when backed by a convergence certificate at some
    probed scale (Roumieu) or by the closed-form rule plus the top-scale
    certificate (Beurling); False only with a divergence certificate;
    None is an explicit Unknown.
    """

    flavor: GevreyFlavor
    member: Optional[bool]
    s_star_low: float
    s_star_high: float
    probes: tuple[tuple[float, str], ...] = ()
    support_bound: Optional[float] = None
    detail: str = ""

    @property
    def critical_exponent(self) -> float:
        if self.s_star_high == math.inf:
            return math.inf if self.s_star_low == math.inf else self.s_star_low
        if self.s_star_low <= 0.0:
            return 0.0
        return math.sqrt(self.s_star_low * self.s_star_high)


def _check_beta(beta: float, positive: bool = True) -> float:
    b = float(beta)
    if not math.isfinite(b) or b < 0 or (positive and b == 0):
        raise ValueError(f"beta must be {'positive' if positive else '>= 0'} and finite")
    return b


def _leading_scale(form) -> tuple:
    lead = form.leading()
    if lead is None:
        return (0.0, 0, 0.0)
    return (lead.power, lead.log_power, lead.coeff)


def _closed_forms(f: CoefficientVector, beta: float):
    """(roumieu, beurling, s_upper) closed-form verdicts from exponent comparison.

    s_upper, when finite, is a scale at which membership is symbolically
    certain (used to rescue critical scales below the probe floor).
    """
    space = f.series_space()
    growth = space.abs_pow_bounds(1.0 / beta)
    decay = space.coeff_bounds
    if growth is None or decay is None or decay.upper is None:
        return None, None, None
    gu = growth.upper
    if gu is None:
        # only refutation is possible from the lower envelopes
        if growth.lower is not None and decay.lower is not None:
            ql, ml, cl = _leading_scale(growth.lower)
            if cl > 0 and (ql, ml) > _leading_scale(decay.lower)[:2]:
                return False, False, None
        return None, None, None
    g_kind, _ = classify_form(gu)
    if g_kind is GrowthKind.CONST or g_kind is GrowthKind.SUPER_DECAY:
        # bounded weight on the tail: every s works
        return True, True, None
    qg, mg, cg = _leading_scale(gu)
    qd, md, cd = _leading_scale(decay.upper)
    if cd >= 0:
        return None, None, None
    if (qd, md) > (qg, mg):
        return True, True, None
    if (qd, md) == (qg, mg):
        # membership certain for s below |cd|/cg on the upper envelopes
        return True, False, abs(cd) / (2.0 * cg)
    # growth scale strictly dominates: no s can work when the lower
    # envelopes confirm
    if growth.lower is not None and decay.lower is not None:
        ql, ml, cl = _leading_scale(growth.lower)
        if cl > 0 and (ql, ml) > _leading_scale(decay.lower)[:2]:
            return False, False, None
    return None, False, None


def _probe(f: CoefficientVector, s: float, beta: float, budget: SeriesBudget) -> DomainVerdict:
    return domain_member_direct(GevreyExpSymbol(s, beta), f, budget, resolve_value=False)


def _classify_both(
    f: CoefficientVector, beta: float, budget: SeriesBudget
) -> tuple[GevreyVerdict, GevreyVerdict]:
    beta = _check_beta(beta)
    probes: list[tuple[float, str]] = []

    if f.effective_count() is not None:
        v = _probe(f, 1.0, beta, budget)
        probes.append((1.0, v.certificate.status.value))
        detail = "finitely many atoms: every scale converges"
        r = GevreyVerdict(GevreyFlavor.ROUMIEU, True, math.inf, math.inf, tuple(probes), detail=detail)
        b = GevreyVerdict(GevreyFlavor.BEURLING, True, math.inf, math.inf, tuple(probes), detail=detail)
        return r, b

    closed_r, closed_b, s_rescue = _closed_forms(f, beta)

    def probe(s: float) -> Optional[bool]:
        v = _probe(f, s, beta, budget)
        probes.append((s, v.certificate.status.value))
        return v.member

    lo = probe(_S_LO)
    s_low, s_high = 0.0, math.inf
    roumieu: Optional[bool]
    if lo is True:
        roumieu = True
        s_low = _S_LO
        hi = probe(_S_HI)
        if hi is True:
            s_low = _S_HI
        else:
            # working window [e_lo, e_hi]; only certified refutations may
            # tighten the reported upper end of the bracket
            hi_cert = 20.0 if hi is False else math.inf
            e_lo, e_hi = -20.0, 20.0
            misses = 0
            for _ in range(_BISECT_STEPS):
                mid = 0.5 * (e_lo + e_hi)
                got = probe(2.0**mid)
                if got is True:
                    e_lo = mid
                    misses = 0
                elif got is False:
                    e_hi = mid
                    hi_cert = min(hi_cert, mid)
                    misses = 0
                else:
                    misses += 1
                    if misses >= 2:
                        break
                    e_hi = mid  # shrink the search window, not the bracket
            s_low = 2.0**e_lo
            s_high = 2.0**hi_cert if hi_cert < math.inf else math.inf
    elif lo is False:
        s_high = _S_LO
        if closed_r is True and s_rescue is not None and s_rescue < _S_LO:
            got = probe(s_rescue)
            if got is True:
                roumieu = True
                s_low = s_rescue
            else:
                roumieu = False
        else:
            roumieu = False if closed_r in (False, None) else closed_r
            if roumieu is True:
                # closed form promises a scale but none was certified
                roumieu = None
    else:
        roumieu = None

    # Beurling: certified top-scale probe AND the closed-form rule
    beurling: Optional[bool]
    if roumieu is False:
        beurling = False
    else:
        top_status = next((st for s, st in probes if s == _S_HI), None)
        if top_status is None and roumieu is True:
            probe(_S_HI)
            top_status = probes[-1][1]
        if top_status == SeriesStatus.DIVERGES.value:
            beurling = False
            if closed_b is True:
                raise ConsistencyError(
                    f"closed-form Beurling rule contradicts the certified divergence at s={_S_HI:g}"
                )
        elif closed_b is True and top_status == SeriesStatus.CONVERGES.value:
            beurling = True
            s_low = math.inf
            s_high = math.inf
        else:
            beurling = None

    detail_r = "bracketed by exponential-domain probes"
    detail_b = "closed-form tail rule with top-scale certificate"
    r = GevreyVerdict(
        GevreyFlavor.ROUMIEU, roumieu, s_low, s_high, tuple(probes), detail=detail_r
    )
    b = GevreyVerdict(
        GevreyFlavor.BEURLING,
        beurling,
        s_low if beurling is not True else math.inf,
        s_high if beurling is not True else math.inf,
        tuple(probes),
        detail=detail_b,
    )
    return r, b


def vector_class(
    f: CoefficientVector,
    beta: float,
    flavor: GevreyFlavor = GevreyFlavor.ROUMIEU,
    budget: SeriesBudget = DEFAULT_BUDGET,
) -> GevreyVerdict:
    """Membership of f in the order-beta class of the requested flavor."""
    r, b = _classify_both(f, beta, budget)
    return r if flavor is GevreyFlavor.ROUMIEU else b


def vector_class_beta0(f: CoefficientVector) -> GevreyVerdict:
    """Exponential-type test (order 0): bounded spectral support.

    Member exactly when some projection onto {|lam| <= alpha} carries all of
    f; the reported support bound is the largest eigenvalue modulus on the
    support.
    """
    count = f.effective_count()
    if count is not None:
        ks = np.arange(1, count + 1, dtype=np.int64)
        mags, _ = f.log_coeffs(ks)
        alive = mags > NEG_INF
        if not bool(np.any(alive)):
            return GevreyVerdict(
                GevreyFlavor.ROUMIEU, True, math.inf, math.inf,
                support_bound=0.0, detail="zero vector",
            )
        alpha = float(np.max(np.abs(f.spectrum.eigenvalues(ks[alive]))))
        leftover = project(f, abs_gt(alpha))
        lm, _ = leftover.log_coeffs(ks)
        if bool(np.any(lm > NEG_INF)):
            raise ConsistencyError("projection beyond the support bound is not zero")
        return GevreyVerdict(
            GevreyFlavor.ROUMIEU, True, math.inf, math.inf,
            support_bound=alpha, detail=f"support inside |lam| <= {alpha:g}",
        )
    unbounded = f.spectrum.unbounded
    if unbounded is None:
        return GevreyVerdict(
            GevreyFlavor.ROUMIEU, None, 0.0, math.inf,
            detail="custom family without support bounds",
        )
    if not unbounded:
        alpha = f.spectrum.max_abs()
        return GevreyVerdict(
            GevreyFlavor.ROUMIEU, True, math.inf, math.inf,
            support_bound=alpha, detail="bounded spectrum",
        )
    b = f.decay_bounds()
    if b is not None and b.lower is not None:
        return GevreyVerdict(
            GevreyFlavor.ROUMIEU, False, 0.0, 0.0,
            detail="unbounded spectral support: coefficients never vanish",
        )
    return GevreyVerdict(
        GevreyFlavor.ROUMIEU, None, 0.0, math.inf,
        detail="support unknown beyond the declared envelope",
    )


def solution_class_at(
    h: SolutionHandle,
    t: float,
    beta: float,
    flavor: GevreyFlavor = GevreyFlavor.ROUMIEU,
    budget: SeriesBudget = DEFAULT_BUDGET,
) -> GevreyVerdict:
    """Class of y(t): the solution is order-beta at t iff y(t) is."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return vector_class(solve(h, t), beta, flavor, budget)


# ---------------------------------------------------------------------------
# Spectral region test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionHolds:
    b_plus: float
    exception_radius: float


@dataclass(frozen=True)
class RegionViolated:
    witness: tuple[complex, ...]


@dataclass(frozen=True)
class RegionUnknown:
    reason: str


@dataclass(frozen=True)
class RatioTail:
    """Summary of rho_k = Re(lam_k) / |Im(lam_k)|^{1/beta} over a sample."""

    count: int
    finite: int
    min: float
    max: float
    tail_min: float
    tail_max: float


@dataclass(frozen=True)
class RegionReport:
    beta: float
    status: object  # RegionHolds | RegionViolated | RegionUnknown
    ratio_tail: RatioTail
    extrapolated: bool = False
    detail: str = ""

    @property
    def holds(self) -> bool:
        return isinstance(self.status, RegionHolds)

    @property
    def violated(self) -> bool:
        return isinstance(self.status, RegionViolated)


def _rho(lams: np.ndarray, beta: float) -> np.ndarray:
    re, im = lams.real, np.abs(lams.imag)
    with np.errstate(divide="ignore"):
        rho = re / im ** (1.0 / beta)
    zero_im = im == 0.0
    rho = np.where(zero_im & (re >= 0), math.inf, rho)
    rho = np.where(zero_im & (re < 0), -math.inf, rho)
    return rho


def _ratio_summary(spectrum: SpectrumFamily, beta: float, sample: int) -> RatioTail:
    n = spectrum.size if spectrum.size is not None else sample
    n = min(n, sample)
    ks = np.arange(1, n + 1, dtype=np.int64)
    rho = _rho(spectrum.eigenvalues(ks), beta)
    finite = rho[np.isfinite(rho)]
    half = rho[n // 2 :]
    return RatioTail(
        count=n,
        finite=int(finite.size),
        min=float(np.min(rho)),
        max=float(np.max(rho)),
        tail_min=float(np.min(half)),
        tail_max=float(np.max(half)),
    )


def _violation_witness(spectrum: SpectrumFamily, beta: float) -> tuple[complex, ...]:
    """Sampled subsequence with |lam| growing that fails Re >= b_+ |Im|^{1/beta}
    for every probed b_+ down to the bisection floor."""
    out = []
    for j in range(0, 21):
        k = 1 << j
        lam = spectrum.eigenvalue(k)
        rho = _rho(np.asarray([lam]), beta)[0]
        if rho < _S_LO:
            out.append(lam)
        if len(out) >= 12:
            break
    return tuple(out)


def _holds_verified(spectrum, beta, b_plus, radius, sample=4096) -> None:
    n = spectrum.size if spectrum.size is not None else sample
    ks = np.arange(1, min(n, sample) + 1, dtype=np.int64)
    lams = spectrum.eigenvalues(ks)
    outside = np.abs(lams) > radius
    ok = lams.real >= b_plus * np.abs(lams.imag) ** (1.0 / beta)
    if not bool(np.all(ok[outside])):
        raise ConsistencyError("region Holds verdict failed its numeric prefix check")


def region_condition(
    spectrum: SpectrumFamily,
    beta: float,
    allow_extrapolation: bool = False,
    budget: SeriesBudget = DEFAULT_BUDGET,
) -> RegionReport:
    """Is the spectrum inside {Re >= b_+ |Im|^{1/beta}} up to a bounded set?

    The main-theorem backing requires beta >= 1; smaller orders are exposed
    only behind allow_extrapolation, with no correctness claim.
    """
    beta = _check_beta(beta)
    extrapolated = beta < 1.0
    if extrapolated and not allow_extrapolation:
        raise ValueError(
            "region test is theorem-backed only for beta >= 1; "
            "pass allow_extrapolation=True to evaluate it anyway"
        )
    tail = _ratio_summary(spectrum, beta, 4096)

    if isinstance(spectrum, ExplicitSpectrum):
        status = RegionHolds(1.0, spectrum.max_abs() + 1.0)
        return RegionReport(beta, status, tail, extrapolated, "finite spectrum is bounded")

    params = _power_params(spectrum)
    if params is None:
        return RegionReport(
            beta,
            RegionUnknown("custom family without declared tail exponents"),
            tail,
            extrapolated,
        )
    a, p_re, b, p_im, estimated = params

    re_grows = a > 0 and p_re > 0
    im_unbounded = b != 0 and p_im > 0

    if not im_unbounded:
        if re_grows:
            threshold = abs(b) ** (1.0 / beta) if b != 0 else 0.0
            if threshold == 0.0:
                status = RegionHolds(1.0, 0.0)
            else:
                k_star = max(1, math.ceil((threshold / a) ** (1.0 / p_re)) + 1)
                radius = abs(spectrum.eigenvalue(k_star)) + 1.0
                status = RegionHolds(1.0, radius)
            _holds_verified(spectrum, beta, status.b_plus, status.exception_radius)
            return RegionReport(
                beta, status, tail, extrapolated, "real part grows, imaginary part bounded"
            )
        return RegionReport(
            beta,
            RegionViolated(_violation_witness(spectrum, beta)),
            tail,
            extrapolated,
            "unbounded spectrum with non-growing real part",
        )

    delta = p_re - p_im / beta
    if re_grows and delta > 0:
        if estimated:
            a_lo, b_hi = a / 8.0, abs(b) * 16.0
        else:
            a_lo, b_hi = a, abs(b)
        k_star = max(
            1, math.ceil((b_hi ** (1.0 / beta) / a_lo) ** (1.0 / delta)) + 1
        )
        radius = abs(spectrum.eigenvalue(k_star)) + 1.0
        status = RegionHolds(1.0, radius)
        _holds_verified(spectrum, beta, status.b_plus, status.exception_radius)
        return RegionReport(
            beta, status, tail, extrapolated,
            f"real-part exponent {p_re:g} > |Im| exponent {p_im:g}/beta",
        )
    if re_grows and delta == 0.0:
        if estimated:
            return RegionReport(
                beta,
                RegionUnknown("estimated constants cannot settle the boundary exponent case"),
                tail,
                extrapolated,
            )
        b_plus = a / abs(b) ** (1.0 / beta)
        for _ in range(4):
            b_plus = math.nextafter(b_plus, 0.0)
        status = RegionHolds(b_plus, 0.0)
        _holds_verified(spectrum, beta, status.b_plus, status.exception_radius)
        return RegionReport(
            beta, status, tail, extrapolated,
            "equal exponents: constant ratio rho_k",
        )
    return RegionReport(
        beta,
        RegionViolated(_violation_witness(spectrum, beta)),
        tail,
        extrapolated,
        "imaginary growth outruns the real part",
    )


def _power_params(spectrum: SpectrumFamily):
    if isinstance(spectrum, PowerLawSpectrum):
        return spectrum.a_re, spectrum.p_re, spectrum.a_im, spectrum.p_im, False
    if isinstance(spectrum, CustomSpectrum):
        if spectrum.declared_tail_exponents is None or spectrum._est is None:
            return None
        p_re, p_im = spectrum.declared_tail_exponents
        return spectrum._est["re"], p_re, spectrum._est["im"], p_im, True
    return None


# ---------------------------------------------------------------------------
# Growth-order estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderEstimate:
    beta_hat: float
    alpha_hat: float
    log_c_hat: float
    fit_residual: float
    n_range: tuple[int, int]
    log_norms: tuple[float, ...]


def estimate_order(
    f: CoefficientVector,
    n_max: int = 40,
    n_min: Optional[int] = None,
    budget: SeriesBudget = DEFAULT_BUDGET,
) -> OrderEstimate:
    """Fit log||A^n f|| ~ log c + n log alpha + beta n log n over [n_min, n_max].

    Early orders are dominated by the constants, so n_min defaults to
    max(4, n_max/4).
    """
    if n_min is None:
        n_min = max(4, n_max // 4)
    if n_min < 4:
        raise ValueError("n_min must be >= 4")
    if n_min >= n_max:
        raise ValueError("need n_min < n_max")
    norms = power_norms(f, n_max, budget)
    if norms.cutoff is not None:
        raise DomainError(
            f"power norms are certified only below n={norms.cutoff}",
            norms.cutoff_certificate,
        )
    ns = np.arange(n_min, n_max + 1, dtype=float)
    y = np.asarray(norms.log_norms[n_min : n_max + 1], dtype=float)
    if np.any(y == NEG_INF):
        raise VectorError("zero vector has no growth order")
    design = np.column_stack([np.ones_like(ns), ns, ns * np.log(ns)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return OrderEstimate(
        beta_hat=float(coef[2]),
        alpha_hat=float(math.exp(coef[1])),
        log_c_hat=float(coef[0]),
        fit_residual=resid,
        n_range=(n_min, n_max),
        log_norms=norms.log_norms,
    )


# ---------------------------------------------------------------------------
# Equivalence harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarnessRow:
    vector: str
    admissible: bool
    admissible_unknown: bool
    verdicts: tuple[tuple[float, str, Optional[bool]], ...] = ()  # (t, flavor, member)


@dataclass(frozen=True)
class HarnessReport:
    spectrum: str
    beta: float
    region: RegionReport
    rows: tuple[HarnessRow, ...]
    counterexample: Optional[object] = None
    notes: tuple[str, ...] = ()


def theorem_equivalence_harness(
    spectrum: SpectrumFamily,
    beta: float,
    vector_catalog: Optional[Sequence[CoefficientVector]] = None,
    budget: SeriesBudget = DEFAULT_BUDGET,
    t_checks: tuple[float, ...] = (0.0, 1.0),
) -> HarnessReport:
    """Cross-check the region verdict against per-vector classifications.

    Holds must come with every admissible vector certified Beurling at the
    checked times; Violated must come with a constructed admissible vector
    certified not Roumieu.  Any certified contradiction, including a
    violation of the Roumieu-implies-Beurling jump across the run, raises
    HarnessError with the full report attached.
    """
    beta = _check_beta(beta)
    region = region_condition(spectrum, beta, budget=budget)
    if vector_catalog is None:
        from .catalog import builtin_vectors

        vector_catalog = builtin_vectors(spectrum)

    rows: list[HarnessRow] = []
    problems: list[str] = []
    any_certified_not_beurling = False
    all_roumieu_true = True
    saw_roumieu = False

    for v in vector_catalog:
        cert = check_admissible(v, budget=budget)
        if not cert.admissible:
            rows.append(HarnessRow(v.label, False, cert.unknown))
            continue
        h = SolutionHandle(v, cert)
        verd: list[tuple[float, str, Optional[bool]]] = []
        for t in t_checks:
            r, b = _classify_both(solve(h, t), beta, budget)
            verd.append((t, GevreyFlavor.ROUMIEU.value, r.member))
            verd.append((t, GevreyFlavor.BEURLING.value, b.member))
            saw_roumieu = True
            if r.member is not True:
                all_roumieu_true = False
            if b.member is False:
                any_certified_not_beurling = True
            if region.holds and b.member is False:
                problems.append(
                    f"region Holds but vector {v.label!r} at t={t:g} is certified not Beurling"
                )
            if b.member is True and r.member is False:
                problems.append(
                    f"vector {v.label!r} at t={t:g}: Beurling certified while Roumieu refuted"
                )
        rows.append(HarnessRow(v.label, True, False, tuple(verd)))

    counterexample = None
    if region.violated:
        from .counterexamples import build_counterexample, plan_for_spectrum

        plan = plan_for_spectrum(spectrum, beta)
        counterexample = build_counterexample(plan, budget)
        if not counterexample.admissibility.admissible:
            problems.append("constructed counterexample is not admissible")
        if counterexample.non_membership.member is not False:
            problems.append("constructed counterexample was not certified non-Roumieu")
        else:
            all_roumieu_true = False

    if region.violated and counterexample is None:
        problems.append("violated region without a counterexample construction")
    if saw_roumieu and all_roumieu_true and any_certified_not_beurling:
        problems.append(
            "smoothness jump violated: every vector Roumieu-certified while some "
            "Beurling membership was refuted"
        )

    report = HarnessReport(
        spectrum=getattr(spectrum, "label", "spectrum"),
        beta=beta,
        region=region,
        rows=tuple(rows),
        counterexample=counterexample,
        notes=tuple(problems),
    )
    if problems:
        raise HarnessError("; ".join(problems), report)
    return report
