"""Mechanical reproduction of the refutation constructions.

When the spectral region test fails, an admissible initial vector exists
whose solution is not of Roumieu type at the given order.  The construction
selects a violating subsequence lam_{j(1)}, lam_{j(2)}, ... with
|lam_{j(n)}| >= n and Re lam_{j(n)} below n^-2 |Im lam_{j(n)}|^{1/beta},
surrounds each point by a disk of radius eps_n < 1/n with pairwise-disjoint
disks, and places the coefficients of the proof on the selected basis
directions.  Two regimes are handled: real parts bounded above (coefficients
n^-2) and unbounded above (coefficients e^{-n Re lam_{j(n)}} along a
subsequence with Re >= n).

In the coordinate model every selected eigenvalue owns its basis direction,
so the distance constants collapse to d_n = 1 and the dual probe pairs to
exactly n^-2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .asymptotics import AsymForm, TailBounds
from .borel_calculus import GevreyExpSymbol
from .errors import CounterexampleError, PlanError
from .evolution import AdmissibilityCertificate, SolutionHandle, check_admissible
from .gevrey_classifier import GevreyVerdict, GevreyFlavor, vector_class
from .logdomain import NEG_INF
from .series import (
    DEFAULT_BUDGET,
    ConvergenceCertificate,
    SeriesBudget,
    SeriesStatus,
)
from .spectral_core import (
    CoefficientVector,
    ExplicitSpectrum,
    PowerLawSpectrum,
    SpectrumFamily,
    conjugate_exponent,
    predicate_all,
    total_variation,
)

_VERIFY_PREFIX = 10_000
_S_PROBES = (2.0**-10, 1.0, 2.0**10)


class PlanCase(Enum):
    BOUNDED_REAL_PARTS = "bounded"
    UNBOUNDED_REAL_PARTS = "unbounded"


# ---------------------------------------------------------------------------
# Selection of a violating subsequence
# ---------------------------------------------------------------------------


@dataclass
class _Threshold:
    exponent: float
    coeff: float
    strict: bool  # the underlying predicate is a strict inequality


class Selection:
    """Greedy choice of indices j(1) < j(2) < ... from a power-law family.

    Candidate indices come from closed-form thresholds (monotone in n) and
    every selected index is verified numerically against the predicates:
    |lam_j| >= n, strictly increasing modulus, the violation inequality
    Re < n^-2 |Im|^{1/beta} (non-strict at n = 1, where the canonical rules
    sit exactly on the boundary), and optionally Re >= n.
    """

    def __init__(self, spectrum: PowerLawSpectrum, beta: float, require_re_ge_n: bool):
        self.spectrum = spectrum
        self.beta = beta
        self.require_re_ge_n = require_re_ge_n
        self._js: list[int] = []
        self._inv: dict[int, int] = {}
        a, pre, b, pim = spectrum.a_re, spectrum.p_re, spectrum.a_im, spectrum.p_im
        self.thresholds: list[_Threshold] = []
        if a > 0:
            # positive real parts need |Im| to outrun them: a j^pre < n^-2 |Im_j|^{1/beta}
            if b == 0 or pim == 0:
                raise PlanError(
                    "positive real part with bounded imaginary part: "
                    "the region condition holds, no violating selection exists"
                )
            delta = pim / beta - pre
            if delta <= 0:
                raise PlanError(
                    f"real-part exponent {pre:g} >= |Im| exponent {pim:g}/beta: "
                    "the region condition holds beyond a bounded set"
                )
            c0 = a / abs(b) ** (1.0 / beta)
            self.thresholds.append(_Threshold(2.0 / delta, c0 ** (1.0 / delta), True))
        if require_re_ge_n:
            if not (a > 0 and pre > 0):
                raise PlanError("Re >= n selection needs an increasing real part")
            self.thresholds.append(_Threshold(1.0 / pre, (1.0 / a) ** (1.0 / pre), False))
        p_hi, a_hi, _ = spectrum._abs_leading()
        if p_hi <= 0:
            raise PlanError("modulus of the family does not grow")
        self.thresholds.append(_Threshold(1.0 / p_hi, (1.0 / a_hi) ** (1.0 / p_hi), False))
        self.gamma = max(1.0, max(t.exponent for t in self.thresholds))
        self.env_coeff = sum(t.coeff for t in self.thresholds) + 1.0

    # -- predicates ---------------------------------------------------------

    def _ok(self, j: int, n: int, prev_abs: float) -> bool:
        lam = self.spectrum.eigenvalue(j)
        mod = abs(lam)
        if mod < n or mod <= prev_abs:
            return False
        rhs = abs(lam.imag) ** (1.0 / self.beta) / n**2
        if n >= 2:
            if not lam.real < rhs:
                return False
        else:
            if not lam.real <= rhs:
                return False
        if self.require_re_ge_n and lam.real < n:
            return False
        return True

    def extend(self, n_target: int) -> None:
        while len(self._js) < n_target:
            n = len(self._js) + 1
            prev = self._js[-1] if self._js else 0
            prev_abs = abs(self.spectrum.eigenvalue(prev)) if prev else 0.0
            cand = prev + 1
            for t in self.thresholds:
                cand = max(cand, math.ceil(t.coeff * n**t.exponent))
            tries = 0
            while not self._ok(cand, n, prev_abs):
                cand += 1
                tries += 1
                if tries > 1_000_000:
                    raise PlanError(f"selection stalled at order n={n}")
            self._js.append(cand)
            self._inv[cand] = n

    def indices(self, ns: np.ndarray) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size:
            self.extend(int(ns.max()))
        arr = np.asarray(self._js, dtype=np.int64)
        return arr[ns - 1]

    def lam(self, ns: np.ndarray) -> np.ndarray:
        return self.spectrum.eigenvalues(self.indices(ns))

    def order_of(self, j: int) -> Optional[int]:
        return self._inv.get(int(j))

    def identity_certified(self, prefix: int = 512) -> bool:
        """True when j(n) = n provably for every n, not just the prefix."""
        self.extend(prefix)
        if self._js[:prefix] != list(range(1, prefix + 1)):
            return False
        for t in self.thresholds:
            if t.exponent > 1.0:
                return False
            if t.exponent == 1.0:
                if t.strict and t.coeff >= 1.0:
                    return False
                if not t.strict and t.coeff > 1.0:
                    return False
        return True


@dataclass(frozen=True)
class SupportView:
    """Series index space of a vector supported on a selected subsequence.

    The tail envelopes are derived from the plan invariants (|lam_{j(n)}|
    >= n, Re >= n when required, j(n) <= env * n^gamma), and the *_form
    hooks carry the proof's coupled estimates that componentwise envelopes
    cannot express.
    """

    selection: Selection
    coeff_fn: Callable = field(compare=False)
    coeff_bounds: Optional[TailBounds] = None
    re_bounds: Optional[TailBounds] = None
    im_bounds: Optional[TailBounds] = None
    log_abs_bounds: Optional[TailBounds] = None
    abs_pow_fn: Optional[Callable] = field(default=None, compare=False)
    evolution_upper_form: Optional[Callable] = field(default=None, compare=False)
    gevrey_lower_form: Optional[Callable] = field(default=None, compare=False)
    tv_lower_form: Optional[Callable] = field(default=None, compare=False)

    @property
    def count(self) -> Optional[int]:
        return None

    def lam(self, ns):
        return self.selection.lam(ns)

    def coeff_log(self, ns):
        return self.coeff_fn(np.asarray(ns, dtype=np.int64))

    def abs_pow_bounds(self, q: float) -> Optional[TailBounds]:
        return self.abs_pow_fn(q) if self.abs_pow_fn is not None else None


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ViolatingSpectrumPlan:
    """A violating subsequence with disk radii, ready for vector assembly."""

    beta: float
    case: PlanCase
    spectrum: SpectrumFamily
    selection: Selection
    omega: Optional[float]  # bounded case: sup of the selected real parts
    verified_prefix: int
    detail: str = ""

    def selected_lams(self, ns) -> np.ndarray:
        return self.selection.lam(np.asarray(ns, dtype=np.int64))

    def epsilons(self, n_top: int) -> np.ndarray:
        """Disk radii eps_n = min(1/(2n), half the gap to the neighbors)."""
        lams = self.selected_lams(np.arange(1, n_top + 2, dtype=np.int64))
        gaps = np.abs(np.diff(lams))
        eps = np.empty(n_top)
        for i in range(n_top):
            gap = gaps[i] if i == 0 else min(gaps[i - 1], gaps[i])
            eps[i] = min(1.0 / (2.0 * (i + 1)), gap / 2.0)
        return eps


def _verify_plan(plan: ViolatingSpectrumPlan, prefix: int = _VERIFY_PREFIX) -> None:
    ns = np.arange(1, prefix + 1, dtype=np.int64)
    lams = plan.selected_lams(ns)
    mods = np.abs(lams)
    if not np.all(mods >= ns):
        raise PlanError("|lam_{j(n)}| >= n fails on the verified prefix")
    if not np.all(np.diff(mods) > 0):
        raise PlanError("selected moduli are not strictly increasing")
    rhs = np.abs(lams.imag) ** (1.0 / plan.beta) / ns.astype(float) ** 2
    strict = lams.real < rhs
    if not (np.all(strict[1:]) and lams[0].real <= rhs[0]):
        raise PlanError("violation inequality fails on the verified prefix")
    if plan.case is PlanCase.UNBOUNDED_REAL_PARTS and not np.all(lams.real >= ns):
        raise PlanError("Re lam_{j(n)} >= n fails on the verified prefix")
    if plan.case is PlanCase.BOUNDED_REAL_PARTS:
        if plan.omega is None or not np.all(lams.real <= plan.omega + 1e-12):
            raise PlanError("real parts exceed the declared bound omega")
    n_eps = min(prefix, 512)
    eps = plan.epsilons(n_eps)
    if not np.all((eps > 0) & (eps < 1.0 / np.arange(1, n_eps + 1))):
        raise PlanError("disk radii leave (0, 1/n) on the verified prefix")
    gaps = np.abs(np.diff(plan.selected_lams(np.arange(1, n_eps + 1, dtype=np.int64))))
    if not np.all(gaps >= eps[:-1] + eps[1:]):
        raise PlanError("disks are not pairwise disjoint on the verified prefix")


def build_violating_spectrum(beta: float, case: PlanCase) -> ViolatingSpectrumPlan:
    """Canonical plan: lam_n = i n^{2 beta} (bounded real parts) or
    lam_n = n + i n^{3 beta + 1} (unbounded), selected identically."""
    if not (beta >= 1 and math.isfinite(beta)):
        raise PlanError("plans are constructed for beta >= 1")
    if case is PlanCase.BOUNDED_REAL_PARTS:
        spectrum = PowerLawSpectrum(0.0, 0.0, 1.0, 2.0 * beta, label=f"i*k^{2*beta:g}")
    else:
        spectrum = PowerLawSpectrum(
            1.0, 1.0, 1.0, 3.0 * beta + 1.0, label=f"k+i*k^{3*beta+1:g}"
        )
    return plan_for_spectrum(spectrum, beta, case)


def plan_for_spectrum(
    spectrum: SpectrumFamily, beta: float, case: Optional[PlanCase] = None
) -> ViolatingSpectrumPlan:
    """Select a violating subsequence inside the given power-law family."""
    if isinstance(spectrum, ExplicitSpectrum):
        raise PlanError("a finite spectrum never violates the region condition")
    if not isinstance(spectrum, PowerLawSpectrum):
        raise PlanError("violating selections are implemented for power-law families")
    if not (beta >= 1 and math.isfinite(beta)):
        raise PlanError("plans are constructed for beta >= 1")
    re_unbounded = spectrum.a_re > 0 and spectrum.p_re > 0
    inferred = PlanCase.UNBOUNDED_REAL_PARTS if re_unbounded else PlanCase.BOUNDED_REAL_PARTS
    if case is None:
        case = inferred
    elif case is not inferred:
        raise PlanError(f"this family supports only the {inferred.value} construction")
    selection = Selection(spectrum, beta, require_re_ge_n=re_unbounded)
    omega = None
    if case is PlanCase.BOUNDED_REAL_PARTS:
        # Re lam_k = a k^p with a <= 0 (sup 0), or the constant a itself
        omega = max(spectrum.a_re, 0.0)
    plan = ViolatingSpectrumPlan(
        beta=beta,
        case=case,
        spectrum=spectrum,
        selection=selection,
        omega=omega,
        verified_prefix=_VERIFY_PREFIX,
        detail=f"{case.value} construction on {spectrum.label}",
    )
    _verify_plan(plan)
    return plan


# ---------------------------------------------------------------------------
# Vector assembly
# ---------------------------------------------------------------------------


def _dense_inverse_fn(selection: Selection, value_log: Callable[[np.ndarray], np.ndarray]):
    """Dense j-indexed coefficients of a subsequence vector (prefix only)."""

    def fn(js: np.ndarray):
        selection.extend(max(4096, int(np.max(js)) if js.size else 1))
        mags = np.full(js.shape, NEG_INF)
        orders = np.asarray([selection.order_of(int(j)) or 0 for j in js])
        hit = orders > 0
        if np.any(hit):
            mags[hit] = value_log(orders[hit].astype(np.int64))
        return mags, np.zeros(js.shape)

    return fn


def _bounded_vectors(plan: ViolatingSpectrumPlan, p: float):
    sel = plan.selection
    q = conjugate_exponent(p)
    if sel.identity_certified():
        f = CoefficientVector.polynomial_decay(plan.spectrum, 2.0, p=p, label="ce-f(k^-2)")
        h_star = CoefficientVector.polynomial_decay(plan.spectrum, 2.0, p=q, label="h*(k^-2)")
        return f, None, h_star

    def coeff_fn(ns):
        nf = ns.astype(float)
        return -2.0 * np.log(nf), np.zeros(ns.shape)

    coeff_bounds = TailBounds.exact(AsymForm.log_k(-2.0))
    common = _view_kwargs(plan)

    def gevrey_lower(s: float, beta_probe: float):
        # |lam_{j(n)}| >= n, so the weight alone beats any polynomial factor
        return AsymForm.power(1.0 / beta_probe, s) + AsymForm.log_k(-2.0), 1

    def tv_lower(weight):
        if not isinstance(weight, GevreyExpSymbol):
            return None
        return (
            AsymForm.power(1.0 / weight.beta, weight.s) + AsymForm.log_k(-4.0),
            1,
        )

    f_view = SupportView(
        selection=sel,
        coeff_fn=coeff_fn,
        coeff_bounds=coeff_bounds,
        gevrey_lower_form=gevrey_lower,
        tv_lower_form=tv_lower,
        **common,
    )
    hs_view = SupportView(selection=sel, coeff_fn=coeff_fn, coeff_bounds=coeff_bounds, **common)
    f = CoefficientVector.custom(
        plan.spectrum,
        _dense_inverse_fn(sel, lambda ns: -2.0 * np.log(ns.astype(float))),
        bounds=None,
        p=p,
        label="ce-f(n^-2 on selection)",
        series_view=f_view,
    )
    h_star = CoefficientVector.custom(
        plan.spectrum,
        _dense_inverse_fn(sel, lambda ns: -2.0 * np.log(ns.astype(float))),
        bounds=None,
        p=q,
        label="h*(n^-2 on selection)",
        series_view=hs_view,
    )
    return f, None, h_star


def _view_kwargs(plan: ViolatingSpectrumPlan) -> dict:
    """Envelopes shared by every subsequence vector of this plan."""
    sel = plan.selection
    spec = plan.spectrum
    p_hi, a_hi, _ = spec._abs_leading()
    env = sel.env_coeff
    gamma = sel.gamma
    abs_up_coeff = (abs(spec.a_re) + abs(spec.a_im)) * env**p_hi
    if plan.case is PlanCase.BOUNDED_REAL_PARTS:
        re_b = TailBounds(None, AsymForm.constant(plan.omega), 1)
    else:
        re_b = TailBounds(
            AsymForm.power(1.0, 1.0),  # Re >= n by selection
            AsymForm.power(gamma * spec.p_re, spec.a_re * env**spec.p_re),
            1,
        )

    def abs_pow(qq: float) -> TailBounds:
        return TailBounds(
            AsymForm.power(qq, 1.0),  # |lam_{j(n)}| >= n
            AsymForm.power(qq * gamma * p_hi, abs_up_coeff**qq),
            1,
        )

    log_abs = TailBounds(
        AsymForm.log_k(1.0),
        AsymForm.log_k(gamma * p_hi, const=math.log(abs_up_coeff)),
        1,
    )
    return {"re_bounds": re_b, "abs_pow_fn": abs_pow, "log_abs_bounds": log_abs}


def _unbounded_vectors(plan: ViolatingSpectrumPlan, p: float):
    sel = plan.selection
    spec = plan.spectrum
    q = conjugate_exponent(p)
    if sel.identity_certified() and spec.p_re == 1.0 and spec.a_re == 1.0:
        # Re lam_k = k exactly: the proof's coefficients are e^{-k^2}
        f = CoefficientVector.power_decay(spec, 1.0, 2.0, p=p, label="ce-f(e^-k^2)")
        h = CoefficientVector.power_decay(spec, 0.5, 2.0, p=p, label="ce-h(e^-k^2/2)")
        h_star = CoefficientVector.polynomial_decay(spec, 2.0, p=q, label="h*(k^-2)")
        return f, h, h_star

    def coeff_fn_scale(scale: float):
        def fn(ns):
            nf = ns.astype(float)
            re = sel.lam(ns).real
            return -scale * nf * re, np.zeros(ns.shape)

        return fn

    common = _view_kwargs(plan)
    re_up = common["re_bounds"].upper

    def coeff_bounds_scale(scale: float) -> TailBounds:
        return TailBounds(
            _neg_n_times(re_up, scale),
            AsymForm.power(2.0, -scale),  # -scale * n * Re <= -scale n^2
            1,
        )

    def evolution_upper(t: float):
        # (t - n) Re_{j(n)} <= -(n - t) n  for n > t
        return AsymForm.power(2.0, -1.0) + AsymForm.power(1.0, t), int(math.ceil(t)) + 1

    def gevrey_lower(s: float, beta_probe: float):
        if beta_probe != plan.beta:
            return None
        # |lam|^{1/beta} >= n^2 Re and Re >= n give s n^3 - n^2 beyond n >= 1/s
        k_min = max(2, int(math.ceil(1.0 / s)) + 1)
        return AsymForm.power(3.0, s) + AsymForm.power(2.0, -1.0), k_min

    def tv_lower(weight):
        if not isinstance(weight, GevreyExpSymbol) or weight.beta != plan.beta:
            return None
        s = weight.s
        k_min = max(2, int(math.ceil(1.0 / s)) + 1)
        return (
            AsymForm.power(3.0, s) + AsymForm.power(2.0, -1.0) + AsymForm.log_k(-2.0),
            k_min,
        )

    f_view = SupportView(
        selection=sel,
        coeff_fn=coeff_fn_scale(1.0),
        coeff_bounds=coeff_bounds_scale(1.0),
        evolution_upper_form=evolution_upper,
        gevrey_lower_form=gevrey_lower,
        tv_lower_form=tv_lower,
        **common,
    )
    h_view = SupportView(
        selection=sel,
        coeff_fn=coeff_fn_scale(0.5),
        coeff_bounds=coeff_bounds_scale(0.5),
        evolution_upper_form=lambda t: (
            AsymForm.power(2.0, -0.5) + AsymForm.power(1.0, t),
            int(math.ceil(2.0 * t)) + 1,
        ),
        **common,
    )

    def hs_fn(ns):
        nf = ns.astype(float)
        return -2.0 * np.log(nf), np.zeros(ns.shape)

    hs_view = SupportView(
        selection=sel,
        coeff_fn=hs_fn,
        coeff_bounds=TailBounds.exact(AsymForm.log_k(-2.0)),
        **common,
    )
    f = CoefficientVector.custom(
        spec,
        _dense_inverse_fn(sel, lambda ns: -ns.astype(float) * sel.lam(ns).real),
        p=p,
        label="ce-f(e^{-n Re} on selection)",
        series_view=f_view,
    )
    h = CoefficientVector.custom(
        spec,
        _dense_inverse_fn(sel, lambda ns: -0.5 * ns.astype(float) * sel.lam(ns).real),
        p=p,
        label="ce-h(e^{-n Re/2} on selection)",
        series_view=h_view,
    )
    h_star = CoefficientVector.custom(
        spec,
        _dense_inverse_fn(sel, lambda ns: -2.0 * np.log(ns.astype(float))),
        p=q,
        label="h*(n^-2 on selection)",
        series_view=hs_view,
    )
    return f, h, h_star


def _neg_n_times(re_upper: AsymForm, scale: float) -> AsymForm:
    """Lower envelope of -scale * n * Re_{j(n)} from the Re upper envelope."""
    from .asymptotics import AsymTerm

    bumped = tuple(
        AsymTerm(t.power + 1.0, t.log_power, -scale * t.coeff) for t in re_upper.terms
    )
    out = AsymForm.build(bumped, 0.0)
    if re_upper.const:
        out = out + AsymForm.power(1.0, -scale * re_upper.const)
    return out


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleArtifacts:
    plan: ViolatingSpectrumPlan
    spectrum: SpectrumFamily
    f: CoefficientVector
    h: Optional[CoefficientVector]
    h_star: CoefficientVector
    admissibility: AdmissibilityCertificate
    non_membership: GevreyVerdict
    probe_certificates: dict
    l_bound: Optional[float] = None
    detail: str = ""


def build_counterexample(
    plan: ViolatingSpectrumPlan,
    budget: SeriesBudget = DEFAULT_BUDGET,
    p: float = 2.0,
    s_probes: tuple[float, ...] = _S_PROBES,
) -> CounterexampleArtifacts:
    """Assemble and verify the proof vectors for a violating plan.

    The initial vector must pass the admissibility check and must be
    certified not of Roumieu type at the plan's order; the dual-probe series
    must be certified divergent at every probed scale.  Any contradiction is
    a hard failure.
    """
    if plan.case is PlanCase.BOUNDED_REAL_PARTS:
        f, h, h_star = _bounded_vectors(plan, p)
    else:
        f, h, h_star = _unbounded_vectors(plan, p)

    admissibility = check_admissible(f, budget=budget)
    if not admissibility.admissible:
        raise CounterexampleError(
            f"constructed vector failed admissibility: {admissibility.detail}"
        )

    non_membership = vector_class(f, plan.beta, GevreyFlavor.ROUMIEU, budget)
    if non_membership.member is not False:
        raise CounterexampleError(
            "constructed vector was not certified outside the Roumieu class "
            f"(member={non_membership.member!r})"
        )

    probe_certs: dict[float, ConvergenceCertificate] = {}
    for s in s_probes:
        cert = total_variation(
            f, h_star, predicate_all(), weight=GevreyExpSymbol(s, plan.beta), budget=budget
        )
        probe_certs[s] = cert
        if cert.status is not SeriesStatus.DIVERGES:
            raise CounterexampleError(
                f"dual-probe series failed to diverge at s={s:g}: {cert.to_dict()!r}"
            )

    l_bound = None
    if plan.case is PlanCase.UNBOUNDED_REAL_PARTS and h is not None:
        # e^{-(n/2 - t) Re_{j(n)}} stays bounded on the prefix for each probe t
        ns = np.arange(1, 513, dtype=np.int64)
        re = plan.selected_lams(ns).real
        l_bound = 0.0
        for t in (0.0, 1.0, 50.0, 100.0):
            vals = -(ns / 2.0 - t) * re
            l_bound = max(l_bound, float(np.exp(np.clip(np.max(vals), None, 700.0))))
        if not math.isfinite(l_bound):
            raise CounterexampleError("auxiliary bound L is not finite on the prefix")

    return CounterexampleArtifacts(
        plan=plan,
        spectrum=plan.spectrum,
        f=f,
        h=h,
        h_star=h_star,
        admissibility=admissibility,
        non_membership=non_membership,
        probe_certificates=probe_certs,
        l_bound=l_bound,
        detail=plan.detail,
    )


# ---------------------------------------------------------------------------
# Analyticity probe at t = 0
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticAtZero:
    delta: float


@dataclass(frozen=True)
class NotAnalytic:
    reason: str


@dataclass(frozen=True)
class AnalyticUnknown:
    reason: str


_DEFAULT_RADII = tuple(2.0**j for j in range(-12, 5))


def analytic_at_zero_probe(
    h: SolutionHandle,
    radius_grid: tuple[float, ...] = _DEFAULT_RADII,
    n_max: int = 40,
    budget: SeriesBudget = DEFAULT_BUDGET,
):
    """Can y be represented by its Taylor series on [0, delta] for a grid delta?

    Tests whether sup_n ( log||A^n f|| - log n! + n log delta ) stays bounded
    for some grid radius; a certified failure of every radius, or a power
    norm leaving l^p at finite order, refutes analyticity at 0.
    """
    from .borel_calculus import power_norms

    f = h.f
    count = f.effective_count()
    if count is not None:
        ks = np.arange(1, count + 1, dtype=np.int64)
        mags, _ = f.log_coeffs(ks)
        alive = mags > NEG_INF
        if not np.any(alive):
            return AnalyticAtZero(math.inf)
        r = float(np.max(np.abs(f.spectrum.eigenvalues(ks[alive]))))
        return AnalyticAtZero(1.0 / r if r > 0 else math.inf)

    norms = power_norms(f, n_max, budget)
    if norms.cutoff is not None:
        cert = norms.cutoff_certificate
        if cert is not None and cert.status is SeriesStatus.DIVERGES:
            return NotAnalytic(
                f"||A^n f|| leaves l^p at n = {norms.cutoff}: the solution is not "
                f"even C^{norms.cutoff} at 0"
            )
        return AnalyticUnknown(f"power norms undecided at n = {norms.cutoff}")

    ns = np.arange(0, norms.n_max + 1, dtype=float)
    logs = np.asarray(norms.log_norms)
    log_fact = np.asarray([math.lgamma(n + 1.0) for n in ns])
    half = len(ns) // 2
    best_delta = None
    all_diverge = True
    for delta in sorted(radius_grid, reverse=True):
        u = logs - log_fact + ns * math.log(delta)
        head, tail_part = u[:half], u[half:]
        slope = float(np.polyfit(ns[half:], tail_part, 1)[0])
        if float(np.max(tail_part)) <= float(np.max(head)) + 0.5 and slope <= 0.01:
            best_delta = delta if best_delta is None else max(best_delta, delta)
            all_diverge = False
        elif not (slope > 0.05 and float(np.max(tail_part)) > float(np.max(head)) + 2.0):
            all_diverge = False
    if best_delta is not None:
        return AnalyticAtZero(best_delta)
    if all_diverge:
        return NotAnalytic("Taylor terms grow for every probed radius")
    return AnalyticUnknown("trend analysis is ambiguous on the probed radii")
