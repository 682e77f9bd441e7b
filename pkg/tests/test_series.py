import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from gevlab.asymptotics import AsymForm, TailBounds
from gevlab.logdomain import NEG_INF
from gevlab.series import (
    DEFAULT_BUDGET,
    SeriesBudget,
    SeriesStatus,
    certify_log_series,
)


def geometric_terms(ks):
    return -ks.astype(float) * math.log(4.0)


def test_exact_finite_geometric_sum():
    # sum_{k=1}^{20} 4^-k against the closed form
    cert = certify_log_series(geometric_terms, count=20)
    oracle = (1.0 - 4.0**-20) / 3.0
    assert cert.status is SeriesStatus.CONVERGES
    assert cert.route == "exact-finite"
    assert abs(math.exp(cert.log_value) - oracle) < 1e-12
    assert cert.log_tail_bound == NEG_INF


@given(st.floats(min_value=0.05, max_value=5.0))
def test_geometric_rates_certify_to_the_closed_form(rate):
    def term(ks):
        return -rate * ks.astype(float)

    cert = certify_log_series(term, bounds=TailBounds.exact(AsymForm.power(1.0, -rate)))
    assert cert.status is SeriesStatus.CONVERGES
    closed = math.log(math.exp(-rate) / (1.0 - math.exp(-rate)))
    assert abs(cert.log_value - closed) < 1e-9 + abs(closed) * 1e-9


def test_zero_count_is_the_empty_sum():
    cert = certify_log_series(geometric_terms, count=0)
    assert cert.status is SeriesStatus.CONVERGES and cert.log_value == NEG_INF


def test_symbolic_tail_route_value_matches_brute_force():
    def term(ks):
        return -ks.astype(float)

    cert = certify_log_series(term, bounds=TailBounds.exact(AsymForm.power(1.0, -1.0)))
    brute = math.log(math.exp(-1.0) / (1.0 - math.exp(-1.0)))
    assert cert.status is SeriesStatus.CONVERGES
    assert cert.route == "symbolic-tail"
    assert abs(cert.log_value - brute) < 1e-12


def test_symbolic_divergence_beats_misleading_prefix():
    # e^{s sqrt(k)} k^-4 decays over any affordable prefix but diverges:
    # only the declared-exponent route can see it
    s = 2.0**-10

    def term(ks):
        kf = ks.astype(float)
        return s * np.sqrt(kf) - 4.0 * np.log(kf)

    bounds = TailBounds.exact(AsymForm.power(0.5, s) + AsymForm.log_k(-4.0))
    cert = certify_log_series(term, bounds=bounds, budget=SeriesBudget(k_max=1 << 16))
    assert cert.status is SeriesStatus.DIVERGES
    assert cert.route == "symbolic-divergence"
    assert cert.witness["kind"] == "sample-prefix"


def test_block_ratio_route_certifies_geometric_decay():
    def term(ks):
        return -0.1 * ks.astype(float)

    cert = certify_log_series(term)  # no declared bounds
    assert cert.status is SeriesStatus.CONVERGES
    assert cert.route == "block-ratio"
    brute = math.log(math.exp(-0.1) / (1.0 - math.exp(-0.1)))
    assert abs(cert.log_value - brute) < 1e-10


def test_block_ratio_on_polynomial_decay_needs_a_matching_tolerance():
    # block sums of k^-2 halve per doubling: the geometric tail estimate
    # reaches 1e-4 within budget but not 1e-10
    def term(ks):
        return -2.0 * np.log(ks.astype(float))

    loose = certify_log_series(term, budget=SeriesBudget(rel_tol=1e-4))
    assert loose.status is SeriesStatus.CONVERGES and loose.route == "block-ratio"
    zeta2 = math.pi**2 / 6.0
    assert math.exp(loose.log_value) <= zeta2 <= math.exp(loose.log_value) + math.exp(
        loose.log_tail_bound
    )
    strict = certify_log_series(term, budget=SeriesBudget(k_max=1 << 16))
    assert strict.status is SeriesStatus.INCONCLUSIVE


def test_sum_cap_fires_without_a_declared_envelope():
    # decaying-but-huge terms: the cap is the protocol's verdict when no
    # envelope is declared (the symbolic route overrides it when one is)
    def term(ks):
        return 1000.0 - 0.5 * ks.astype(float)

    cert = certify_log_series(term)
    assert cert.status is SeriesStatus.DIVERGES
    assert cert.route == "sum-cap"
    assert cert.witness["log_partial"] > 700.0


def test_term_growth_certifies_flat_terms():
    def term(ks):
        return np.full(ks.shape, -100.0)

    cert = certify_log_series(term)
    assert cert.status is SeriesStatus.DIVERGES
    assert cert.route == "term-growth"


def test_harmonic_series_is_inconclusive_without_exponents():
    def term(ks):
        return -np.log(ks.astype(float))

    cert = certify_log_series(term, budget=SeriesBudget(k_max=1 << 15))
    assert cert.status is SeriesStatus.INCONCLUSIVE
    assert cert.route == "budget-exhausted"


def test_harmonic_series_diverges_with_exponents():
    def term(ks):
        return -np.log(ks.astype(float))

    cert = certify_log_series(term, bounds=TailBounds.exact(AsymForm.log_k(-1.0)))
    assert cert.status is SeriesStatus.DIVERGES
    assert cert.route == "symbolic-divergence"


def test_decision_mode_keeps_verdict_but_trims_work():
    def term(ks):
        return -0.001 * ks.astype(float)

    full = certify_log_series(term, bounds=TailBounds.exact(AsymForm.power(1.0, -0.001)))
    fast = certify_log_series(
        term, bounds=TailBounds.exact(AsymForm.power(1.0, -0.001)), resolve_value=False
    )
    assert full.status is fast.status is SeriesStatus.CONVERGES
    assert fast.terms_used <= DEFAULT_BUDGET.decision_k_cap


def test_zero_tail_certifies_via_block_ratio():
    def term(ks):
        out = np.full(ks.shape, NEG_INF)
        out[ks <= 10] = -1.0
        return out

    cert = certify_log_series(term)
    assert cert.status is SeriesStatus.CONVERGES
    assert abs(math.exp(cert.log_value) - 10 * math.exp(-1.0)) < 1e-12


def test_huge_but_finite_sums_stay_convergent_on_symbolic_route():
    # partial sums pass any cap long before the terms turn around; the
    # declared envelope keeps the verdict convergent
    def term(ks):
        kf = ks.astype(float)
        return 2000.0 * kf - kf**2

    bounds = TailBounds.exact(AsymForm.power(2.0, -1.0) + AsymForm.power(1.0, 2000.0))
    cert = certify_log_series(term, bounds=bounds)
    assert cert.status is SeriesStatus.CONVERGES
    assert cert.log_value > 700.0  # far beyond the divergence cap
    oracle_peak = 2000.0 * 1000.0 - 1000.0**2
    assert cert.log_value >= oracle_peak
