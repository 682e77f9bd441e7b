import math

import numpy as np
import pytest

import gevlab as gl

R, B = gl.GevreyFlavor.ROUMIEU, gl.GevreyFlavor.BEURLING


# -- vector classes -------------------------------------------------------------


def test_finite_support_is_entire_for_every_order():
    spec = gl.builtin_spectra()["explicit16"]
    f = gl.CoefficientVector.explicit(spec, values=[1.0] * 16)
    for beta in (1.0, 1.5, 2.0):
        r = gl.vector_class(f, beta, R)
        b = gl.vector_class(f, beta, B)
        assert r.member is True and b.member is True
        assert b.s_star_low == math.inf


def test_critical_scale_bracket_matches_closed_form():
    # lam_k = -k, f_k = e^{-ck}: membership iff s < c, so s* = c exactly
    spec = gl.PowerLawSpectrum(-1, 1, 0, 0)
    for c in (0.5, 1.0, 2.0):
        f = gl.CoefficientVector.power_decay(spec, c, 1.0)
        r = gl.vector_class(f, 1.0, R)
        assert r.member is True
        assert r.s_star_low <= c <= r.s_star_high
        assert r.s_star_high - r.s_star_low < 1e-6
        assert abs(r.critical_exponent - c) < 1e-6
        b = gl.vector_class(f, 1.0, B)
        assert b.member is False


def test_mixed_growth_boundary_keeps_a_sound_bracket():
    # lam = k + i sqrt(k): |lam| = k + 1/2 + O(1/k), so s* = 1 exactly, but
    # the componentwise envelopes straddle near 1 and some probes come back
    # inconclusive; the certified bracket must still contain 1
    spec = gl.PowerLawSpectrum(1, 1, 1, 0.5)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 1.0)
    r = gl.vector_class(f, 1.0, gl.GevreyFlavor.ROUMIEU)
    assert r.member is True
    assert r.s_star_low <= 1.0 <= r.s_star_high
    assert r.s_star_high - r.s_star_low < 1e-3
    statuses = {status for _, status in r.probes}
    assert "converges" in statuses and "diverges" in statuses


def test_fast_spectrum_refutes_roumieu():
    spec = gl.PowerLawSpectrum(0, 0, 1, 2)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    r = gl.vector_class(f, 1.0, R)
    assert r.member is False
    assert r.s_star_high <= 2.0**-20
    assert r.critical_exponent == 0.0


def test_beta_zero_rejected_by_exponential_classifier():
    spec = gl.builtin_spectra()["explicit16"]
    f = gl.CoefficientVector.explicit(spec, values=[1.0] * 16)
    with pytest.raises(ValueError):
        gl.vector_class(f, 0.0, R)


def test_beta0_support_classification():
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    supported = gl.CoefficientVector.explicit(spec, values=[1.0] * 10)
    v = gl.vector_class_beta0(supported)
    assert v.member is True and v.support_bound == 10.0

    decaying = gl.CoefficientVector.power_decay(spec, 1.0, 1.0)
    assert gl.vector_class_beta0(decaying).member is False

    zero = gl.CoefficientVector.explicit(spec, values=[0.0, 0.0])
    vz = gl.vector_class_beta0(zero)
    assert vz.member is True and vz.support_bound == 0.0


def test_beta0_unknown_for_custom_family_without_bounds():
    spec = gl.CustomSpectrum(lambda k: complex(0, k))
    f = gl.CoefficientVector.custom(
        spec,
        lambda ks: (-(ks.astype(float) ** 2), np.zeros(ks.shape)),
        bounds=gl.TailBounds(None, gl.AsymForm.power(2.0, -1.0), 1),
    )
    assert gl.vector_class_beta0(f).member is None


def test_solution_smoothing_on_left_halfplane_spectrum():
    # k^-2 on lam = -k: rough at t = 0, analytic-type at t = 1
    spec = gl.PowerLawSpectrum(-1, 1, 0, 0)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    h = gl.SolutionHandle.admit(f)
    assert gl.solution_class_at(h, 0.0, 1.0, R).member is False
    r1 = gl.solution_class_at(h, 1.0, 1.0, R)
    assert r1.member is True
    assert r1.s_star_low <= 1.0 <= r1.s_star_high


def test_critical_scale_matches_closed_form_at_order_two():
    # f = e^{-3 sqrt(k)} on lam_k = k: membership at order 2 iff s < 3
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 3.0, 0.5)
    r = gl.vector_class(f, 2.0, gl.GevreyFlavor.ROUMIEU)
    assert r.member is True
    assert r.s_star_low <= 3.0 <= r.s_star_high
    assert r.s_star_high - r.s_star_low < 1e-6


def test_critical_scale_is_monotone_in_beta():
    spec = gl.PowerLawSpectrum(-1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 1.0)
    lows = [gl.vector_class(f, beta, R).s_star_low for beta in (1.0, 1.5, 2.0)]
    assert lows[0] <= lows[1] + 1e-9 and lows[1] <= lows[2] + 1e-9


def test_inclusion_chain_across_orders():
    order = {None: 0, False: 0, True: 1}
    for name, spec in gl.builtin_spectra().items():
        for v in gl.builtin_vectors(spec):
            if not gl.check_admissible(v).admissible:
                continue
            verdicts = {}
            for beta in (1.0, 1.5, 2.0):
                verdicts[(beta, "r")] = gl.vector_class(v, beta, R).member
                verdicts[(beta, "b")] = gl.vector_class(v, beta, B).member
            for beta in (1.0, 1.5, 2.0):
                if verdicts[(beta, "b")] is True:
                    assert verdicts[(beta, "r")] is True, (name, v.label, beta)
            for b1, b2 in ((1.0, 1.5), (1.5, 2.0), (1.0, 2.0)):
                if verdicts[(b1, "r")] is True and verdicts[(b2, "b")] is not None:
                    assert verdicts[(b2, "b")] is True, (name, v.label, b1, b2)


# -- region test -----------------------------------------------------------------


def test_region_diagonal_line_has_unit_slope():
    rep = gl.region_condition(gl.builtin_spectra()["lin-diag"], 1.0)
    assert rep.holds
    assert abs(rep.status.b_plus - 1.0) < 1e-12
    assert rep.ratio_tail.min == rep.ratio_tail.max == 1.0


def test_region_negative_axis_is_violated():
    rep = gl.region_condition(gl.builtin_spectra()["neg-real"], 1.0)
    assert rep.violated
    wit = rep.status.witness
    assert len(wit) >= 3
    mods = [abs(z) for z in wit]
    assert mods == sorted(mods) and mods[-1] > mods[0]
    assert rep.ratio_tail.max == -math.inf


def test_region_imaginary_parabola_violated_for_all_orders():
    spec = gl.builtin_spectra()["imag-quad"]
    for beta in (1.0, 1.5, 2.0):
        rep = gl.region_condition(spec, beta)
        assert rep.violated


def test_region_positive_axis_holds_with_infinite_ratios():
    rep = gl.region_condition(gl.builtin_spectra()["pos-real"], 1.0)
    assert rep.holds and rep.status.b_plus == 1.0
    assert rep.ratio_tail.min == math.inf


def test_region_explicit_spectrum_bounded():
    spec = gl.builtin_spectra()["explicit16"]
    rep = gl.region_condition(spec, 1.5)
    assert rep.holds
    assert rep.status.exception_radius == spec.max_abs() + 1.0


def test_region_monotone_in_beta():
    for name, spec in gl.builtin_spectra().items():
        for b1, b2 in ((1.0, 1.5), (1.5, 2.0)):
            r1 = gl.region_condition(spec, b1)
            if r1.holds:
                assert gl.region_condition(spec, b2).holds, (name, b1, b2)


def test_region_equality_slope_from_coefficients():
    rep = gl.region_condition(gl.PowerLawSpectrum(2, 1, 3, 1), 1.0)
    assert rep.holds
    assert abs(rep.status.b_plus - 2.0 / 3.0) < 1e-12


def test_region_custom_spectrum_paths():
    holds = gl.region_condition(
        gl.CustomSpectrum(lambda k: complex(k * k, k), (2.0, 1.0)), 1.0
    )
    assert holds.holds
    boundary = gl.region_condition(
        gl.CustomSpectrum(lambda k: complex(2 * k, k), (1.0, 1.0)), 1.0
    )
    assert isinstance(boundary.status, gl.RegionUnknown)  # estimated constants
    violated = gl.region_condition(
        gl.CustomSpectrum(lambda k: complex(-k, k * k), (1.0, 2.0)), 1.0
    )
    assert violated.violated
    no_decl = gl.region_condition(gl.CustomSpectrum(lambda k: complex(k, 0)), 1.0)
    assert isinstance(no_decl.status, gl.RegionUnknown)


def test_region_constant_imaginary_offset_holds_past_a_radius():
    rep = gl.region_condition(gl.PowerLawSpectrum(1, 1, 5, 0, label="k+5i"), 1.0)
    assert rep.holds and rep.status.b_plus == 1.0
    # the first few points sit below Re >= |Im|; the radius must cover them
    assert rep.status.exception_radius > abs(complex(4, 5))


def test_region_falling_real_part_with_growing_imaginary_is_violated():
    assert gl.region_condition(gl.PowerLawSpectrum(-1, 1, 1, 2), 1.0).violated


def test_region_below_one_needs_the_extrapolation_flag():
    spec = gl.builtin_spectra()["lin-diag"]
    with pytest.raises(ValueError):
        gl.region_condition(spec, 0.5)
    rep = gl.region_condition(spec, 0.5, allow_extrapolation=True)
    assert rep.extrapolated


def test_region_mixed_strict_dominance_radius():
    # k + i sqrt(k): every point already satisfies Re >= |Im| for beta = 1
    rep = gl.region_condition(gl.builtin_spectra()["lin-sqrt"], 1.0)
    assert rep.holds
    spec = gl.builtin_spectra()["lin-sqrt"]
    ks = np.arange(1, 4097, dtype=np.int64)
    lams = spec.eigenvalues(ks)
    outside = np.abs(lams) > rep.status.exception_radius
    assert np.all(lams.real[outside] >= rep.status.b_plus * np.abs(lams.imag[outside]))


# -- order estimation --------------------------------------------------------------


def test_estimate_order_pure_geometric_growth():
    spec = gl.ExplicitSpectrum((2 + 0j,))
    f = gl.CoefficientVector.explicit(spec, values=[1.0])
    est = gl.estimate_order(f, n_max=40)
    assert abs(est.beta_hat) < 1e-10
    assert abs(est.alpha_hat - 2.0) < 1e-9
    assert est.fit_residual < 1e-10


def test_estimate_order_recovers_two_for_root_decay():
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 0.5)
    est = gl.estimate_order(f, n_max=40)
    assert abs(est.beta_hat - 2.0) < 0.15
    # dense-scan oracle for the norms themselves
    ks = np.arange(1, (1 << 20) + 1, dtype=float)
    for n in (10, 40):
        t = 2.0 * (n * np.log(ks) - np.sqrt(ks))
        m = t.max()
        oracle = 0.5 * (m + math.log(np.exp(t - m).sum()))
        assert abs(est.log_norms[n] - oracle) < 1e-9


def test_estimate_order_superfactorial_decay_converges_slowly_from_below():
    # k^-k sits exactly at order one, but its norms carry a -n log log n
    # correction outside the fit basis: the estimate climbs toward 1 at a
    # 1/log(n) rate and reads ~0.74 at n_max = 40
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)

    def fn(ks):
        kf = ks.astype(float)
        return -kf * np.log(kf), np.zeros(ks.shape)

    f = gl.CoefficientVector.custom(
        spec, fn, bounds=gl.TailBounds.exact(gl.AsymForm.power_log(1.0, -1.0)), label="k^-k"
    )
    e40 = gl.estimate_order(f, n_max=40)
    e80 = gl.estimate_order(f, n_max=80)
    assert abs(e40.beta_hat - 0.744) < 0.02
    assert e40.beta_hat < e80.beta_hat < 1.0


def test_estimate_order_propagates_power_norm_cutoff():
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    with pytest.raises(gl.DomainError):
        gl.estimate_order(f, n_max=40)


def test_estimate_order_window_validation():
    spec = gl.ExplicitSpectrum((2 + 0j,))
    f = gl.CoefficientVector.explicit(spec, values=[1.0])
    with pytest.raises(ValueError):
        gl.estimate_order(f, n_max=40, n_min=3)
    with pytest.raises(ValueError):
        gl.estimate_order(f, n_max=5, n_min=10)


# -- harness -------------------------------------------------------------------


def test_harness_holds_run_certifies_beurling_everywhere():
    rep = gl.theorem_equivalence_harness(gl.builtin_spectra()["lin-diag"], 1.0)
    assert rep.region.holds
    admissible_rows = [r for r in rep.rows if r.admissible]
    assert len(admissible_rows) >= 3
    for row in admissible_rows:
        for t, flavor, member in row.verdicts:
            assert member is True, (row.vector, t, flavor)
    assert rep.counterexample is None


def test_harness_violated_run_builds_refuting_vector():
    rep = gl.theorem_equivalence_harness(gl.builtin_spectra()["imag-quad"], 1.0)
    assert rep.region.violated
    assert rep.counterexample is not None
    assert rep.counterexample.admissibility.admissible
    assert rep.counterexample.non_membership.member is False


def test_harness_raises_on_a_certified_contradiction(monkeypatch):
    # force a "Beurling certified, Roumieu refuted" pair: the report must be
    # attached to the hard failure
    import gevlab.gevrey_classifier as gc

    real = gc._classify_both

    def forged(f, beta, budget):
        r, b = real(f, beta, budget)
        broken_r = gl.GevreyVerdict(gl.GevreyFlavor.ROUMIEU, False, 0.0, 0.0)
        broken_b = gl.GevreyVerdict(gl.GevreyFlavor.BEURLING, True, float("inf"), float("inf"))
        return broken_r, broken_b

    monkeypatch.setattr(gc, "_classify_both", forged)
    with pytest.raises(gl.HarnessError) as err:
        gl.theorem_equivalence_harness(gl.builtin_spectra()["lin-diag"], 1.0)
    assert err.value.report is not None
    assert any("Roumieu refuted" in note for note in err.value.report.notes)


def test_harness_explicit_spectrum_trivially_consistent():
    rep = gl.theorem_equivalence_harness(gl.builtin_spectra()["explicit16"], 2.0)
    assert rep.region.holds
    assert all(m is True for r in rep.rows for _, _, m in r.verdicts)
