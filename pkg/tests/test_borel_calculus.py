import math

import numpy as np
import pytest

import gevlab as gl
from gevlab.logdomain import NEG_INF
from gevlab.series import SeriesStatus


def test_power_zero_and_exp_zero_are_bitwise_identity():
    spec = gl.builtin_spectra()["explicit16"]
    rng = np.random.default_rng(3)
    f = gl.CoefficientVector.explicit(
        spec, values=list(map(complex, rng.normal(size=16) + 1j * rng.normal(size=16)))
    )
    ks = np.arange(1, 17, dtype=np.int64)
    mf, pf = f.log_coeffs(ks)
    for F in (gl.PowerSymbol(0), gl.ExpSymbol(0.0)):
        g = gl.apply_symbol(F, f)
        mg, pg = g.log_coeffs(ks)
        assert np.array_equal(mf, mg) and np.array_equal(pf, pg)


def test_power_two_squares_eigenvalues():
    spec = gl.ExplicitSpectrum((1 + 0j, 2 + 0j, 3 + 0j))
    f = gl.CoefficientVector.explicit(spec, values=[1.0, 1.0, 1.0])
    g = gl.apply_symbol(gl.PowerSymbol(2), f)
    assert np.allclose(g.to_complex(np.arange(1, 4)), [1.0, 4.0, 9.0])


def test_apply_symbol_rejects_outside_domain():
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    with pytest.raises(gl.DomainError):
        gl.apply_symbol(gl.ExpSymbol(1.0), f)


def test_composition_law_exact_on_dyadic_data():
    spec = gl.builtin_spectra()["explicit16"]
    rng = np.random.default_rng(9)
    f = gl.CoefficientVector.explicit(
        spec, values=list(map(complex, rng.normal(size=16) + 1j * rng.normal(size=16)))
    )
    z1, z2 = 0.5 + 0.25j, 0.25 - 0.5j
    one = gl.apply_symbol(gl.ExpSymbol(z1 + z2), f)
    two = gl.apply_symbol(gl.ExpSymbol(z1), gl.apply_symbol(gl.ExpSymbol(z2), f))
    ks = np.arange(1, 17, dtype=np.int64)
    m1, p1 = one.log_coeffs(ks)
    m2, p2 = two.log_coeffs(ks)
    assert np.array_equal(m1, m2) and np.array_equal(p1, p2)


def test_composite_equals_chained_application_bitwise():
    spec = gl.builtin_spectra()["explicit16"]
    f = gl.CoefficientVector.explicit(spec, values=[complex(k + 1) for k in range(16)])
    F, G = gl.PowerSymbol(2), gl.ExpSymbol(0.5)
    ks = np.arange(1, 17, dtype=np.int64)
    a = gl.apply_symbol(gl.compose(F, G), f)
    b = gl.apply_symbol(F, gl.apply_symbol(G, f))
    ma, pa = a.log_coeffs(ks)
    mb, pb = b.log_coeffs(ks)
    assert np.array_equal(ma, mb) and np.array_equal(pa, pb)


def test_gevrey_weight_is_one_at_the_origin():
    sym = gl.GevreyExpSymbol(3.0, 2.0)
    vals = sym.log_abs(np.array([0j, 16j]))
    assert vals[0] == 0.0
    assert math.isclose(vals[1], 3.0 * 4.0)


# -- direct membership ---------------------------------------------------------


def test_direct_membership_with_partial_sum_oracle():
    # lam_k = -k, f_k = e^-k, F = exp(5 A): oracle by direct summation
    spec = gl.PowerLawSpectrum(-1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 1.0)
    v = gl.domain_member_direct(gl.ExpSymbol(5.0), f)
    assert v.member is True
    ks = np.arange(1, 1_000_001, dtype=float)
    oracle = 0.5 * math.log(np.exp(2.0 * (-5.0 * ks - ks)).sum())
    assert abs(v.log_norm - oracle) < 1e-12


def test_direct_membership_divergence_witness():
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    v = gl.domain_member_direct(gl.ExpSymbol(1.0), f)
    assert v.member is False
    assert v.certificate.status is SeriesStatus.DIVERGES


def test_identity_symbol_keeps_stored_vectors_in_domain():
    for spec in (gl.builtin_spectra()["explicit16"], gl.PowerLawSpectrum(1, 1, 1, 4)):
        f = (
            gl.CoefficientVector.explicit(spec, values=[1.0] * 16)
            if spec.size is not None
            else gl.CoefficientVector.power_decay(spec, 1.0, 2.0)
        )
        assert gl.domain_member_direct(gl.PowerSymbol(0), f).member is True


# -- dual-probe criterion --------------------------------------------------------


def test_prop31_agrees_with_direct_on_random_explicit_spectra():
    rng = np.random.default_rng(42)
    for _ in range(6):
        pts = rng.normal(size=32) + 1j * rng.normal(size=32)
        spec = gl.ExplicitSpectrum(tuple(map(complex, pts)))
        f = gl.CoefficientVector.explicit(
            spec, values=list(map(complex, rng.normal(size=32) + 1j * rng.normal(size=32)))
        )
        for F in gl.catalog_symbols():
            d = gl.domain_member_direct(F, f)
            p = gl.domain_member_prop31(F, f)
            assert d.member == p.member


def test_prop31_divergence_via_slow_dual():
    spec = gl.PowerLawSpectrum(0, 0, 1, 2)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    v = gl.domain_member_prop31(gl.GevreyExpSymbol(1.0, 1.0), f)
    assert v.member is False
    assert "h*" in v.detail


def test_prop31_accepts_identity():
    spec = gl.PowerLawSpectrum(1, 1, 1, 1)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 2.0)
    v = gl.domain_member_prop31(gl.PowerSymbol(0), f)
    assert v.member is True


def test_prop31_rejects_zero_budget():
    spec = gl.PowerLawSpectrum(1, 1, 1, 1)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 2.0)
    with pytest.raises(ValueError):
        gl.domain_member_prop31(gl.PowerSymbol(0), f, probe_budget=0)


# -- power norms ----------------------------------------------------------------


def test_power_norms_single_eigenvalue_is_geometric():
    spec = gl.ExplicitSpectrum((2 + 0j,))
    f = gl.CoefficientVector.explicit(spec, values=[1.0])
    norms = gl.power_norms(f, 12)
    for n, value in enumerate(norms.log_norms):
        assert value == n * np.log(2.0)


def test_power_norms_zero_vector():
    spec = gl.ExplicitSpectrum((2 + 0j, 3 + 0j))
    f = gl.CoefficientVector.explicit(spec, values=[0.0, 0.0])
    norms = gl.power_norms(f, 4)
    assert all(v == NEG_INF for v in norms.log_norms)


def test_power_norms_closed_form_base():
    spec = gl.PowerLawSpectrum(-1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 1.0)
    norms = gl.power_norms(f, 6)
    oracle0 = 0.5 * math.log(1.0 / (math.e**2 - 1.0))
    assert abs(norms.log_norms[0] - oracle0) < 1e-12
    ks = np.arange(1, 200_000, dtype=float)
    oracle3 = 0.5 * math.log(np.sum(ks**6 * np.exp(-2 * ks)))
    assert abs(norms.log_norms[3] - oracle3) < 1e-10


def test_power_norms_cutoff_at_first_uncertified_order():
    # lam_k = k, f_k = k^-2: ||A^n f|| leaves l^2 at n = 2
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.polynomial_decay(spec, 2.0)
    norms = gl.power_norms(f, 10)
    assert norms.cutoff == 2
    assert norms.cutoff_certificate.status is SeriesStatus.DIVERGES
    assert len(norms.log_norms) == 2


def test_power_norms_log_convex_for_l2():
    spec = gl.PowerLawSpectrum(1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 2.0)
    y = gl.power_norms(f, 12).log_norms
    for n in range(1, 11):
        assert y[n] <= 0.5 * (y[n - 1] + y[n + 1]) + 1e-9


def test_estimate_cond_i_instance():
    # weighted total variation <= 4 ||F(A)f|| ||g|| when both sides certify
    spec = gl.PowerLawSpectrum(-1, 1, 0, 0)
    f = gl.CoefficientVector.power_decay(spec, 1.0, 1.0)
    g = gl.CoefficientVector.power_decay(spec, 0.5, 1.0)
    F = gl.ExpSymbol(2.0)
    tv = gl.total_variation(f, g, gl.predicate_all(), weight=F)
    vf = gl.domain_member_direct(F, f)
    gnorm, _ = g.log_norm()
    assert tv.status is SeriesStatus.CONVERGES and vf.member is True
    assert tv.log_value <= math.log(4.0) + vf.log_norm + gnorm + 1e-12
