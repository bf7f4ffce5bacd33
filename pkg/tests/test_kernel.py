"""Kernel family: exponents, densities, spectral profiles, CSV tables."""

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import roots_jacobi

import oracles
from conewave import (
    KernelSpec,
    KernelValidityError,
    UnsupportedParameterError,
    gamma_const,
    lambda_of,
    multiplier_split,
    omega_hat,
    omega_hat_adjoint,
    omega_hat_dilated,
    omega_physical,
)
from conewave.kernel import write_kernel_tables


def test_lambda_values():
    assert lambda_of(0.5, 1) == 0.5 + 0j
    assert lambda_of(1.0, 2) == pytest.approx(0.75)
    assert lambda_of(0.5, 1, v=0.7) == 0.5 + 0.7j
    # endpoint alpha -> n collapses lambda to the imaginary axis
    assert lambda_of(1.0 - 1e-12, 1).real == pytest.approx(0.0, abs=1e-11)


def test_lambda_rejects_out_of_range_orders():
    for alpha, n in ((0.0, 1), (1.0, 1), (-0.2, 2), (2.0, 2), (3.5, 3)):
        with pytest.raises(KernelValidityError):
            lambda_of(alpha, n)
    with pytest.raises(KernelValidityError):
        lambda_of(0.5, 0)
    with pytest.raises(KernelValidityError):
        lambda_of(0.5, 1, v=math.inf)


@given(
    n=st.integers(min_value=1, max_value=3),
    frac=st.floats(min_value=1e-6, max_value=1.0 - 1e-6),
)
@settings(max_examples=100, deadline=None)
def test_derived_exponents_stay_in_their_strips(n, frac):
    spec = KernelSpec(frac * n, n)
    assert -0.5 < spec.bessel_order < (n + 1) / 2 - 0.5
    assert 0.0 < spec.lam.real < (n + 1) / 2
    assert spec.time_scale_power == (n + 1) / n
    # the two derived exponents are tied: nu = n/2 - Re lam
    assert spec.bessel_order == pytest.approx(n / 2 - spec.lam.real, abs=1e-12)


def test_normalizing_constant_against_high_precision():
    import mpmath

    for alpha, n in ((0.5, 1), (0.3, 1), (0.9, 2), (2.2, 3)):
        spec = KernelSpec(alpha, n)
        lam = spec.lam.real
        want = mpmath.pi ** (-mpmath.mpf(lam)) / mpmath.gamma(1 - mpmath.mpf(lam))
        assert gamma_const(spec).real == pytest.approx(float(want), rel=1e-13)
        assert gamma_const(spec).imag == 0.0
    # lam = 1/2 gives the closed value 1/pi
    assert gamma_const(KernelSpec(0.5, 1)).real == pytest.approx(1.0 / math.pi, rel=1e-15)


def test_continuation_zero_where_gamma_poles_sit():
    # lam = 1 at alpha = n(n-1)/(n+1): the reciprocal gamma kills the pole
    spec = KernelSpec(2.0 / 3.0, 2)
    assert spec.lam == 1.0 + 0j
    assert gamma_const(spec) == 0j
    # the spectral profile stays finite and normalized through that point
    assert omega_hat(0.0, spec) == pytest.approx(1.0, rel=1e-14)


def test_physical_density_shape_and_support():
    spec = KernelSpec(0.5, 1)  # lam = 1/2, inside the density strip
    x = np.linspace(-2.0, 2.0, 401)
    w = omega_physical(x, spec)
    assert np.all(w[np.abs(x) >= 1.0] == 0.0)
    inside = np.abs(x) < 1.0
    assert np.all(w[inside] > 0.0)
    assert w[inside].min() >= gamma_const(spec).real  # density >= its center value
    assert omega_physical(0.0, spec) == pytest.approx(1.0 / math.pi, rel=1e-14)


def test_physical_density_integrates_to_zero_frequency_mass():
    spec = KernelSpec(0.5, 1)
    lam = spec.lam.real
    u, wts = roots_jacobi(800, -lam, -lam)
    # the Jacobi weight IS the density up to gamma_const, so sum(w) ~ mass
    mass = gamma_const(spec).real * wts.sum()
    assert mass == pytest.approx(omega_hat(0.0, spec), rel=1e-12)


def test_physical_density_refuses_outside_strip():
    # n=2, alpha=0.5 has lam = 1.125: only a distribution, no density
    with pytest.raises(KernelValidityError):
        omega_physical(0.5, KernelSpec(0.5, 2))


def test_analytic_family_members_are_refused_by_real_routines():
    spec = KernelSpec(0.5, 1, v=0.3)
    for fn in (
        lambda: omega_physical(0.5, spec),
        lambda: omega_hat(1.0, spec),
        lambda: multiplier_split(1.0, spec),
    ):
        with pytest.raises(UnsupportedParameterError):
            fn()


def test_spectral_profile_matches_quadrature_oracle():
    for alpha in (0.3, 0.5, 0.8):
        spec = KernelSpec(alpha, 1)
        for xi in (0.0, 0.5, 2.0, 7.0):
            want = oracles.profile_transform_reference(alpha, xi)
            assert omega_hat(xi, spec) == pytest.approx(want, abs=1e-9)


def test_zero_frequency_mass_formula():
    for alpha, n in ((0.5, 1), (0.3, 1), (1.0, 2), (1.5, 3)):
        spec = KernelSpec(alpha, n)
        assert omega_hat(0.0, spec) == pytest.approx(
            oracles.zero_frequency_reference(alpha, n), rel=1e-13
        )


def test_profile_even_and_adjoint_real():
    spec = KernelSpec(0.7, 2)
    xi = np.linspace(0.1, 9.0, 40)
    assert np.array_equal(omega_hat(xi, spec), omega_hat(-xi, spec))
    assert np.array_equal(omega_hat_adjoint(xi, spec), omega_hat(xi, spec))


@given(
    r=st.floats(min_value=1e-3, max_value=1e3),
    xi=st.floats(min_value=0.0, max_value=50.0),
)
@settings(max_examples=100, deadline=None)
def test_dilation_is_mass_preserving_rescaling(r, xi):
    spec = KernelSpec(0.4, 1)
    assert omega_hat_dilated(xi, r, spec) == omega_hat(r * xi, spec)
    assert omega_hat_dilated(0.0, r, spec) == omega_hat(0.0, spec)


def test_dilation_guards():
    spec = KernelSpec(0.4, 1)
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(KernelValidityError):
            omega_hat_dilated(1.0, bad, spec)


def test_split_main_closed_form():
    # main = (1/pi) xi^{-a} cos(2 pi xi - pi a/2), a = nu + 1/2
    xi = np.geomspace(0.2, 50.0, 200)
    for alpha, n in ((0.5, 1), (0.3, 1), (1.2, 2)):
        spec = KernelSpec(alpha, n)
        a = spec.bessel_order + 0.5
        main, rest = multiplier_split(xi, spec)
        closed = xi ** (-a) * np.cos(2.0 * np.pi * xi - np.pi * a / 2.0) / np.pi
        assert np.max(np.abs(main - closed)) < 1e-13 * np.max(np.abs(closed))
        assert np.max(np.abs(main + rest - omega_hat(xi, spec))) < 1e-14


def test_split_remainder_decays_one_power_faster():
    spec = KernelSpec(0.4, 1)
    a = spec.bessel_order + 0.5
    xi = np.geomspace(1.0, 1e3, 3000)
    _, rest = multiplier_split(xi, spec)
    envelope = np.abs(rest) * xi ** (a + 1.0)
    # bounded envelope: the sup over the last decade is no bigger than over the first
    first = envelope[xi <= 10.0].max()
    last = envelope[xi >= 100.0].max()
    assert last <= 2.0 * first


def test_split_refuses_zero_frequency():
    spec = KernelSpec(0.5, 1)
    with pytest.raises(ValueError):
        multiplier_split(0.0, spec)
    with pytest.raises(ValueError):
        multiplier_split(np.array([1.0, 0.0]), spec)


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_kernel_tables_roundtrip(tmp_path):
    spec = KernelSpec(0.5, 1)
    xi = np.linspace(0.0, 3.0, 7)
    x = np.linspace(-1.2, 1.2, 9)
    sp, ph = tmp_path / "spectral.csv", tmp_path / "physical.csv"
    info = write_kernel_tables(spec, xi, x, sp, ph)
    assert info == {"spectral_rows": 7, "physical_rows": 9}

    rows = _read_csv(sp)
    assert rows[0] == ["xi", "omega_hat", "main", "remainder"]
    assert len(rows) == 8
    # xi = 0: profile present, split columns empty (undefined there)
    assert rows[1][0] == "0.0" and rows[1][2] == "" and rows[1][3] == ""
    assert float(rows[1][1]) == omega_hat(0.0, spec)
    for row in rows[2:]:
        v = float(row[0])
        assert float(row[1]) == omega_hat(v, spec)  # repr round-trips exactly
        m, r = multiplier_split(v, spec)
        assert float(row[2]) == m and float(row[3]) == r

    prows = _read_csv(ph)
    assert prows[0] == ["x", "omega"]
    assert len(prows) == 10
    got = np.array([float(r[1]) for r in prows[1:]])
    assert np.array_equal(got, omega_physical(x, spec))


def test_kernel_tables_refuse_density_outside_strip(tmp_path):
    # n=2, alpha=0.5: spectral table written, physical table header-only
    spec = KernelSpec(0.5, 2)
    sp, ph = tmp_path / "s.csv", tmp_path / "p.csv"
    info = write_kernel_tables(spec, np.linspace(0, 2, 5), np.linspace(-1, 1, 5), sp, ph)
    assert info["spectral_rows"] == 5
    assert info["physical_rows"] == 0
    assert len(_read_csv(ph)) == 1
