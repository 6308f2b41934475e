import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import density_mass

from complexjacobi import (
    chebyshev_q,
    closed_form_moments,
    closed_form_spectral,
    jacobi_omega,
    moment_sequence,
    q_polynomials,
)
from complexjacobi.errors import DomainError, TooLarge


def semicircle_moments(omega, M, N=400):
    """Oracle: the operator is omega + S with S semicircular on [-2, 2].

    It is normal, so omega_{2n} = int |t + omega|^{2n} and
    omega_{2n+1} = int (t + omega) |t + omega|^{2n} against sqrt(4 - t^2)/(2 pi).
    Gauss-Chebyshev of the second kind is exact for these polynomial integrands.
    """
    k = np.arange(1, N + 1)
    th = k * np.pi / (N + 1)
    t = 2 * np.cos(th)
    w = (4 / (2 * np.pi)) * (np.pi / (N + 1)) * np.sin(th) ** 2
    z = t + omega
    out = []
    for m in range(M + 1):
        r = np.abs(z) ** (2 * (m // 2))
        out.append(np.sum(w * (r * z if m % 2 else r)))
    return np.array(out)


OMEGAS = [3 + 0.5j, 1 + 1j, 0.7j, 0, 1, 3, -1 + 1j, 0.5 + 2j, 2 + 0.3j, -3 + 0.2j]


def test_oracle_normalisation():
    assert semicircle_moments(0, 2)[0] == pytest.approx(1.0, abs=1e-14)
    assert semicircle_moments(0, 2)[2] == pytest.approx(1.0, abs=1e-14)


def test_real_shift_outside_band():
    model = closed_form_spectral(3.0)
    assert model.support == ((1.0, 5.0),)
    s = np.linspace(1.01, 4.99, 30)
    assert np.allclose(model.density(s), np.sqrt(4 - (s - 3) ** 2) / (2 * np.pi), atol=1e-14)
    assert np.allclose(model.phase(s), 1.0, atol=1e-14)


def test_imaginary_unit():
    model = closed_form_spectral(1j)
    lo, hi = model.interval
    assert lo == pytest.approx(1.0) and hi == pytest.approx(math.sqrt(5))
    s = np.linspace(1.01, 2.2, 25)
    assert np.allclose(model.phase(s), 1j / s, atol=1e-14)


def test_zero_shift():
    model = closed_form_spectral(0)
    s = np.linspace(0.01, 1.99, 30)
    assert np.allclose(model.density(s), np.sqrt(4 - s**2) / np.pi, atol=1e-14)
    assert np.allclose(model.phase(s), 0.0, atol=1e-14)


def test_outside_support():
    model = closed_form_spectral(1 + 1j)
    lo, hi = model.interval
    out = np.array([lo / 2, hi + 1])
    assert np.all(model.density(out) == 0)
    assert np.all(np.isnan(model.phase(out)))


@pytest.mark.parametrize("omega", OMEGAS)
def test_density_integrates_to_one(omega):
    assert density_mass(closed_form_spectral(omega)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("omega", OMEGAS)
def test_closed_form_moments_match_semicircle(omega):
    got = closed_form_moments(omega, 10).omega
    want = semicircle_moments(omega, 10)
    assert np.all(np.abs(got - want) <= 1e-8 * np.maximum(1, np.abs(want)))


@pytest.mark.parametrize("omega", [3 + 0.5j, 1 + 1j, 0.7j, 1])
def test_truncation_moments_match(omega):
    closed = closed_form_moments(omega, 10).omega
    trunc = moment_sequence(jacobi_omega(omega, 14), 10).omega
    assert np.all(np.abs(closed - trunc) <= 1e-8 * np.maximum(1, np.abs(trunc)))


@given(st.floats(-3.5, 3.5), st.floats(-2.5, 2.5), st.floats(0.05, 0.95))
def test_reflection_symmetry(re, im, frac):
    w = complex(re, im)
    a, b = closed_form_spectral(w), closed_form_spectral(-w)
    lo, hi = a.interval
    s = lo + frac * (hi - lo)
    assert b.density(s) == pytest.approx(a.density(s), rel=1e-12, abs=1e-14)
    pa, pb = a.phase(s), b.phase(s)
    if np.isfinite(pa):
        assert abs(pb + pa) < 1e-12


@given(st.floats(-4, 4), st.floats(-2.5, 2.5))
@settings(max_examples=100)
def test_phase_unimodular_exactly_outside_band(re, im):
    model = closed_form_spectral(complex(re, im))
    pieces = model.support
    lo, hi = model.interval
    s = lo + np.linspace(0.02, 0.98, 100) * (hi - lo)
    mod = np.abs(model.phase(s))
    mod = mod[np.isfinite(mod)]
    assert np.all(mod < 1 + 1e-12)
    if abs(re) >= 2:
        assert len(pieces) == 1
        assert np.allclose(mod, 1.0, atol=1e-12)
    elif len(pieces) == 2:
        # both branches contribute on the inner piece, so |psi| drops below 1 there
        a, b = pieces[0]
        inner = np.abs(model.phase(a + np.linspace(0.1, 0.9, 9) * (b - a)))
        assert np.all(inner < 1)


@pytest.mark.parametrize("im", [0.0, 0.4, 1.5])
def test_continuity_across_band_edge(im):
    s_grid = None
    vals = []
    for re in (2 - 1e-7, 2 + 1e-7):
        model = closed_form_spectral(complex(re, im))
        if s_grid is None:
            lo, hi = model.interval
            s_grid = lo + np.linspace(0.1, 0.9, 17) * (hi - lo)
        vals.append((model.density(s_grid), model.phase(s_grid)))
    assert np.allclose(vals[0][0], vals[1][0], atol=1e-5)
    assert np.allclose(vals[0][1], vals[1][1], atol=1e-5)


@pytest.mark.parametrize("omega", [0j, 0.7j, -1.3j, 2.5j])
def test_chebyshev_form_matches_recurrence(omega):
    qs = q_polynomials(jacobi_omega(omega, 13), 13)
    for j, q in enumerate(qs):
        c = chebyshev_q(omega, j)
        assert c.degree == q.degree
        scale = max(1.0, np.abs(q.coeffs).max())
        assert np.abs(c.coeffs - q.coeffs).max() < 1e-10 * scale


def test_chebyshev_low_indices():
    w = 0.7j
    assert np.allclose(chebyshev_q(w, 0).coeffs, [1])
    assert np.allclose(chebyshev_q(w, 1).coeffs, [-w, 1])


def test_chebyshev_domain_and_cap():
    with pytest.raises(DomainError):
        chebyshev_q(1 + 1j, 2)
    with pytest.raises(TooLarge):
        chebyshev_q(1j, 15)
    with pytest.raises(TooLarge):
        closed_form_moments(1j, 17)


@pytest.mark.parametrize("omega", [0.0, 0.5, 1.0, 1.9])
def test_selfadjoint_density_is_shifted_semicircle(omega):
    model = closed_form_spectral(omega)
    t = np.linspace(omega - 1.99, omega + 1.99, 41)
    t = t[np.abs(t) > 1e-3]
    want = np.sqrt(4 - (t - omega) ** 2) / (2 * np.pi)
    assert np.allclose(model.selfadjoint_density(t), want, atol=1e-10)


def test_selfadjoint_density_needs_real_shift():
    with pytest.raises(DomainError):
        closed_form_spectral(1j).selfadjoint_density([0.5])
