import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import sph_harm_y

from plasmod import sphere as sp
from plasmod.drude import DrudeParams, lossless_frequency_for, permittivity
from plasmod.errors import EigenvalueHit, ExactResonanceSingularity, SourceSingularity

E0 = np.array([0.3, -0.4, 1.2])


def scene(eps1, eps0=1.0, r=1.0, e0=E0):
    return sp.SphereScene(r_np=r, eps_matrix=eps0, eps_particle=eps1, e0=e0)


# --- response and energy ------------------------------------------------------


def test_no_contrast_no_scattering():
    resp = sp.sphere_response(scene(2.5, eps0=2.5))
    np.testing.assert_allclose(resp.e2, E0, rtol=1e-15)
    np.testing.assert_array_equal(resp.e1, 0)


def test_eps_twice_host():
    r = 2.0
    resp = sp.sphere_response(scene(2.0, r=r))
    np.testing.assert_allclose(resp.e2, 0.75 * E0, rtol=1e-15)
    np.testing.assert_allclose(resp.e1, -0.25 * r**3 * E0, rtol=1e-15)


def test_exact_singularity():
    with pytest.raises(ExactResonanceSingularity):
        sp.sphere_response(scene(-2.0))


def test_near_resonance_interior_field():
    wp = 2.0
    p = DrudeParams(1.0, wp)
    e0 = np.array([0.0, 0.0, 1.0])
    for tau in (1e-4, 1e-5, 1e-6):
        eps1 = permittivity(p.with_tau(tau), wp / math.sqrt(3.0))
        e2 = np.linalg.norm(sp.sphere_response(scene(eps1, e0=e0)).e2)
        leading = wp / (math.sqrt(3.0) * tau)
        assert abs(e2 - leading) < 1.0
        assert e2 / leading == pytest.approx(1.0, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(re=st.floats(-20, 20), im=st.floats(0, 5), eps0=st.floats(0.5, 5), r=st.floats(0.1, 10))
def test_transmission_conditions(re, im, eps0, r):
    eps1 = complex(re, im)
    if abs(2 * eps0 + eps1) < 1e-3:
        return
    s = scene(eps1, eps0=eps0, r=r)
    resp = sp.sphere_response(s)
    pot, flux = sp.transmission_residuals(s, resp)
    scale = max(1.0, abs(eps1) / eps0) * max(1.0, abs(3 * eps0 / (2 * eps0 + eps1)))
    assert pot <= 1e-12 * scale and flux <= 1e-12 * scale
    # energy equals |E2|^2 V
    energy = sp.sphere_energy(s)
    assert energy == pytest.approx(s.volume * np.sum(np.abs(resp.e2) ** 2), rel=1e-12)


def test_energy_unit_sphere():
    assert sp.sphere_energy(scene(1.0, e0=[1, 0, 0])) == pytest.approx(4 * math.pi / 3, rel=1e-15)


def test_energy_close_to_resonance():
    s = scene(-2.0 * (1 - 1e-3), e0=[0, 1, 0])
    amplification = (3 / (2e-3)) ** 2
    assert sp.sphere_energy(s) == pytest.approx(amplification * 4 * math.pi / 3, rel=1e-9)


def test_energy_scales_as_inverse_tau_squared():
    wp = 1.0
    p = DrudeParams(1.0, wp)
    e0 = np.array([1.0, 0.0, 0.0])
    vals = []
    for tau in (1e-5, 1e-6):
        eps1 = permittivity(p.with_tau(tau), wp / math.sqrt(3.0))
        vals.append(sp.sphere_energy(scene(eps1, e0=e0)) * tau**2)
    assert vals[1] == pytest.approx(vals[0], rel=1e-4)
    # limit is omega_p^2 / 3 times V |E0|^2
    assert vals[1] == pytest.approx(wp**2 / 3 * 4 * math.pi / 3, rel=1e-6)


# --- blow-up scan and resonance wavelength -------------------------------------


def test_blowup_at_resonance():
    p = DrudeParams(1.0, 1.0)
    grid = np.geomspace(1e-2, 1e-6, 9)
    out = sp.resonance_blowup_scan(p, 1 / math.sqrt(3.0), 1.0, [0, 0, 1], grid)
    assert out[-1][1] > 1e3 * out[0][1]
    taus, te = np.array(out).T
    slope = np.polyfit(np.log(taus), np.log(te / taus), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.05)


def test_off_resonance_goes_to_zero():
    p = DrudeParams(1.0, 1.0)
    out = sp.resonance_blowup_scan(p, 10.0, 1.0, [0, 0, 1], [1e-2, 1e-4, 1e-6])
    te = [v for _, v in out]
    assert te[0] > te[1] > te[2]
    assert te[2] / te[0] == pytest.approx(1e-4, rel=1e-3)


def test_single_point_scan_matches_energy():
    p = DrudeParams(1.0, 1.0)
    omega, tau = 0.7, 1e-3
    [(t, te)] = sp.resonance_blowup_scan(p, omega, 2.0, E0, [tau])
    expected = tau * sp.sphere_energy(scene(permittivity(p.with_tau(tau), omega), r=2.0))
    assert t == tau and te == pytest.approx(expected, rel=1e-15)


def test_scan_rejects_bad_grid():
    p = DrudeParams(1.0, 1.0)
    with pytest.raises(ValueError):
        sp.resonance_blowup_scan(p, 0.5, 1.0, E0, [1e-4, 1e-3])
    with pytest.raises(ValueError):
        sp.resonance_blowup_scan(p, 0.5, 1.0, E0, [1e-3, 0.0])


def test_resonance_wavelength():
    p = DrudeParams(1.0, 2 * math.pi * math.sqrt(3.0))
    assert sp.resonance_wavelength(p, 1.0) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("wp, v", [(1.2e16, 3e8), (0.5, 2.0), (7.0, 1e-3)])
def test_resonance_wavelength_roundtrip(wp, v):
    p = DrudeParams(1.0, wp)
    lam = sp.resonance_wavelength(p, v)
    omega = 2 * math.pi * v / lam
    assert omega == pytest.approx(wp / math.sqrt(3.0), rel=1e-12)
    assert lossless_frequency_for(p, -2.0) == pytest.approx(omega, rel=1e-12)


# --- harmonic convention -------------------------------------------------------


def test_driving_coefficients_by_angular_quadrature():
    e0 = np.array([0.7 - 0.2j, -1.1, 0.4 + 0.5j])
    x, w = np.polynomial.legendre.leggauss(12)
    theta = np.arccos(x)
    phi = np.linspace(0, 2 * math.pi, 24, endpoint=False)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    weights = np.outer(w, np.full(phi.size, 2 * math.pi / phi.size))
    xhat = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    f = np.tensordot(e0, xhat, axes=1)
    projected = np.array(
        [np.sum(f * np.conj(sph_harm_y(1, m, th, ph)) * weights) for m in (-1, 0, 1)]
    )
    a0 = sp.driving_coefficients(e0)
    np.testing.assert_allclose(a0, projected, atol=1e-13)
    assert np.sum(np.abs(a0) ** 2) == pytest.approx(4 * math.pi / 3 * np.sum(np.abs(e0) ** 2), rel=1e-13)
    np.testing.assert_allclose(sp.field_from_coefficients(a0), e0, atol=1e-15)


# --- polarization tensors ------------------------------------------------------


@pytest.mark.parametrize("eps0", [1.0, 2.5, 4.0])
def test_contrast_hits_ball_eigenvalue(eps0):
    assert sp.contrast(-2 * eps0, eps0) == 1 / 6
    with pytest.raises(EigenvalueHit):
        sp.sphere_polarization_tensors(scene(-2 * eps0, eps0=eps0))


def test_no_contrast_zero_tensors():
    pt = sp.sphere_polarization_tensors(scene(1.0))
    np.testing.assert_array_equal(pt.m_e, 0)
    np.testing.assert_array_equal(pt.m_h, 0)


def test_eps_four_times_host():
    s = scene(4.0, r=1.5)
    pt = sp.sphere_polarization_tensors(s)
    assert sp.contrast(4.0, 1.0) == pytest.approx(5 / 6, rel=1e-15)
    np.testing.assert_allclose(pt.m_e, 1.5 * s.volume * np.eye(3), rtol=1e-12)


def test_magnetic_tensor():
    s = scene(1.0)
    lam_mu = sp.contrast(3.0, 1.0)
    pt = sp.sphere_polarization_tensors(s, lam_mu)
    np.testing.assert_allclose(pt.m_h, 3 * s.volume * (3 - 1) / (3 + 2) * np.eye(3), rtol=1e-12)


def test_tensor_closed_forms_agree():
    rng = np.random.default_rng(11)
    for _ in range(100):
        eps0 = rng.uniform(0.5, 4)
        eps1 = complex(rng.normal(0, 5), rng.uniform(0, 3))
        s = scene(eps1, eps0=eps0, r=rng.uniform(0.1, 3))
        m_e = sp.sphere_polarization_tensors(s).m_e
        closed = 3 * s.volume * (eps1 - eps0) / (eps1 + 2 * eps0)
        np.testing.assert_allclose(np.diag(m_e), closed, rtol=1e-10)
        assert np.max(np.abs(m_e - np.diag(np.diag(m_e)))) <= 1e-12 * np.max(np.abs(m_e))


# --- dyadic Green function -----------------------------------------------------

mpmath.mp.dps = 40


def mp_gamma(k, x):
    r = mpmath.sqrt(sum(mpmath.mpf(c) ** 2 for c in x))
    return -mpmath.exp(1j * mpmath.mpmathify(k) * r) / (4 * mpmath.pi * r)


def fd_hessian(k, d, h):
    d = [mpmath.mpf(c) for c in d]
    h = mpmath.mpf(h)
    out = np.zeros((3, 3), dtype=complex)

    def at(di, dj, i, j):
        p = list(d)
        p[i] += di
        p[j] += dj
        return mp_gamma(k, p)

    for i in range(3):
        for j in range(3):
            if i == j:
                val = (at(h, 0, i, i) - 2 * mp_gamma(k, d) + at(-h, 0, i, i)) / h**2
            else:
                val = (at(h, h, i, j) - at(h, -h, i, j) - at(-h, h, i, j) + at(-h, -h, i, j)) / (4 * h**2)
            out[i, j] = complex(val)
    return out


@pytest.mark.parametrize("k", [2 * math.pi, 1.5 + 0.3j])
def test_hessian_against_finite_differences(k):
    rng = np.random.default_rng(5)
    for _ in range(5):
        d = rng.normal(size=3) * rng.uniform(0.3, 3)
        r = np.linalg.norm(d)
        analytic = sp.helmholtz_hessian(k, d)
        numeric = fd_hessian(k, d, 1e-5 * r)
        assert np.max(np.abs(analytic - numeric)) <= 1e-6 * np.max(np.abs(analytic))


def test_helmholtz_equation_away_from_source():
    k = 3.0
    rng = np.random.default_rng(9)
    for _ in range(5):
        d = rng.normal(size=3)
        h = 1e-3 * np.linalg.norm(d)
        lap = 0
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            lap += complex((mp_gamma(k, d + e) - 2 * mp_gamma(k, d) + mp_gamma(k, d - e)) / mpmath.mpf(h) ** 2)
        g = sp.helmholtz_fundamental(k, d)
        assert abs(lap + k**2 * g) <= 1e-4 * abs(k**2 * g)


def test_green_axis_symmetry_and_symmetry():
    g = sp.GreenParams(k=2.0, source=[0.5, 0, 0])
    tensor = sp.dyadic_green(g, [2.0, 0.0, 0.0])
    off = tensor - np.diag(np.diag(tensor))
    assert np.max(np.abs(off)) < 1e-15
    assert tensor[1, 1] == pytest.approx(tensor[2, 2], rel=1e-15)
    rng = np.random.default_rng(2)
    for _ in range(20):
        t = sp.dyadic_green(sp.GreenParams(k=1.0 + 0.1j, source=rng.normal(size=3)), rng.normal(size=3) * 4)
        assert np.max(np.abs(t - t.T)) <= 1e-12 * np.max(np.abs(t))


def test_green_source_singularity():
    with pytest.raises(SourceSingularity):
        sp.dyadic_green(sp.GreenParams(k=1.0, source=[1, 2, 3]), [1, 2, 3])


def test_curl_against_finite_differences():
    g = sp.GreenParams(k=2.5, eps_matrix=1.7, source=[0.1, -0.2, 0.3])
    x = np.array([1.3, 0.4, -0.9])
    pvec = np.array([0.3, 1.0, -0.5])
    h = 1e-5
    jac = np.zeros((3, 3), dtype=complex)  # jac[k, j] = d/dx_j (G p)_k
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        jac[:, j] = (sp.dyadic_green(g, x + e) @ pvec - sp.dyadic_green(g, x - e) @ pvec) / (2 * h)
    curl = np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])
    analytic = sp.curl_dyadic_green(g, x) @ pvec
    assert np.max(np.abs(curl - analytic)) <= 1e-6 * np.max(np.abs(analytic))


# --- far field -----------------------------------------------------------------


def far_setup(eps1=3.0, mu_contrast=complex(math.inf, 0), delta=0.01):
    s = scene(eps1)
    g = sp.GreenParams(k=2.0, delta=delta, source=[0, 0, 0])
    pt = sp.sphere_polarization_tensors(s, mu_contrast)
    return s, g, pt


def test_far_field_vanishes_without_tensors():
    s, g, pt = far_setup(eps1=1.0)
    out = sp.far_field_scattered(s, g, pt, [1, 0, 0], [0, 1, 0], [3, 1, 2], omega=2.0)
    np.testing.assert_array_equal(out, 0)


def test_far_field_nonmagnetic_is_electric_term():
    s, g, pt = far_setup()
    x = np.array([3.0, 1.0, 2.0])
    e_in = np.array([1.0, 0.0, 0.5])
    out = sp.far_field_scattered(s, g, pt, e_in, [0, 1, 0], x, omega=2.0)
    expected = -(g.delta**3) * 4.0 * g.mu_matrix * sp.dyadic_green(g, x) @ pt.m_e @ e_in
    np.testing.assert_allclose(out, expected, rtol=1e-14)


def test_far_field_delta_cubed_scaling():
    s, g, pt = far_setup(mu_contrast=sp.contrast(2.0, 1.0))
    args = ([1, 0, 0.5], [0, 1, 0], [3, 1, 2])
    small = sp.far_field_scattered(s, g, pt, *args, omega=2.0)
    g2 = sp.GreenParams(k=g.k, delta=2 * g.delta, source=g.source)
    big = sp.far_field_scattered(s, g2, pt, *args, omega=2.0)
    np.testing.assert_array_equal(big, 8 * small)
