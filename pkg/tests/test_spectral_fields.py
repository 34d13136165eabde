import numpy as np
import pytest

from gcdeform.spectral_fields import (Collocation, SpectralField, TorusGeometry, bandwidth,
                                      c0, ck_norm, constant, derivative, from_padded, is_real,
                                      norms, product, random_bandlimited, read_snapshot, sample,
                                      sobolev_norm, synthesize, to_padded, write_snapshot)


def _mode(geo, k, amp=1.0):
    x = geo.coords()
    phase = sum(kk * xx for kk, xx in zip(k, x))
    return synthesize(amp * np.exp(2j * np.pi * phase), geo)


def test_geometry_validation():
    for args in ((3, 8, 2), (2, 6, 2), (2, 8, 3), (2, 8, 0)):
        with pytest.raises(ValueError):
            TorusGeometry(*args)


def test_constant_has_single_coefficient(geo2):
    f = synthesize(np.full(geo2.shape, 2.5 - 1j), geo2)
    assert np.isclose(f.coef[0, 0, 0, 0], 2.5 - 1j, atol=1e-15)
    f.coef[0, 0, 0, 0] = 0
    assert np.max(np.abs(f.coef)) < 1e-15


def test_plane_wave_single_coefficient(geo2):
    f = _mode(geo2, (1, 0, 0, 0))
    assert np.isclose(f.coef[1, 0, 0, 0], 1.0, atol=1e-15)
    f.coef[1, 0, 0, 0] = 0
    assert np.max(np.abs(f.coef)) < 1e-15


def test_round_trip(geo2):
    f = random_bandlimited(geo2, 3, (2,))
    g = synthesize(sample(f), geo2)
    assert np.max(np.abs(g.coef - f.coef)) < 1e-13


def test_derivative_of_constant(geo2):
    f = constant(geo2, 3.0)
    for d in ("z1", "zbar1", "z2", "zbar2"):
        assert np.max(np.abs(derivative(f, d).coef)) == 0


def test_dzbar_of_plane_wave(geo1):
    f = _mode(geo1, (1, 0))
    d = derivative(f, "zbar1")
    assert np.max(np.abs(d.coef - np.pi * 1j * f.coef)) < 1e-13


def test_dzbar_finite_difference_order(geo1):
    # dzbar = (d_x + i d_y) / 2 against central differences of the exact function
    fn = lambda x, y: np.exp(2j * np.pi * (x + 2 * y))
    f = synthesize(fn(*geo1.coords()), geo1)
    exact = sample(derivative(f, "zbar1"))[3, 5]
    x, y = 3 / 16, 5 / 16
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        fd = 0.5 * ((fn(x + h, y) - fn(x - h, y)) + 1j * (fn(x, y + h) - fn(x, y - h))) / (2 * h)
        errs.append(abs(fd - exact))
    r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
    assert 3.8 < r1 < 4.2 and 3.8 < r2 < 4.2


def test_dz_kills_only_constants(geo2):
    m = np.abs(geo2.dz(0)) + np.abs(geo2.dz(1))
    assert m[0, 0, 0, 0] == 0
    assert np.count_nonzero(m == 0) == 1


def test_derivative_bad_direction(geo1):
    f = constant(geo1, 1.0)
    with pytest.raises(ValueError):
        derivative(f, "z2")
    with pytest.raises(ValueError):
        derivative(f, ("w", 0))


def test_product_with_one(geo2):
    f = random_bandlimited(geo2, 5)
    g = product(f, constant(geo2, 1.0))
    assert np.max(np.abs(g.coef - f.coef)) < 1e-15


def test_product_of_plane_waves(geo2):
    e = _mode(geo2, (1, 0, 0, 0))
    p = product(e, e)
    assert np.isclose(p.coef[2, 0, 0, 0], 1.0, atol=1e-14)
    p.coef[2, 0, 0, 0] = 0
    assert np.max(np.abs(p.coef)) < 1e-14


def test_product_equals_padded_grid_product(geo2):
    f = random_bandlimited(geo2, 6)
    g = random_bandlimited(geo2, 7)
    want = from_padded(to_padded(f.coef, geo2) * to_padded(g.coef, geo2), geo2)
    assert np.max(np.abs(product(f, g).coef - want)) < 1e-13


def test_product_exact_convolution():
    geo = TorusGeometry(1, 8, 2)
    f = random_bandlimited(geo, 8, bandwidth=1)
    g = random_bandlimited(geo, 9, bandwidth=1)
    ks = np.fft.fftfreq(8, 1 / 8).astype(int)
    want = np.zeros(geo.shape, complex)
    for a in range(8):
        for b in range(8):
            for c in range(8):
                for d in range(8):
                    k = ((ks[a] + ks[c]) % 8, (ks[b] + ks[d]) % 8)
                    want[k] += f.coef[a, b] * g.coef[c, d]
    assert np.max(np.abs(product(f, g).coef - want)) < 1e-15


def test_product_contraction(geo2):
    A = random_bandlimited(geo2, 1, (2, 2), bandwidth=1)
    v = random_bandlimited(geo2, 2, (2,), bandwidth=1)
    got = product(A, v, "ab,b->a")
    want = product(A[:, 0], v[0]).coef + product(A[:, 1], v[1]).coef
    assert np.max(np.abs(got.coef - want)) < 1e-15
    with pytest.raises(ValueError):
        product(A, v, "abc,b->a")


def test_collocation_exact_and_padded_agree(geo2):
    f = random_bandlimited(geo2, 10, bandwidth=1)
    g = random_bandlimited(geo2, 11, bandwidth=1)
    col = Collocation(geo2, 2)
    assert col.exact and col.M == 6
    fast = col.back(col.to(f.coef) * col.to(g.coef))
    slow = from_padded(to_padded(f.coef, geo2) * to_padded(g.coef, geo2), geo2)
    assert np.max(np.abs(fast - slow)) < 1e-15


def test_bandwidth(geo2):
    assert bandwidth(random_bandlimited(geo2, 1, bandwidth=1).coef, geo2) == 1
    assert bandwidth(np.zeros(geo2.shape), geo2) == 0


def test_norms_of_constant(geo2):
    c = 0.3 - 0.4j
    rep = norms(constant(geo2, c), 3)
    for k in range(4):
        assert np.isclose(rep.ck[k], abs(c), atol=1e-15)
    assert np.isclose(rep.sobolev[0], abs(c), atol=1e-15)


def test_sobolev_single_mode(geo2):
    f = _mode(geo2, (0, 2, 0, 0))
    for k in range(4):
        assert np.isclose(sobolev_norm(f, k), (1 + 4 * np.pi ** 2 * 4) ** (k / 2), rtol=1e-13)


def test_ck_norm_of_plane_wave(geo2):
    f = _mode(geo2, (1, 0, 0, 0))
    assert np.isclose(ck_norm(f, 2), (2 * np.pi) ** 2, rtol=1e-13)


def test_sobolev_interpolation(geo2):
    # log-convexity in s gives the inequality with constant 1 for L^2 Sobolev norms
    worst = 0.0
    for s in range(200):
        f = random_bandlimited(geo2, 1000 + s)
        for k, l, m in ((0, 1, 2), (0, 2, 4), (1, 2, 3), (0, 1, 4)):
            th = (m - l) / (m - k)
            r = sobolev_norm(f, l) / (sobolev_norm(f, k) ** th * sobolev_norm(f, m) ** (1 - th))
            worst = max(worst, r)
    assert np.isfinite(worst) and worst <= 1 + 1e-12


def test_random_bandlimited_deterministic(geo2):
    a = random_bandlimited(geo2, 42, (2,))
    b = random_bandlimited(geo2, 42, (2,))
    assert np.array_equal(a.coef, b.coef)


def test_random_bandlimited_zero_amplitude(geo2):
    assert not np.any(random_bandlimited(geo2, 1, amplitude=0.0).coef)


def test_random_bandlimited_real_and_bounded(geo2):
    f = random_bandlimited(geo2, 3, (3,), amplitude=0.2, real=True)
    assert is_real(f)
    assert np.max(np.abs(sample(f).imag)) < 1e-15
    assert c0(f) <= 0.2 + 1e-15
    assert bandwidth(f.coef, geo2) <= geo2.K


def test_random_bandlimited_rejects_large_band(geo2):
    with pytest.raises(ValueError):
        random_bandlimited(geo2, 1, bandwidth=geo2.K + 1)


def test_snapshot_round_trip(tmp_path, geo2):
    f = random_bandlimited(geo2, 4, (2, 2))
    p = tmp_path / "f.csv"
    write_snapshot(f, p)
    g = read_snapshot(p, geo2, (2, 2))
    assert np.array_equal(f.coef, g.coef)
    assert p.read_text().splitlines()[0] == "component,k1,k2,k3,k4,re,im"


def test_field_arithmetic_checks_geometry(geo2, geo1):
    with pytest.raises(ValueError):
        constant(geo2, 1.0) + constant(geo1, 1.0)
    with pytest.raises(ValueError):
        SpectralField(geo2, np.zeros((3, 3)))
