import numpy as np
import pytest

from gcdeform.brackets import Multivector
from gcdeform.deformation import (Deformation, PreconditionError, form_to_E3,
                                  make_test_deformation)
from gcdeform.forms import OneForm
from gcdeform.gauge_solver import (GaugeTrace, NonConvergenceError, SolverConfig,
                                   DeformedOperators, deformed_green, gauge_fix,
                                   lemma_targets, nash_moser_gauge_fix, newton_gauge_fix,
                                   phi_map, quadratic_identity_residual)
from gcdeform.gt_algebra import HolPoissonBase
from gcdeform.hodge import dbar_star, form02, green, harmonic, l2_norm
from gcdeform.spectral_fields import SpectralField, TorusGeometry, c0, random_bandlimited


def _const_E2(geo, size, seed=0):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    E2 = np.zeros((2, 2) + geo.shape, complex)
    E2[..., 0, 0, 0, 0] = size * M / np.max(np.abs(M))
    return E2


def _mode01(geo):
    c = np.zeros(geo.shape, complex)
    c[1, 0, 1, 0] = 1.0
    return Multivector(geo, {(2,): c})


@pytest.fixture(scope="module")
def standard():
    geo = TorusGeometry(2, 8, 2)
    base = HolPoissonBase(2, [1.0])
    u = random_bandlimited(geo, 11, (2,), bandwidth=1, amplitude=0.05).coef
    return geo, base, make_test_deformation(OneForm.from_01(geo, u).d(), base)


def test_config_validation():
    for kw in ({"method": "bogus"}, {"t0": 1.0}, {"tol": 0.0}, {"schedule_exponent": 2.0},
               {"max_iter": -1}):
        with pytest.raises(ValueError):
            SolverConfig(**kw)
    assert SolverConfig(method="nash-moser").method == "nash_moser"


def test_deformed_green_undeformed(geo2):
    phi = _mode01(geo2)
    E2 = np.zeros((2, 2) + geo2.shape, complex)
    r = deformed_green(E2, phi)
    assert (r.u - green(phi)).is_zero()
    assert (r.harmonic - harmonic(phi)).is_zero()


def test_deformed_green_residual(geo2):
    E2 = _const_E2(geo2, 0.02)
    phi = _mode01(geo2)
    r = deformed_green(E2, phi)
    ops = DeformedOperators(geo2, E2)
    res = ops.laplacian(r.u) - (phi - r.harmonic)
    assert l2_norm(res) < 1e-10


def test_deformed_green_contraction_linear(geo2):
    phi = _mode01(geo2)
    cs = [deformed_green(_const_E2(geo2, e), phi).contraction for e in (0.01, 0.02, 0.04)]
    slope = np.polyfit(np.log([0.01, 0.02, 0.04]), np.log(cs), 1)[0]
    assert abs(slope - 1.0) < 0.15


def test_deformed_green_precondition(geo2):
    with pytest.raises(PreconditionError):
        deformed_green(_const_E2(geo2, 3.0), _mode01(geo2))


def test_phi_zero_eps3(standard):
    geo, base, eps = standard
    e = Deformation(geo, eps.E1, eps.E2, 0)
    assert phi_map(e).sup() == 0.0


def test_phi_undeformed(standard):
    geo, base, eps = standard
    e = Deformation(geo, 0, 0, eps.E3)
    from gcdeform.deformation import eps3_form
    u = dbar_star(green(eps3_form(eps.E3, geo)))
    v = np.stack([u.component((2 + k,)) for k in range(2)])
    want = OneForm.from_01(geo, -v)
    got = phi_map(e)
    assert (got - want).sup() < 1e-15


def test_phi_real(standard):
    geo, base, eps = standard
    assert phi_map(eps).reality_defect() < 1e-12


def test_newton_zero(geo2, base2):
    r = newton_gauge_fix(Deformation.zero(geo2), base2)
    assert r.trace.converged and r.trace.iterations == 0


def test_newton_harmonic_eps3_one_step(geo2):
    base = HolPoissonBase.zero(2)
    E3 = form_to_E3(form02(geo2, 0.01 - 0.02j))
    r = newton_gauge_fix(Deformation(geo2, 0, 0, E3), base)
    assert r.trace.iterations == 1
    assert max(r.eps.c0()) == 0.0


def test_nash_moser_zero(geo2, base2):
    r = nash_moser_gauge_fix(Deformation.zero(geo2), base2)
    assert r.trace.converged and r.trace.iterations == 0
    assert r.trace.xi_total.sup() == 0.0


def test_newton_standard(standard):
    geo, base, eps = standard
    r = newton_gauge_fix(eps, base)
    tr = r.trace
    assert tr.converged and tr.iterations <= 8
    assert tr.final["eps3_c0"] < 1e-10
    assert tr.rows[-1] is tr.final_row
    assert [row["iter"] for row in tr.rows] == list(range(1, tr.iterations + 1))
    # the output is exactly the accumulated transform of the input
    from gcdeform.deformation import b_field_action
    assert b_field_action(eps, tr.B_total(), base).max_diff(r.eps) < 1e-14
    assert quadratic_identity_residual(r.eps) < 1e-10


def test_nash_moser_without_smoothing_matches_newton(standard):
    geo, base, eps = standard
    a = newton_gauge_fix(eps, base)
    b = nash_moser_gauge_fix(eps, base, SolverConfig(method="nash_moser", smoothing_enabled=False))
    assert b.trace.converged
    assert c0(SpectralField(geo, a.eps.E3 - b.eps.E3)) < 1e-8


def test_nash_moser_standard(standard):
    geo, base, eps = standard
    r = gauge_fix(eps, base, SolverConfig(method="nash_moser"))
    tr = r.trace
    assert tr.converged
    assert tr.final["eps3_c0"] < 1e-10
    ts = tr.column("t_i")
    assert ts[0] == pytest.approx(2.0 ** 1.5)
    assert np.all(ts[1:] >= ts[:-1])
    assert len(lemma_targets(tr, SolverConfig(method="nash_moser"))) == tr.iterations + 1


def test_non_convergence(standard):
    geo, base, eps = standard
    with pytest.raises(NonConvergenceError) as e:
        newton_gauge_fix(eps, base, SolverConfig(max_iter=1))
    assert e.value.result.trace.iterations == 1


def test_eps2_precondition(standard):
    geo, base, eps = standard
    with pytest.raises(PreconditionError):
        newton_gauge_fix(eps, base, SolverConfig(eps2_max=1e-3))


def test_empty_trace_columns():
    t = GaugeTrace()
    assert t.iterations == 0 and t.final_row is None
    assert t.column("eps3_c0").size == 0
