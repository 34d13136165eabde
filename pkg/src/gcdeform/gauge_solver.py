"""
Holomorphic gauge fixing: remove eps3 by exact closed two-form transforms.

Two loops are provided.

newton      the implicit-function loop with the undeformed Green operator:
            h = H(eps3), u = dbar* G eps3, B = s(-h) + d(-u - conj u)
nash_moser  xi = S_t Phi(eps) with the deformed Green operator and a harmonic
            correction s(-c), t_{i+1} = t_i^{3/2}

Both accumulate the applied transforms, so the output is exactly
e^{B_total} . eps_input with B_total = B_harm_total + d(xi_total).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .brackets import Multivector
from .deformation import (Deformation, POLY_SIGN, PreconditionError, _compose,
                          b_field_action, eps3_form, form_to_E3, mc_residual)
from .forms import OneForm, TwoForm
from .hodge import (dbar, dbar_star, green, harmonic, harmonic_splitting,
                    l2_inner, smoothing)
from .spectral_fields import (SpectralField, c0, conj_coef, from_grid,
                              from_padded, sobolev_norm, to_grid, to_padded)

TRACE_COLUMNS = ["iter", "t_i", "eps1_c0", "eps2_c0", "eps3_c0", "eps3_sobolev_l",
                 "xi_norm", "harmonic_mag", "mc_residual"]


class NonConvergenceError(RuntimeError):
    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass
class SolverConfig:
    method: str = "newton"
    t0: float = 2.0
    schedule_exponent: float = 1.5
    tol: float = 1e-10
    max_iter: int = 20
    smoothing_enabled: bool = True
    green_tol: float = 1e-13
    green_max_iter: int = 200
    monitor_orders: list = field(default_factory=lambda: [0, 1, 2])
    sobolev_l: int = 2
    eps2_max: float = 0.5
    # constants of the convergence proof, reported only
    a: int | None = None
    b0: int | None = None
    l: int | None = None
    delta0: float | None = None

    def __post_init__(self):
        if self.method not in ("newton", "nash_moser", "nash-moser"):
            raise ValueError(f"unknown method {self.method!r}")
        self.method = self.method.replace("-", "_")
        if not self.t0 > 1:
            raise ValueError("t0 must exceed 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.schedule_exponent != 1.5:
            raise ValueError("the schedule exponent is fixed at 3/2")
        if self.max_iter < 0 or self.green_max_iter < 1:
            raise ValueError("iteration limits must be positive")

    @property
    def B_const(self):
        return None if self.b0 is None else 11 + 2 * self.b0

    def paper_constants(self):
        return {"a": self.a, "b0": self.b0, "B": self.B_const, "l": self.l,
                "delta0": self.delta0}


@dataclass
class GaugeTrace:
    """rows[k-1] holds eps^(k) after k corrections, with the norms of the correction
    that produced it; initial_row holds the input eps^(0)."""
    rows: list = field(default_factory=list)
    initial_row: dict | None = None
    xi_total: OneForm | None = None
    B_harm_total: TwoForm | None = None
    converged: bool = False
    flags: list = field(default_factory=list)
    final: dict = field(default_factory=dict)

    @property
    def iterations(self):
        return len(self.rows)

    @property
    def final_row(self):
        return self.rows[-1] if self.rows else self.initial_row

    def B_total(self):
        return self.B_harm_total + self.xi_total.d()

    def column(self, name):
        return np.array([r[name] for r in self.rows], dtype=float)


@dataclass
class GaugeResult:
    eps: Deformation
    trace: GaugeTrace


# deformed operators on scalar (0,q) forms ------------------------------------------------

def _alpha(E2):
    """Coefficients a[j][k] of alpha_j = sum_k a[j][k] dzbar^k (eps2 = sum alpha_j ^ d_j)."""
    return -POLY_SIGN * np.swapaxes(E2, 0, 1)


class DeformedOperators:
    """dbar_{eps2}, its flat L^2 adjoint and Laplacian, with padded coefficients cached."""

    def __init__(self, geometry, E2):
        self.geometry = geometry
        self.E2 = E2
        n = geometry.n
        a = _alpha(E2)
        self._a = [[to_padded(a[j, k], geometry) for k in range(n)] for j in range(n)]
        self._abar = [[np.conj(x) for x in row] for row in self._a]

    def dbar(self, b):
        geo = self.geometry
        n = geo.n
        from .brackets import wedge_monomials
        acc = {}
        for mono, c in b.terms.items():
            for j in range(n):
                dj = to_padded(c * geo.dz(j), geo)
                for k in range(n):
                    s, m = wedge_monomials((n + k,), mono)
                    if s:
                        acc[m] = acc.get(m, 0) + s * self._a[j][k] * dj
        extra = Multivector(geo, {m: from_padded(v, geo) for m, v in acc.items()})
        return dbar(b) + extra

    def dbar_star(self, g):
        """Adjoint: dbar* g - sum_j dbar_j(2 sum_k conj(a_jk) i_k g)."""
        from .hodge import contract_dzbar
        geo = self.geometry
        n = geo.n
        acc = {}
        for mono, c in g.terms.items():
            cp = None
            for k in range(n):
                s, rest = contract_dzbar(k, mono, n)
                if not s:
                    continue
                if cp is None:
                    cp = to_padded(c, geo)
                for j in range(n):
                    acc.setdefault((rest, j), 0)
                    acc[(rest, j)] = acc[(rest, j)] + 2.0 * s * self._abar[j][k] * cp
        out = {}
        for (rest, j), v in acc.items():
            out[rest] = out.get(rest, 0) - from_padded(v, geo) * geo.dzbar(j)
        return dbar_star(g) + Multivector(geo, out)

    def laplacian(self, b):
        return self.dbar(self.dbar_star(b)) + self.dbar_star(self.dbar(b))


@dataclass
class GreenResult:
    u: Multivector
    harmonic: Multivector
    residual: float
    iterations: int
    contraction: float


def _mv_sup(a):
    return a.sup() if a.terms else 0.0


def deformed_green(E2, phi, cfg=None, projection="oblique", ops=None):
    """Solve Delta_{eps2} u = phi - H_{eps2} phi by G_0-preconditioned fixed point.

    projection='oblique' takes H_{eps2} phi as the constant c with
    phi - c in the range of Delta_{eps2}; 'orthogonal' projects onto the
    tracked kernel of Delta_{eps2} instead.
    """
    cfg = cfg or SolverConfig()
    geo = phi.geometry
    ops = ops or DeformedOperators(geo, E2)
    if projection == "orthogonal":
        kern = deformed_kernel(E2, phi, cfg, ops)
        hphi = Multivector(geo, {})
        for h in kern:
            hphi = hphi + (l2_inner(phi, h) / l2_inner(h, h)) * h
        res = deformed_green(E2, phi - hphi, cfg, "oblique", ops)
        return GreenResult(res.u, hphi + res.harmonic, res.residual, res.iterations,
                           res.contraction)
    u = green(phi)
    if np.max(np.abs(E2)) == 0:
        return GreenResult(u, harmonic(phi), 0.0, 0, 0.0)
    scale = max(1.0, _mv_sup(phi))
    Lu = ops.laplacian(u)
    last_step = None
    contraction = 0.0
    best = math.inf
    growth = 0
    for it in range(1, cfg.green_max_iter + 1):
        c = harmonic(phi - Lu)
        resid = _mv_sup(Lu - (phi - c))
        if resid < cfg.green_tol * scale:
            return GreenResult(u, c, resid, it - 1, contraction)
        if resid > best:
            growth += 1
            if growth > 5:
                break
        best = min(best, resid)
        u_new = green(phi - (Lu - _lap0(u)))
        step = _mv_sup(u_new - u)
        if last_step:
            contraction = step / last_step
        last_step = step
        u = u_new
        Lu = ops.laplacian(u)
    raise PreconditionError(
        f"deformed Green iteration did not contract (residual {resid:.3g}, factor {contraction:.3g});"
        " eps2 too large")


def _lap0(u):
    from .hodge import laplacian
    return laplacian(u)


def deformed_kernel(E2, like, cfg, ops):
    """Kernel of Delta_{eps2} on the degree of ``like``, tracked from the constants."""
    from .brackets import bidegree
    import itertools
    geo = like.geometry
    n = geo.n
    q = bidegree(next(iter(like.terms)), n)[1] if like.terms else 0
    out = []
    for js in itertools.combinations(range(n), q):
        e = Multivector(geo, {tuple(n + j for j in js): 1.0})
        res = deformed_green(E2, -1.0 * ops.laplacian(e), cfg, "oblique", ops)
        out.append(e + res.u)
    return out


# Phi map -----------------------------------------------------------------------------------

def _form01_coefs(mv, n, geo):
    return np.stack([mv.terms.get((n + k,), np.zeros(geo.shape, complex)) for k in range(n)])


def phi_map(eps, cfg=None, projection="oblique", return_parts=False):
    """Phi(eps) = -eta - (1 + eps2)(1 - conj(eps2) eps2)^{-1}(conj(eta) + conj(eps2) eta).

    eta = dbar*_{eps2} N_{eps2} eps3.  Returns a real OneForm (and, with
    return_parts, eta and the harmonic part of eps3 used by N).
    """
    cfg = cfg or SolverConfig()
    geo = eps.geometry
    n = geo.n
    ops = DeformedOperators(geo, eps.E2)
    e3 = eps3_form(eps.E3, geo)
    gr = deformed_green(eps.E2, e3, cfg, projection, ops)
    eta_mv = ops.dbar_star(gr.u)
    eta = _form01_coefs(eta_mv, n, geo)
    # pointwise algebra on the grid
    E = np.moveaxis(to_grid(eps.E2, geo).reshape(n, n, -1), -1, 0)
    h = np.moveaxis(to_grid(eta, geo).reshape(n, -1), -1, 0)[..., None]
    Ec = np.conj(E)
    M = np.eye(n) - Ec @ E
    if np.min(np.abs(np.linalg.det(M))) < 1e-8:
        raise PreconditionError("1 - conj(eps2) eps2 is singular; eps2 too large")
    zeta = np.linalg.solve(M, np.conj(h) + Ec @ h)
    a = -zeta
    b = -h - E @ zeta
    back = lambda v: from_grid(np.moveaxis(v[..., 0], 0, -1).reshape((n,) + geo.shape), geo)
    xi = OneForm(geo, back(a), back(b))
    if return_parts:
        return xi, eta_mv, gr
    return xi


# loops ------------------------------------------------------------------------------------

def _harmonic_coef(eps):
    """Constant part of eps3 as a (0,2) multivector."""
    return harmonic(eps3_form(eps.E3, eps.geometry))


def _row(i, t, eps, base, cfg, xi_norm, harm):
    geo = eps.geometry
    e1, e2, e3 = eps.c0()
    return {
        "iter": i, "t_i": t, "eps1_c0": e1, "eps2_c0": e2, "eps3_c0": e3,
        "eps3_sobolev_l": sobolev_norm(eps.eps3, cfg.sobolev_l),
        "xi_norm": xi_norm, "harmonic_mag": harm,
        "mc_residual": mc_residual(eps, base).max,
        "eps_sobolev_l": max(sobolev_norm(f, cfg.sobolev_l) for f in (eps.eps1, eps.eps2, eps.eps3)),
        "eps_sobolev_2l": max(sobolev_norm(f, 2 * cfg.sobolev_l) for f in (eps.eps1, eps.eps2, eps.eps3)),
    }


def _check_pre(eps, cfg):
    e2 = c0(eps.eps2)
    if e2 >= cfg.eps2_max:
        raise PreconditionError(f"|eps2|_0 = {e2:.3g} exceeds the configured bound {cfg.eps2_max}")


def quadratic_identity_residual(eps):
    """sup of eps3 + dbar* G [eps2, eps3]; zero on a holomorphic gauge."""
    from .brackets import graded_bracket
    from .hodge import eps2_multivector
    geo = eps.geometry
    e3 = eps3_form(eps.E3, geo)
    r = e3 + dbar_star(green(graded_bracket(eps2_multivector(geo, eps.E2), e3)))
    return _mv_sup(r)


def _finish(eps_in, eps, trace, base, cfg, name):
    fr = trace.final_row
    trace.final = {
        "eps3_c0": fr["eps3_c0"],
        "quadratic_identity_residual": quadratic_identity_residual(eps),
        "mc_residual": fr["mc_residual"],
        "iterations": trace.iterations,
        "B_total_sup": trace.B_total().sup(),
    }
    res = GaugeResult(eps, trace)
    if not trace.converged:
        raise NonConvergenceError(f"{name} did not converge in {cfg.max_iter} iterations", res)
    return res


def _pair_c1(u):
    from .spectral_fields import ck_norm
    return max((ck_norm(SpectralField(u.geometry, c), 1) for c in u.terms.values()), default=0.0)


def newton_gauge_fix(eps, base, cfg=None):
    cfg = cfg or SolverConfig(method="newton")
    geo = eps.geometry
    _check_pre(eps, cfg)
    trace = GaugeTrace(xi_total=OneForm.zero(geo), B_harm_total=TwoForm.zero(geo))
    trace.initial_row = _row(0, float("nan"), eps, base, cfg, 0.0, 0.0)
    eps_in = eps
    i = 0
    while True:
        e3 = eps3_form(eps.E3, geo)
        h = harmonic(e3)
        u = dbar_star(green(e3))
        hmag = _mv_sup(h)
        # |h|_0 + 2 |u|_{C^1} dominates |eps3|_0 = |h + dbar u|_0
        if hmag + 2.0 * _pair_c1(u) < cfg.tol:
            trace.converged = True
            break
        if i == cfg.max_iter:
            break
        Bh = harmonic_splitting(-1.0 * h) if geo.n >= 2 else TwoForm.zero(geo)
        xi = OneForm.from_01(geo, -1.0 * _form01_coefs(u, geo.n, geo))
        eps = b_field_action(eps, Bh + xi.d(), base)
        trace.xi_total = trace.xi_total + xi
        trace.B_harm_total = trace.B_harm_total + Bh
        i += 1
        trace.rows.append(_row(i, float("nan"), eps, base, cfg, xi.sup(), hmag))
    return _finish(eps_in, eps, trace, base, cfg, "newton")


def _next_t(t, cfg):
    # past 1e100 the cutoff keeps every grid mode anyway
    return t ** cfg.schedule_exponent if t < 1e100 else math.inf


def nash_moser_gauge_fix(eps, base, cfg=None):
    cfg = cfg or SolverConfig(method="nash_moser")
    geo = eps.geometry
    _check_pre(eps, cfg)
    trace = GaugeTrace(xi_total=OneForm.zero(geo), B_harm_total=TwoForm.zero(geo))
    t = cfg.t0
    trace.initial_row = _row(0, t, eps, base, cfg, 0.0, 0.0)
    eps_in = eps
    e30 = c0(eps.eps3)
    i = 0
    while True:
        if c0(eps.eps3) < cfg.tol:
            trace.converged = True
            break
        if i == cfg.max_iter:
            break
        xi_full, _, gr = phi_map(eps, cfg, return_parts=True)
        xi = smoothing(t, xi_full) if cfg.smoothing_enabled else xi_full
        c = gr.harmonic
        Bh = harmonic_splitting(-1.0 * c) if geo.n >= 2 else TwoForm.zero(geo)
        eps = b_field_action(eps, Bh + xi.d(), base)
        trace.xi_total = trace.xi_total + xi
        trace.B_harm_total = trace.B_harm_total + Bh
        i += 1
        t = _next_t(t, cfg)
        row = _row(i, t, eps, base, cfg, xi.sup(), _mv_sup(c))
        trace.rows.append(row)
        # decay target |eps3^(i)|_0 <= |eps3^(0)|_0 / t_i
        if row["eps3_c0"] > e30 / t:
            trace.flags.append(f"iter {i}: |eps3|_0 = {row['eps3_c0']:.3g} above "
                               f"|eps3^(0)|_0 / t_i = {e30 / t:.3g}")
    return _finish(eps_in, eps, trace, base, cfg, "nash_moser")


def gauge_fix(eps, base, cfg=None):
    cfg = cfg or SolverConfig()
    if cfg.method == "newton":
        return newton_gauge_fix(eps, base, cfg)
    return nash_moser_gauge_fix(eps, base, cfg)


def lemma_targets(trace, cfg, delta0=1.0, B_exp=None):
    """Monitored quantities next to the decay targets of the convergence lemma."""
    out = []
    rows = ([trace.initial_row] if trace.initial_row else []) + trace.rows
    for r in rows:
        t = r["t_i"]
        i = r["iter"]
        out.append({
            "iter": i,
            "eps_l": r["eps_sobolev_l"], "target_eps_l": delta0 * (i + 1) / (i + 2),
            "eps_2l": r["eps_sobolev_2l"], "target_eps_2l": t ** B_exp if B_exp else float("nan"),
            "eps3_l": r["eps3_sobolev_l"], "target_eps3_l": 1.0 / t,
            "xi": r["xi_norm"], "target_xi": t ** -0.5,
        })
    return out
