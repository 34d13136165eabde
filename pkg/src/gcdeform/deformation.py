"""
Deformations eps = eps1 + eps2 + eps3 of a holomorphic Poisson torus and the
action of closed two-forms on them.

Each component is stored as a field of n x n endomorphisms:

    E1 : T*^{1,0} -> T^{1,0}    (skew)
    E2 : T*^{1,0} -> T*^{0,1}
    E3 : T^{0,1}  -> T*^{0,1}   (skew)

with E[a, b] the a-th component of the image of the b-th basis element, and
coefficient arrays of shape (n, n) + grid.  Isotropy forces eps2 to act on
T^{0,1} as -E2^T.  The base bivector sigma acts as the constant map S.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .brackets import (Multivector, bidegree, bivector_from_blocks,
                       blocks_from_bivector, dbar_mv, graded_bracket,
                       sigma_multivector)
from .forms import OneForm, TwoForm
from .spectral_fields import (SpectralField, c0, from_grid, from_padded,
                              read_snapshot, to_grid, to_padded, write_snapshot)

# Sign relating endomorphisms to polyvectors: C = POLY_SIGN * E^T blockwise.
POLY_SIGN = 1.0
RCOND_MIN = 1e-8


class PreconditionError(ValueError):
    """An operation's smallness or invertibility precondition failed."""


def _sw(a):
    return np.swapaxes(a, 0, 1)


def polyvector_blocks(E1, E2, E3, n):
    """Blocks (C11, C12, C22) of the polyvector attached to endomorphism fields."""
    f = lambda E: None if E is None else POLY_SIGN * _sw(E)
    return f(E1), f(E2), f(E3)


def endomorphism_blocks(C11, C12, C22):
    f = lambda C: POLY_SIGN * _sw(C)
    return f(C11), f(C12), f(C22)


@dataclass
class Deformation:
    geometry: object
    E1: np.ndarray
    E2: np.ndarray
    E3: np.ndarray

    def __post_init__(self):
        shp = (self.geometry.n, self.geometry.n) + self.geometry.shape
        self.E1 = np.broadcast_to(np.asarray(self.E1, complex), shp).copy()
        self.E2 = np.broadcast_to(np.asarray(self.E2, complex), shp).copy()
        self.E3 = np.broadcast_to(np.asarray(self.E3, complex), shp).copy()

    @classmethod
    def zero(cls, geometry):
        return cls(geometry, 0, 0, 0)

    @property
    def n(self):
        return self.geometry.n

    def __add__(self, o):
        return Deformation(self.geometry, self.E1 + o.E1, self.E2 + o.E2, self.E3 + o.E3)

    def __sub__(self, o):
        return Deformation(self.geometry, self.E1 - o.E1, self.E2 - o.E2, self.E3 - o.E3)

    def copy(self):
        return Deformation(self.geometry, self.E1, self.E2, self.E3)

    @property
    def eps1(self):
        return SpectralField(self.geometry, self.E1, "eps1")

    @property
    def eps2(self):
        return SpectralField(self.geometry, self.E2, "eps2")

    @property
    def eps3(self):
        return SpectralField(self.geometry, self.E3, "eps3")

    def c0(self):
        return c0(self.eps1), c0(self.eps2), c0(self.eps3)

    def skew_defect(self):
        return max(float(np.max(np.abs(self.E1 + _sw(self.E1)))),
                   float(np.max(np.abs(self.E3 + _sw(self.E3)))))

    def polyvector(self):
        C11, C12, C22 = polyvector_blocks(self.E1, self.E2, self.E3, self.n)
        return bivector_from_blocks(self.geometry, C11, C12, C22)

    def part(self, k):
        """eps_k as a polyvector."""
        E = [None, None, None]
        E[k - 1] = (self.E1, self.E2, self.E3)[k - 1]
        return bivector_from_blocks(self.geometry, *polyvector_blocks(*E, self.n))

    @classmethod
    def from_polyvector(cls, mv):
        E1, E2, E3 = endomorphism_blocks(*blocks_from_bivector(mv))
        return cls(mv.geometry, E1, E2, E3)

    def max_diff(self, o):
        return max(c0(SpectralField(self.geometry, a - b)) for a, b in
                   ((self.E1, o.E1), (self.E2, o.E2), (self.E3, o.E3)))


def eps3_form(E3, geometry):
    """(0,2) form attached to an E3-type endomorphism field."""
    return bivector_from_blocks(geometry, None, None, POLY_SIGN * _sw(E3))


def form_to_E3(mv):
    return endomorphism_blocks(*blocks_from_bivector(mv))[2]


def base_S(base, geometry=None):
    """Constant map of sigma, consistent with POLY_SIGN."""
    return POLY_SIGN * base.C.T


# Maurer-Cartan ------------------------------------------------------------------

@dataclass
class MCResidual:
    r0: Multivector
    r1: Multivector
    r2: Multivector
    r3: Multivector
    sup: dict = field(default_factory=dict)

    @property
    def max(self):
        return max(self.sup.values())


def mc_residual(eps, base):
    """The four bidegree components of dbar eps + [sigma, eps] + 1/2 [eps, eps]."""
    geo = eps.geometry
    sig = sigma_multivector(geo, base)
    e1, e2, e3 = eps.part(1), eps.part(2), eps.part(3)
    br = graded_bracket
    r0 = br(sig, e1) + 0.5 * br(e1, e1)
    r1 = dbar_mv(e1) + br(e2, e1) + br(sig, e2)
    r2 = dbar_mv(e2) + 0.5 * br(e2, e2) + br(sig + e1, e3)
    r3 = dbar_mv(e3) + br(e2, e3)
    sup = {k: r.sup() for k, r in (("r0", r0), ("r1", r1), ("r2", r2), ("r3", r3))}
    return MCResidual(r0, r1, r2, r3, sup)


def mc_full(eps, base):
    """dbar eps + [sigma, eps] + 1/2 [eps, eps] in one piece."""
    geo = eps.geometry
    e = eps.polyvector()
    return dbar_mv(e) + graded_bracket(sigma_multivector(geo, base), e) + 0.5 * graded_bracket(e, e)


# B-field action ---------------------------------------------------------------------

def _grid_blocks(arr, geo):
    """(n, n) + grid coefficients -> (P, n, n) grid samples."""
    vals = to_grid(arr, geo)
    n = arr.shape[0]
    return np.moveaxis(vals.reshape(n, n, -1), -1, 0)


def _from_grid_blocks(vals, geo):
    n = vals.shape[-1]
    arr = np.moveaxis(vals, 0, -1).reshape((n, n) + geo.shape)
    return from_grid(arr, geo)


def b_field_action(eps, B, base, rcond_min=RCOND_MIN):
    """e^B . eps for a closed real two-form B, pointwise on the grid."""
    geo = eps.geometry
    if B.geometry != geo:
        raise ValueError("deformation and two-form live on different geometries")
    S = base_S(base)
    g = lambda a: np.ascontiguousarray(_grid_blocks(a, geo))
    E1n, E2n, E3n, rcond = _kernels.bfield_apply(
        np.ascontiguousarray(S.astype(complex)), g(eps.E1), g(eps.E2), g(eps.E3),
        g(B.B20), g(B.B11), g(B.B11p), g(B.B02))
    if not rcond > rcond_min:
        raise PreconditionError(
            f"1 + B20 (sigma + eps1) is near singular (reciprocal condition {rcond:.3g})")
    return Deformation(geo, _from_grid_blocks(E1n, geo), _from_grid_blocks(E2n, geo),
                       _from_grid_blocks(E3n, geo))


def make_test_deformation(B, base):
    """An integrable deformation with a known gauge: e^B . 0."""
    return b_field_action(Deformation.zero(B.geometry), B, base)


# pointwise subspace oracle ----------------------------------------------------------------

def dirac_columns(S, E1, E2, E3):
    """Spanning columns of L_eps in the basis [T10, T01, T*10, T*01].

    Columns are parametrised by (xi in T*^{1,0}, X in T^{0,1}); leading axes batch.
    """
    n = E1.shape[-1]
    batch = np.broadcast_shapes(np.shape(S)[:-2], E1.shape[:-2])
    W = np.zeros(batch + (4 * n, 2 * n), complex)
    I = np.eye(n)
    W[..., :n, :n] = S + E1
    W[..., :n, n:] = -_swl(E2)
    W[..., n:2 * n, n:] = I
    W[..., 2 * n:3 * n, :n] = I
    W[..., 3 * n:, :n] = E2
    W[..., 3 * n:, n:] = E3
    return W


def _swl(a):
    return np.swapaxes(a, -1, -2)


def apply_b_columns(W, B20, B11, B11p, B02):
    n = B20.shape[-1]
    W = W.copy()
    X10, X01 = W[..., :n, :].copy(), W[..., n:2 * n, :].copy()
    W[..., 2 * n:3 * n, :] += B20 @ X10 + B11p @ X01
    W[..., 3 * n:, :] += B11 @ X10 + B02 @ X01
    return W


def extract_graph(W, S):
    """Re-extract (E1, E2, E3) from a spanning set, plus the isotropy defect."""
    n = W.shape[-1] // 2
    A = np.concatenate([W[..., 2 * n:3 * n, :], W[..., n:2 * n, :]], axis=-2)
    G = W @ np.linalg.inv(A)
    E1 = G[..., :n, :n] - S
    E2 = G[..., 3 * n:, :n]
    E3 = G[..., 3 * n:, n:]
    iso = float(np.max(np.abs(G[..., :n, n:] + _swl(E2))))
    return E1, E2, E3, iso


def subspace_oracle_pointwise(S, E1, E2, E3, B20, B11, B11p, B02):
    W = apply_b_columns(dirac_columns(S, E1, E2, E3), B20, B11, B11p, B02)
    return extract_graph(W, S)


def b_field_action_oracle(eps, B, base):
    """The same action computed through the spanning-set oracle."""
    geo = eps.geometry
    S = base_S(base)
    blocks = [_grid_blocks(a, geo) for a in (eps.E1, eps.E2, eps.E3, B.B20, B.B11, B.B11p, B.B02)]
    e1, e2, e3, iso = subspace_oracle_pointwise(S, *blocks)
    return Deformation(geo, *(_from_grid_blocks(o, geo) for o in (e1, e2, e3))), iso


# infinitesimal action ---------------------------------------------------------------------

def _apply_map(E, v, geo):
    """Pointwise (E v)_a = sum_b E[a, b] v[b], dealiased."""
    Ep = to_padded(E, geo)
    vp = to_padded(v, geo)
    return from_padded(np.einsum("ab...,b...->a...", Ep, vp), geo)


def infinitesimal_action(eps, xi, base):
    """dbar_{eps2}(xi^{0,1} - eps2(xi^{1,0})) - [eps3, (sigma + eps1)(xi^{1,0})] as an E3 field."""
    from .hodge import dbar_deformed
    geo = eps.geometry
    n = geo.n
    w = xi.b - _apply_map(eps.E2, xi.a, geo)
    wmv = Multivector(geo, {(n + j,): w[j] for j in range(n)})
    Sig = base_S(base)[(slice(None), slice(None)) + (None,) * geo.dim] * _delta(geo) + eps.E1
    V = _apply_map(Sig, xi.a, geo)
    Vmv = Multivector(geo, {(j,): V[j] for j in range(n)})
    res = dbar_deformed(eps.E2, wmv) - graded_bracket(eps.part(3), Vmv)
    return form_to_E3(res)


def _delta(geo):
    d = np.zeros(geo.shape)
    d[(0,) * geo.dim] = 1.0
    return d


def _compose(A, B, geo):
    """Pointwise matrix product of (n, n) + grid coefficient fields, dealiased."""
    return from_padded(np.einsum("ab...,bc...->ac...", to_padded(A, geo), to_padded(B, geo)), geo)


def consistency_lhs(eps, B):
    """B02 + B11 eps2 - eps2 (B11 + B20 eps2) with eps2 acting on T^{0,1} as -E2^T."""
    geo = eps.geometry
    E2T = -_sw(eps.E2)
    inner = B.B11p + _compose(B.B20, E2T, geo)
    return B.B02 + _compose(B.B11, E2T, geo) - _compose(eps.E2, inner, geo)


def fd_order_study(eps, xi, base, steps=(0.2, 0.1, 0.05, 0.025, 0.0125)):
    """Central differences of (e^{h dxi} . eps)_3 against the linearization.

    Returns (steps, errors, fitted log-log slope).
    """
    B = xi.d()
    lin = consistency_lhs(eps, B)
    errs = []
    for h in steps:
        up = b_field_action(eps, h * B, base).E3
        dn = b_field_action(eps, -h * B, base).E3
        errs.append(c0(SpectralField(eps.geometry, (up - dn) / (2 * h) - lin)))
    slope = float(np.polyfit(np.log(steps), np.log(errs), 1)[0])
    return list(steps), errs, slope


def action_consistency_check(eps, xi, base):
    lhs = consistency_lhs(eps, xi.d())
    rhs = infinitesimal_action(eps, xi, base)
    return c0(SpectralField(eps.geometry, lhs - rhs))


# gauge certification ------------------------------------------------------------------------

def certify_holomorphic_gauge(eps, base, tol=1e-8):
    e3 = c0(eps.eps3)
    mc = mc_residual(eps, base).max
    return {
        "is_gauge": bool(e3 < tol and mc < tol),
        "eps3_c0": e3,
        "mc_residual": mc,
        "I_data": eps.E2,
        "poisson_data": base_S(base)[(slice(None), slice(None)) + (None,) * eps.geometry.dim]
        * _delta(eps.geometry) + eps.E1,
    }


# snapshots -------------------------------------------------------------------------------------

def write_deformation(eps, stem):
    paths = []
    for k, E in enumerate((eps.E1, eps.E2, eps.E3), start=1):
        p = f"{stem}.eps{k}"
        write_snapshot(SpectralField(eps.geometry, E), p)
        paths.append(p)
    return paths


def read_deformation(stem, geometry):
    n = geometry.n
    Es = [read_snapshot(f"{stem}.eps{k}", geometry, (n, n)).coef for k in (1, 2, 3)]
    return Deformation(geometry, *Es)


# flow versus gauge ---------------------------------------------------------------------------

class FlowDivergenceError(RuntimeError):
    """The explicit stepping blew up (step size too large for the flow)."""


FLOW_BLOWUP = 1e6


class _ActiveGrid:
    """Grid restricted to the real axes along which the Hamiltonian varies.

    Translations along the other axes commute with both ODEs, so I_t and B_t
    stay constant along them and the sup over the full grid equals the sup
    over this slice.
    """

    def __init__(self, geo, axes):
        self.geo = geo
        self.axes = tuple(axes)
        self.r = len(self.axes)
        self.shape = (geo.N,) * self.r
        k = np.fft.fftfreq(geo.N, 1.0 / geo.N)
        self.mult = []
        for j in range(self.r):
            shp = [1] * self.r
            shp[j] = geo.N
            m = 2j * np.pi * k.reshape(shp)
            if geo.N % 2 == 0:
                m = m * (np.abs(k) < geo.N // 2).reshape(shp)
            self.mult.append(m)

    def restrict(self, values):
        idx = tuple(slice(None) if a in self.axes else 0 for a in range(self.geo.dim))
        return values[(Ellipsis,) + idx]

    def grad(self, v):
        """Real-frame gradient (dim leading) of real data with component axes first."""
        lead = v.ndim - self.r
        ax = tuple(range(lead, v.ndim))
        out = np.zeros((self.geo.dim,) + v.shape)
        if self.r == 0:
            return out
        c = np.fft.fftn(v, axes=ax)
        for j, a in enumerate(self.axes):
            out[a] = np.real(np.fft.ifftn(c * self.mult[j], axes=ax))
        return out


def _active_axes(fields, tol=0.0):
    geo = fields[0].geometry
    act = set()
    for f in fields:
        c = np.abs(f.coef)
        for a in range(geo.dim):
            other = tuple(b for b in range(geo.dim) if b != a)
            prof = c.max(axis=other) if other else c
            if np.any(prof[1:] > tol):
                act.add(a)
    return sorted(act)


def _flow_rhs(I, df, P, grid):
    """(dI/dt, dB/dt): I_dot = L_X I with X = P(df), B_dot = -2i dd^bar_I f = d(I* df)."""
    X = np.einsum("ab,b...->a...", P, df)
    dX = np.swapaxes(grid.grad(X), 0, 1)          # dX[a, c] = d_c X^a
    dI = np.moveaxis(grid.grad(I), 0, 2)          # dI[a, b, c] = d_c I^a_b
    # (L_X I)^a_b = X^c d_c I^a_b - d_c X^a I^c_b + I^a_c d_b X^c
    LI = (np.einsum("c...,abc...->ab...", X, dI)
          - np.einsum("ac...,cb...->ab...", dX, I)
          + np.einsum("ac...,cb...->ab...", I, dX))
    alpha = np.einsum("a...,ab...->b...", df, I)
    da = grid.grad(alpha)                          # da[a, b] = d_a alpha_b
    return LI, da - np.swapaxes(da, 0, 1)


def _flow_discrepancy(I, B, P, I0):
    """sup over the grid of the operator norm of J_{sigma_t} - e^B J_sigma e^{-B}."""
    from .gt_algebra import GCStructure, b_transform_pointwise
    Ig = np.moveaxis(I, (0, 1), (-2, -1)).reshape((-1,) + I.shape[:2])
    Bg = np.moveaxis(B, (0, 1), (-2, -1)).reshape((-1,) + B.shape[:2])
    Pg = np.broadcast_to(P, Ig.shape)
    z = np.zeros_like(Ig)
    Jt = GCStructure(Ig, Pg, z, np.swapaxes(Ig, -1, -2)).matrix()
    I0 = np.broadcast_to(I0, Ig.shape)
    Jb = b_transform_pointwise(GCStructure(I0, Pg, z, np.swapaxes(I0, -1, -2)), Bg).matrix()
    diff = Jt - Jb
    # the operator norm is bounded by the Frobenius norm: only check candidates
    fro = np.sqrt(np.sum(diff ** 2, axis=(1, 2)))
    order = np.argsort(fro)[::-1]
    best = 0.0
    for p in order:
        if fro[p] <= best:
            break
        best = max(best, float(np.linalg.norm(diff[p], 2)))
    return best


def integrate_flow(f_schedule, base, steps, dt):
    """Classical RK4 for (I_t, B_t); returns (I, B, history of (t, discrepancy)).

    I and B are real-frame matrix fields, component axes first, sampled on the
    grid of the axes the Hamiltonian depends on.
    """
    from .gt_algebra import standard_complex
    times = [0.5 * k * dt for k in range(2 * steps + 1)]
    fs = {t: f_schedule(t) for t in times}
    geo = fs[0.0].geometry
    grid = _ActiveGrid(geo, _active_axes(list(fs.values())))
    dfs = {t: grid.grad(np.real(grid.restrict(to_grid(f.coef, geo)))) for t, f in fs.items()}
    I0 = standard_complex(geo.n)
    P = base.P

    I = np.broadcast_to(I0.reshape(I0.shape + (1,) * grid.r), I0.shape + grid.shape).copy()
    B = np.zeros_like(I)
    hist = [(0.0, _flow_discrepancy(I, B, P, I0))]
    for k in range(steps):
        t, th, t1 = times[2 * k], times[2 * k + 1], times[2 * k + 2]
        k1 = _flow_rhs(I, dfs[t], P, grid)
        k2 = _flow_rhs(I + dt / 2 * k1[0], dfs[th], P, grid)
        k3 = _flow_rhs(I + dt / 2 * k2[0], dfs[th], P, grid)
        k4 = _flow_rhs(I + dt * k3[0], dfs[t1], P, grid)
        I = I + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        B = B + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        size = max(np.max(np.abs(I)), np.max(np.abs(B)))
        if not np.isfinite(size) or size > FLOW_BLOWUP:
            raise FlowDivergenceError(f"flow stepping blew up at t={t1:.4g} (dt={dt:g})")
        hist.append((t1, _flow_discrepancy(I, B, P, I0)))
    return I, B, hist


def flow_equals_gauge_check(f_schedule, base, steps, dt, return_history=False):
    """Integrate the P-Hamiltonian flow of I and the gauge ODE for B side by side.

    f_schedule(t) returns the real Hamiltonian as a SpectralField.  Returns the
    sup over the grid and the step times of the operator norm of
    J_{sigma_t} - J_{B_t}.
    """
    _, _, hist = integrate_flow(f_schedule, base, steps, dt)
    worst = max(d for _, d in hist)
    if return_history:
        return worst, hist
    return worst


def _static(f):
    return lambda t: f


def cosine_hamiltonian(geometry, amplitude=0.1, axis=0):
    """f = amplitude cos(2 pi x^axis), constant in time."""
    x = geometry.coords()[axis]
    return _static(SpectralField(
        geometry, from_grid(amplitude * np.cos(2 * np.pi * x) + 0j, geometry), real=True))


def modulated_hamiltonian(geometry, amplitude=0.1):
    """f_t = amplitude (1 + sin 3t) (cos 2 pi x^1 + sin 2 pi (x^1 + x^3)) / 2."""
    x = geometry.coords()
    g = 0.5 * amplitude * (np.cos(2 * np.pi * x[0]) + np.sin(2 * np.pi * (x[0] + x[2])))
    base = from_grid(g + 0j, geometry)
    return lambda t: SpectralField(geometry, (1.0 + np.sin(3.0 * t)) * base, real=True)


def flow_order_study(f_schedule, base, steps_list=(32, 64, 128, 256), ref_factor=4):
    """Discrepancy and state error (against a finer RK4 run) for each step count on [0, 1]."""
    steps_list = sorted(steps_list)
    nref = ref_factor * steps_list[-1]
    Ir, Br, _ = integrate_flow(f_schedule, base, nref, 1.0 / nref)
    rows = []
    for s in steps_list:
        I, B, hist = integrate_flow(f_schedule, base, s, 1.0 / s)
        rows.append({
            "steps": s, "dt": 1.0 / s,
            "discrepancy": max(d for _, d in hist),
            "terminal_discrepancy": hist[-1][1],
            "state_error": float(max(np.max(np.abs(I - Ir)), np.max(np.abs(B - Br)))),
        })
    for a, b in zip(rows, rows[1:]):
        for key in ("discrepancy", "state_error"):
            b[key + "_ratio"] = a[key] / b[key] if b[key] > 0 else float("nan")
    return rows
