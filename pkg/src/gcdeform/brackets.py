"""
Bracket layer: Courant bracket on sections of T + T*, and the graded bracket
on Lambda^.(T^{1,0} + T^{*0,1}).

Multivectors in Lambda^.(T^{1,0} + T^{*0,1}) are sums of monomials in the
constant generators

    0 .. n-1   : d/dz^1 .. d/dz^n
    n .. 2n-1  : dzbar^1 .. dzbar^n

with Fourier coefficient arrays.  A monomial is a strictly increasing tuple
of generator indices.  The bracket is the biderivation generated by the
anchor rho(d/dz^i) = d/dz^i, rho(dzbar^j) = 0, with constant generators
commuting, and the signs of the grading shifted by one.
"""
from __future__ import annotations

from collections import defaultdict

import numpy as np

from .spectral_fields import (Collocation, SpectralField, bandwidth, from_padded, to_padded,
                              zeros as field_zeros)


# monomial bookkeeping -------------------------------------------------------

def _sort_sign(seq):
    """Sign of the permutation sorting ``seq`` (None if an index repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return None
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def wedge_monomials(a, b):
    """a ^ b as (sign, monomial), or (0, None) when it vanishes."""
    s = _sort_sign(a + b)
    if s is None:
        return 0, None
    return s, tuple(sorted(a + b))


def bidegree(mono, n):
    p = sum(1 for g in mono if g < n)
    return p, len(mono) - p


class Multivector:
    """Element of Omega^{0,.}(Lambda^. T^{1,0}) as a dict monomial -> coefficients."""

    def __init__(self, geometry, terms=None):
        self.geometry = geometry
        self.terms = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            s = _sort_sign(mono)
            if s is None:
                continue
            key = tuple(sorted(mono))
            c = np.asarray(c, dtype=complex)
            if c.ndim == 0:
                full = np.zeros(geometry.shape, complex)
                full[(0,) * geometry.dim] = c
                c = full
            self.terms[key] = self.terms.get(key, 0) + s * c

    @property
    def n(self):
        return self.geometry.n

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Multivector(self.geometry, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, s):
        return Multivector(self.geometry, {m: s * c for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def component(self, mono):
        """Coefficient of an arbitrary (unsorted) monomial."""
        s = _sort_sign(tuple(mono))
        if s is None:
            return np.zeros(self.geometry.shape, complex)
        c = self.terms.get(tuple(sorted(mono)))
        return s * c if c is not None else np.zeros(self.geometry.shape, complex)

    def part(self, p, q):
        """Projection onto Omega^{0,q}(Lambda^p T^{1,0})."""
        return Multivector(self.geometry, {m: c for m, c in self.terms.items()
                                           if bidegree(m, self.n) == (p, q)})

    def sup(self):
        if not self.terms:
            return 0.0
        from .spectral_fields import to_grid
        return max(float(np.max(np.abs(to_grid(c, self.geometry)))) for c in self.terms.values())

    def is_zero(self, tol=0.0):
        return all(np.max(np.abs(c)) <= tol for c in self.terms.values())


def mv_zeros(geometry):
    return Multivector(geometry, {})


def vector(geometry, coef_list):
    """sum_j c_j d/dz^j from a list of coefficient arrays."""
    return Multivector(geometry, {(j,): c for j, c in enumerate(coef_list)})


def form01(geometry, coef_list):
    """sum_j c_j dzbar^j."""
    n = geometry.n
    return Multivector(geometry, {(n + j,): c for j, c in enumerate(coef_list)})


def scalar(geometry, coef):
    return Multivector(geometry, {(): coef})


# padded evaluation ------------------------------------------------------------

def _mv_bandwidth(mv):
    return max((bandwidth(c, mv.geometry) for c in mv.terms.values()), default=0)


def _collocation(a, b):
    return Collocation(a.geometry, _mv_bandwidth(a) + _mv_bandwidth(b))


class _Padded:
    """Lazy cache of collocated samples of coefficients and their d/dz^i."""

    def __init__(self, mv, col):
        self.mv = mv
        self.geo = mv.geometry
        self.col = col
        self._val = {}
        self._der = {}

    def val(self, mono):
        if mono not in self._val:
            self._val[mono] = self.col.to(self.mv.terms[mono])
        return self._val[mono]

    def der(self, mono, i):
        key = (mono, i)
        if key not in self._der:
            self._der[key] = self.col.to(self.mv.terms[mono] * self.geo.dz(i))
        return self._der[key]


def _collect(geometry, acc, col):
    return Multivector(geometry, {m: col.back(v) for m, v in acc.items()})


def wedge(a, b):
    """Dealiased exterior product."""
    geo = a.geometry
    col = _collocation(a, b)
    pa, pb = _Padded(a, col), _Padded(b, col)
    acc = defaultdict(lambda: 0)
    for ma in a.terms:
        for mb in b.terms:
            s, m = wedge_monomials(ma, mb)
            if s:
                acc[m] = acc[m] + s * pa.val(ma) * pb.val(mb)
    return _collect(geo, acc, col)


def _anchor_terms(mono, n):
    """(k, generator) for anchored generators of ``mono`` (k zero based)."""
    return [(k, g) for k, g in enumerate(mono) if g < n]


def graded_bracket(a, b):
    """[a, b] on Lambda^.(T^{1,0} + T^{*0,1}).

    For constant monomials g (degree p), h (degree q) and functions c, d,

        [c g, d h] = c [g, d] ^ h - (-1)^{(p-1)(q-1)} d [h, c] ^ g,
        [g, f]     = sum_k (-1)^{p-k} rho(g_k)(f) g_1..^g_k..g_p .
    """
    if a.geometry != b.geometry:
        raise ValueError("multivectors live on different geometries")
    geo = a.geometry
    n = geo.n
    col = _collocation(a, b)
    pa, pb = _Padded(a, col), _Padded(b, col)
    acc = defaultdict(lambda: 0)
    for g in a.terms:
        p = len(g)
        for h in b.terms:
            q = len(h)
            # c [g, d] ^ h
            for k, gk in _anchor_terms(g, n):
                rest = g[:k] + g[k + 1:]
                s, m = wedge_monomials(rest, h)
                if s:
                    sk = (-1) ** (p - 1 - k)
                    acc[m] = acc[m] + (s * sk) * pa.val(g) * pb.der(h, gk)
            # - (-1)^{(p-1)(q-1)} d [h, c] ^ g
            outer = -((-1) ** ((p - 1) * (q - 1)))
            for k, hk in _anchor_terms(h, n):
                rest = h[:k] + h[k + 1:]
                s, m = wedge_monomials(rest, g)
                if s:
                    sk = (-1) ** (q - 1 - k)
                    acc[m] = acc[m] + (outer * s * sk) * pb.val(h) * pa.der(g, hk)
    return _collect(geo, acc, col)


def lie_derivative(X, T):
    """L_X T for a field X of pure (1,0)-vector valence."""
    n = X.geometry.n
    for m in X.terms:
        if len(m) != 1 or m[0] >= n:
            raise ValueError("lie_derivative needs a (1,0) vector field")
    return graded_bracket(X, T)


def dbar_mv(a):
    """dbar(c m) = sum_k dbar_k(c) dzbar^k ^ m."""
    geo = a.geometry
    n = geo.n
    out = {}
    for mono, c in a.terms.items():
        for k in range(n):
            s, m = wedge_monomials((n + k,), mono)
            if s:
                out[m] = out.get(m, 0) + s * c * geo.dzbar(k)
    return Multivector(geo, out)


def sigma_multivector(geometry, base):
    """Constant bivector sigma = sum_{i<j} c^{ij} d_i ^ d_j."""
    n = geometry.n
    terms = {}
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            terms[(i, j)] = complex(base.sigma[idx])
            idx += 1
    return Multivector(geometry, terms)


def d_L(a, base):
    """dbar a + [sigma, a]."""
    sig = sigma_multivector(a.geometry, base)
    out = dbar_mv(a)
    if sig.terms and any(np.any(c != 0) for c in sig.terms.values()):
        out = out + graded_bracket(sig, a)
    return out


# endomorphism <-> bivector ------------------------------------------------------

def bivector_from_blocks(geometry, C11, C12, C22):
    """sum_{a<b} C^{ab} e_a ^ e_b from the blocks of a full skew matrix.

    C11[i, j] pairs d_i, d_j; C12[i, j] pairs d_i, dzbar^j; C22 pairs two
    dzbar's.  Blocks are arrays of shape (n, n) + grid (or None).
    """
    n = geometry.n
    terms = {}
    for i in range(n):
        for j in range(n):
            if C11 is not None and i < j:
                terms[(i, j)] = C11[i, j]
            if C12 is not None:
                terms[(i, n + j)] = C12[i, j]
            if C22 is not None and i < j:
                terms[(n + i, n + j)] = C22[i, j]
    return Multivector(geometry, terms)


def blocks_from_bivector(mv):
    """Inverse of bivector_from_blocks: (C11, C12, C22) coefficient arrays."""
    geo = mv.geometry
    n = geo.n
    shp = (n, n) + geo.shape
    C11, C12, C22 = (np.zeros(shp, complex) for _ in range(3))
    for i in range(n):
        for j in range(n):
            C12[i, j] = mv.component((i, n + j))
            if i != j:
                C11[i, j] = mv.component((i, j))
                C22[i, j] = mv.component((n + i, n + j))
    return C11, C12, C22


# Courant bracket in the real frame ------------------------------------------------

class Section:
    """X + xi with real-frame components, each a SpectralField of shape (2n,)."""

    def __init__(self, X, xi):
        if X.geometry != xi.geometry:
            raise ValueError("vector and form parts live on different geometries")
        if X.comp_shape != (X.geometry.dim,) or xi.comp_shape != (xi.geometry.dim,):
            raise ValueError("section parts must have 2n real components")
        self.X = X
        self.xi = xi

    @property
    def geometry(self):
        return self.X.geometry

    def __add__(self, other):
        return Section(self.X + other.X, self.xi + other.xi)

    def __sub__(self, other):
        return Section(self.X - other.X, self.xi - other.xi)

    def __mul__(self, s):
        return Section(self.X * s, self.xi * s)

    __rmul__ = __mul__

    def sup(self):
        from .spectral_fields import c0
        return max(c0(self.X), c0(self.xi))


def _grad(coef, geo, col):
    """Collocated samples of d/dx^a of each component: shape (dim,) + comp + grid."""
    return np.stack([col.to(coef * geo.dreal(a)) for a in range(geo.dim)])


def _section_col(*parts):
    geo = parts[0].geometry
    return Collocation(geo, sum(max(bandwidth(s.X.coef, geo), bandwidth(s.xi.coef, geo))
                                if isinstance(s, Section) else bandwidth(s.coef, geo)
                                for s in parts))


def courant_bracket(u, v):
    """[X, Y] + L_X eta - i_Y dxi."""
    geo = u.geometry
    if v.geometry != geo:
        raise ValueError("sections live on different geometries")
    col = _section_col(u, v)
    X, Y = col.to(u.X.coef), col.to(v.X.coef)
    eta = col.to(v.xi.coef)
    dX, dY = _grad(u.X.coef, geo, col), _grad(v.X.coef, geo, col)
    dxi, deta = _grad(u.xi.coef, geo, col), _grad(v.xi.coef, geo, col)
    # d[c, a] = d_c of component a
    vec = np.einsum("c...,ca...->a...", X, dY) - np.einsum("c...,ca...->a...", Y, dX)
    lie = np.einsum("a...,ab...->b...", X, deta) + np.einsum("a...,ba...->b...", eta, dX)
    ixd = np.einsum("a...,ab...->b...", Y, dxi) - np.einsum("a...,ba...->b...", Y, dxi)
    form = lie - ixd
    return Section(SpectralField(geo, col.back(vec)), SpectralField(geo, col.back(form)))


def section_pairing(u, v):
    """<u, v> = (xi(Y) + eta(X)) / 2 as a scalar field."""
    geo = u.geometry
    col = _section_col(u, v)
    X, Y = col.to(u.X.coef), col.to(v.X.coef)
    xi, eta = col.to(u.xi.coef), col.to(v.xi.coef)
    val = 0.5 * (np.sum(xi * Y, axis=0) + np.sum(eta * X, axis=0))
    return SpectralField(geo, col.back(val))


def exterior_d(f):
    """df of a scalar field as a real-frame covector field."""
    geo = f.geometry
    return SpectralField(geo, np.stack([f.coef * geo.dreal(a) for a in range(geo.dim)]))


def anchor_derivative(u, f):
    """pi_T(u) . f"""
    geo = u.geometry
    col = _section_col(u, f)
    val = np.sum(col.to(u.X.coef) * _grad(f.coef, geo, col), axis=0)
    return SpectralField(geo, col.back(val))


def scale_section(f, u):
    """f u for a scalar field f (dealiased)."""
    geo = u.geometry
    col = _section_col(u, f)
    fp = col.to(f.coef)
    return Section(SpectralField(geo, col.back(fp * col.to(u.X.coef))),
                   SpectralField(geo, col.back(fp * col.to(u.xi.coef))))


def form_section(xi):
    return Section(field_zeros(xi.geometry, (xi.geometry.dim,)), xi)


def ltilde_section(a):
    """Degree-one element of Lambda^.(T^{1,0} + T^{*0,1}) as a real-frame section."""
    geo = a.geometry
    n = geo.n
    X = np.zeros((geo.dim,) + geo.shape, complex)
    xi = np.zeros((geo.dim,) + geo.shape, complex)
    for mono, c in a.terms.items():
        if len(mono) != 1:
            raise ValueError("only degree-one elements map to sections")
        g = mono[0]
        if g < n:
            # d/dz = (d/dx - i d/dy) / 2
            X[2 * g] += 0.5 * c
            X[2 * g + 1] += -0.5j * c
        else:
            j = g - n
            # dzbar = dx - i dy
            xi[2 * j] += c
            xi[2 * j + 1] += -1j * c
    return Section(SpectralField(geo, X), SpectralField(geo, xi))


def section_ltilde(u, tol=1e-10):
    """Inverse of ltilde_section; fails if u has components outside T^{1,0} + T^{*0,1}."""
    geo = u.geometry
    n = geo.n
    terms = {}
    for j in range(n):
        ax, ay = u.X.coef[2 * j], u.X.coef[2 * j + 1]
        # X = v d/dz + w d/dzbar -> ax = (v + w)/2, ay = -i(v - w)/2
        v = ax + 1j * ay
        w = ax - 1j * ay
        bx, by = u.xi.coef[2 * j], u.xi.coef[2 * j + 1]
        # xi = s dz + t dzbar -> bx = s + t, by = i(s - t)
        s = 0.5 * (bx - 1j * by)
        t = 0.5 * (bx + 1j * by)
        if max(np.max(np.abs(w)), np.max(np.abs(s))) > tol:
            raise ValueError("section has components outside T^{1,0} + T^{*0,1}")
        terms[(j,)] = v
        terms[(n + j,)] = t
    return Multivector(geo, terms)
