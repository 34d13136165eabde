"""
Hodge package of the flat torus for the dbar complex.

Forms are Multivectors (see brackets) of bidegree (p, q), i.e. elements of
Omega^{0,q}(Lambda^p T^{1,0}).  The flat metric has |dz^j|^2 = 2 and
|d/dz^j|^2 = 1/2, so a constant monomial with p vectors and q forms has
squared norm 2^{q-p}.  The L^2 product is the torus average.

    dbar          c m  ->  sum_k dbar_k(c) dzbar^k ^ m
    dbar_star     adjoint: -2 sum_k d_k(c) i_k m,  i_k removes dzbar^k from the left
    Laplacian     multiplier 2 pi^2 |k|^2
    G, H          inverse of the multiplier off k = 0, projection onto k = 0
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .brackets import (Multivector, bidegree, dbar_mv, graded_bracket,
                       bivector_from_blocks, wedge_monomials, _sort_sign)
from .forms import TwoForm
from .spectral_fields import (SpectralField, laplacian_multiplier, from_padded,
                              to_padded)


def _check_q(a, raise_top):
    n = a.geometry.n
    for m in a.terms:
        p, q = bidegree(m, n)
        if raise_top and q >= n:
            raise ValueError(f"dbar of a (0,{q}) form is out of range for n={n}")
        if not raise_top and q == 0:
            raise ValueError("dbar_star of a (0,0) form is out of range")


def dbar(a, strict=False):
    """dbar of a (0,q) form.  With strict=True, q = n raises instead of returning 0."""
    if strict:
        _check_q(a, True)
    return dbar_mv(a)


def contract_dzbar(k, mono, n):
    """i_k on a monomial: (sign, rest) removing dzbar^k, or (0, None)."""
    g = n + k
    if g not in mono:
        return 0, None
    pos = mono.index(g)
    p = sum(1 for x in mono if x < n)
    # move dzbar^k to the front of the form part, past the forms preceding it
    sign = (-1) ** (pos - p)
    # then past the p vectors to the very front
    sign *= (-1) ** p
    rest = mono[:pos] + mono[pos + 1:]
    return sign, rest


def dbar_star(a, strict=False):
    if strict:
        _check_q(a, False)
    geo = a.geometry
    n = geo.n
    out = {}
    for mono, c in a.terms.items():
        for k in range(n):
            s, rest = contract_dzbar(k, mono, n)
            if s:
                out[rest] = out.get(rest, 0) - 2.0 * s * c * geo.dz(k)
    return Multivector(geo, out)


def l2_inner(a, b):
    """<a, b>_{L^2} with the flat pointwise metric."""
    n = a.geometry.n
    tot = 0j
    for m, c in a.terms.items():
        d = b.terms.get(m)
        if d is None:
            continue
        p, q = bidegree(m, n)
        tot += 2.0 ** (q - p) * np.sum(c * np.conj(d))
    return tot


def l2_norm(a):
    return float(np.sqrt(abs(l2_inner(a, a))))


def laplacian(a):
    mult = laplacian_multiplier(a.geometry)
    return Multivector(a.geometry, {m: c * mult for m, c in a.terms.items()})


def laplacian_direct(a):
    return dbar(dbar_star(a)) + dbar_star(dbar(a))


def _origin(geometry):
    return (0,) * geometry.dim


def harmonic(a):
    geo = a.geometry
    out = {}
    for m, c in a.terms.items():
        h = np.zeros_like(c)
        h[_origin(geo)] = c[_origin(geo)]
        out[m] = h
    return Multivector(geo, out)


def green(a):
    geo = a.geometry
    mult = laplacian_multiplier(geo)
    inv = np.zeros_like(mult)
    nz = mult != 0
    inv[nz] = 1.0 / mult[nz]
    return Multivector(geo, {m: c * inv for m, c in a.terms.items()})


@dataclass
class HodgeSplit:
    G: Multivector
    H: Multivector


def hodge_solve(a):
    return HodgeSplit(green(a), harmonic(a))


def smoothing(t, a):
    """Sharp cutoff S_t: keep modes with 2 pi |k| <= t."""
    if not t > 1:
        raise ValueError(f"smoothing parameter must exceed 1, got {t}")
    geo = a.geometry
    mask = 2.0 * np.pi * np.sqrt(geo.ksq()) <= t
    if isinstance(a, SpectralField):
        return SpectralField(geo, a.coef * mask, a.valence, a.real)
    if hasattr(a, "a") and hasattr(a, "b"):
        return type(a)(geo, a.a * mask, a.b * mask)
    return Multivector(geo, {m: c * mask for m, c in a.terms.items()})


def harmonic_splitting(h):
    """s(h) = h + conj(h) for a constant (0,2) form h, as a real TwoForm."""
    geo = h.geometry
    n = geo.n
    if n < 2:
        raise ValueError("harmonic splitting needs n >= 2")
    M22 = np.zeros((n, n) + geo.shape, complex)
    o = _origin(geo)
    for m, c in h.terms.items():
        p, q = bidegree(m, n)
        if (p, q) != (0, 2):
            raise ValueError("harmonic_splitting expects a (0,2) form")
        if np.max(np.abs(c.reshape(-1)[1:]), initial=0.0) > 0:
            raise ValueError("harmonic_splitting expects a constant form")
        i, j = m[0] - n, m[1] - n
        M22[i, j, ...][o] += c[o]
        M22[j, i, ...][o] -= c[o]
    M11 = np.zeros_like(M22)
    M11[(slice(None), slice(None)) + o] = np.conj(M22[(slice(None), slice(None)) + o])
    return TwoForm(geo, M11, 0, M22)


def form02(geometry, coef):
    """(0,2) form c dzbar^1 ^ dzbar^2 (n = 2) or from a skew (n, n) array."""
    n = geometry.n
    coef = np.asarray(coef, complex)
    if coef.shape == geometry.shape or coef.ndim == 0:
        return Multivector(geometry, {(n, n + 1): coef})
    terms = {}
    for i in range(n):
        for j in range(i + 1, n):
            terms[(n + i, n + j)] = coef[i, j]
    return Multivector(geometry, terms)


# deformed operator ------------------------------------------------------------

def eps2_multivector(geometry, E2):
    """The element sum_j alpha_j ^ X_j of T^{*0,1} ^ T^{1,0} attached to the map E2.

    E2 : T*^{1,0} -> T*^{0,1} is stored as coefficient arrays (n, n) + grid with
    E2[k, j] the dzbar^k component of the image of dz^j.
    """
    from .deformation import polyvector_blocks
    C11, C12, C22 = polyvector_blocks(None, E2, None, geometry.n)
    return bivector_from_blocks(geometry, C11, C12, C22)


def dbar_deformed(E2, a):
    """dbar a + [eps2, a] for a (0,q) form a (possibly Lambda^p T^{1,0} valued)."""
    geo = a.geometry
    return dbar_mv(a) + graded_bracket(eps2_multivector(geo, E2), a)


def dbar_deformed_concrete(E2, a):
    """dbar b + sum_j alpha_j ^ L_{X_j} b for eps2 = sum_j alpha_j ^ X_j.

    With X_j = d/dz^j the decomposition reads alpha_j = -sum_k E2[k,j] dzbar^k.
    Valid for scalar (0,q) forms.
    """
    from .deformation import POLY_SIGN
    geo = a.geometry
    n = geo.n
    for m in a.terms:
        if bidegree(m, n)[0]:
            raise ValueError("concrete deformed dbar is defined on scalar forms")
    acc = {}
    pads = {}
    for mono, c in a.terms.items():
        for j in range(n):
            dj = to_padded(c * geo.dz(j), geo)
            for k in range(n):
                s, m = wedge_monomials((n + k,), mono)
                if not s:
                    continue
                if (k, j) not in pads:
                    pads[(k, j)] = to_padded(-POLY_SIGN * E2[k, j], geo)
                acc[m] = acc.get(m, 0) + s * pads[(k, j)] * dj
    extra = Multivector(geo, {m: from_padded(v, geo) for m, v in acc.items()})
    return dbar_mv(a) + extra


class HodgePackage:
    """Bundle of the torus Hodge operators for a geometry and base structure."""

    def __init__(self, geometry, base):
        self.geometry = geometry
        self.base = base

    def harmonic_dimension(self, q):
        return comb(self.geometry.n, q)

    def harmonic_basis(self, q):
        import itertools
        n = self.geometry.n
        out = []
        for js in itertools.combinations(range(n), q):
            out.append(Multivector(self.geometry, {tuple(n + j for j in js): 1.0}))
        return out

    dbar = staticmethod(dbar)
    dbar_star = staticmethod(dbar_star)
    hodge_solve = staticmethod(hodge_solve)
    smoothing = staticmethod(smoothing)
    harmonic_splitting = staticmethod(harmonic_splitting)
    dbar_deformed = staticmethod(dbar_deformed)


def smoothing_ratios(xi, t, p, q, weight="bessel"):
    """Ratios of both sides of the smoothing estimates (constant 1), for p >= q.

    r_low  = |S_t xi|_p / (t^(p-q) |xi|_q)
    r_high = |(1 - S_t) xi|_q / (t^(q-p) |xi|_p)
    """
    from .spectral_fields import sobolev_norm
    if p < q:
        raise ValueError("the estimates are stated for p >= q")
    low = smoothing(t, xi)
    high = xi - low
    r_low = sobolev_norm(low, p, weight) / (t ** (p - q) * sobolev_norm(xi, q, weight))
    r_high = sobolev_norm(high, q, weight) / (t ** (q - p) * sobolev_norm(xi, p, weight))
    return r_low, r_high
