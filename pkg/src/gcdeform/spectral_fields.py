"""
Truncated Fourier fields on flat complex tori.

The torus is C^n / (Z^n + i Z^n) with real coordinates ordered
(x^1, y^1, ..., x^n, y^n) and z^j = x^j + i y^j.  A field is stored as the
coefficients of the basis e^{2 pi i k.(x,y)} on the full N^{2n} FFT grid
(numpy frequency layout), with any number of leading component axes.

Conventions
-----------
* ``d/dz^j``    multiplies the k-th coefficient by ``pi i (kx_j - i ky_j)``
* ``d/dzbar^j`` multiplies it by ``pi i (kx_j + i ky_j)``
* products use 3/2 zero padding, so the product of two grid fields is the
  exact projection onto the stored frequencies
* Sobolev weight ``(1 + 4 pi^2 |k|^2)^s``
"""
from __future__ import annotations

import csv
import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as _fft


@dataclass(frozen=True)
class TorusGeometry:
    """Grid and truncation data of the torus T^{2n}.

    n : complex dimension (1 or 2)
    N : grid points per real axis (power of two, >= 4)
    K : bandwidth of generated fields, K <= N/3
    """
    n: int
    N: int
    K: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"complex dimension must be 1 or 2, got {self.n}")
        if self.N < 4 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 4, got {self.N}")
        if self.K < 1 or 3 * self.K > self.N:
            raise ValueError(f"need 1 <= K <= N/3, got K={self.K}, N={self.N}")

    @property
    def dim(self):
        return 2 * self.n

    @property
    def shape(self):
        return (self.N,) * self.dim

    @property
    def M(self):
        """Padded grid size for dealiased products."""
        return 3 * self.N // 2

    def wavenumbers(self):
        return _wavenumbers(self.n, self.N)

    def kx(self, j):
        return self.wavenumbers()[2 * j]

    def ky(self, j):
        return self.wavenumbers()[2 * j + 1]

    def dz(self, j):
        """Multiplier of d/dz^j."""
        return np.pi * 1j * (self.kx(j) - 1j * self.ky(j))

    def dzbar(self, j):
        """Multiplier of d/dzbar^j."""
        return np.pi * 1j * (self.kx(j) + 1j * self.ky(j))

    def dreal(self, axis):
        """Multiplier of d/dx^a for real axis a in (x1, y1, x2, y2) order."""
        return 2j * np.pi * self.wavenumbers()[axis]

    def ksq(self):
        """|k|^2 over the grid."""
        return sum(k.astype(float) ** 2 for k in self.wavenumbers())

    def coords(self):
        x = np.arange(self.N) / self.N
        return np.meshgrid(*([x] * self.dim), indexing="ij")

    def band_mask(self, bandwidth=None):
        b = self.K if bandwidth is None else bandwidth
        m = np.ones(self.shape, dtype=bool)
        for k in self.wavenumbers():
            m = m & (np.abs(k) <= b)
        return m


@functools.lru_cache(maxsize=None)
def _wavenumbers(n, N):
    k = np.fft.fftfreq(N, 1.0 / N).astype(int)
    dim = 2 * n
    out = []
    for a in range(dim):
        shp = [1] * dim
        shp[a] = N
        out.append(k.reshape(shp))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _pad_index(N, M):
    return np.fft.fftfreq(N, 1.0 / N).astype(int) % M


class SpectralField:
    """Fourier coefficients of a (possibly tensor valued) field.

    ``coef`` has shape ``comp_shape + geometry.shape``.  ``valence`` is a free
    label naming the bundle the components live in.
    """
    __slots__ = ("geometry", "coef", "valence", "real")

    def __init__(self, geometry, coef, valence="scalar", real=False):
        coef = np.asarray(coef, dtype=complex)
        if coef.shape[coef.ndim - geometry.dim:] != geometry.shape:
            raise ValueError("coefficient array does not match the grid")
        self.geometry = geometry
        self.coef = coef
        self.valence = valence
        self.real = real

    @property
    def comp_shape(self):
        return self.coef.shape[: self.coef.ndim - self.geometry.dim]

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return SpectralField(self.geometry, self.coef[idx], self.valence, self.real)

    def _wrap(self, coef, real=None):
        return SpectralField(self.geometry, coef, self.valence,
                             self.real if real is None else real)

    def _other(self, other):
        if isinstance(other, SpectralField):
            if other.geometry != self.geometry:
                raise ValueError("fields live on different geometries")
            return other.coef
        return other

    def __add__(self, other):
        real = self.real and getattr(other, "real", False)
        return self._wrap(self.coef + self._other(other), real)

    __radd__ = __add__

    def __sub__(self, other):
        real = self.real and getattr(other, "real", False)
        return self._wrap(self.coef - self._other(other), real)

    def __neg__(self):
        return self._wrap(-self.coef)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return product(self, scalar)
        return self._wrap(self.coef * scalar, self.real and np.isrealobj(scalar))

    __rmul__ = __mul__

    def conj(self):
        return self._wrap(conj_coef(self.coef, self.geometry.dim))

    def copy(self):
        return self._wrap(self.coef.copy())

    def zeros_like(self):
        return self._wrap(np.zeros_like(self.coef))

    def __repr__(self):
        return (f"SpectralField(valence={self.valence!r}, comp_shape={self.comp_shape}, "
                f"n={self.geometry.n}, N={self.geometry.N})")


def conj_coef(coef, dim):
    """Coefficients of the complex conjugate field: c(k) -> conj(c(-k))."""
    axes = tuple(range(coef.ndim - dim, coef.ndim))
    flipped = np.flip(coef, axis=axes)
    return np.conj(np.roll(flipped, 1, axis=axes))


def zeros(geometry, comp_shape=(), valence="scalar"):
    return SpectralField(geometry, np.zeros(tuple(comp_shape) + geometry.shape, complex),
                         valence)


def constant(geometry, value, valence="scalar"):
    value = np.asarray(value, dtype=complex)
    coef = np.zeros(value.shape + geometry.shape, complex)
    coef[(...,) + (0,) * geometry.dim] = value
    return SpectralField(geometry, coef, valence, real=bool(np.all(value.imag == 0)))


# transforms ---------------------------------------------------------------

def synthesize(samples, geometry, valence="scalar", real=False):
    """Grid samples -> SpectralField."""
    samples = np.asarray(samples)
    dim = geometry.dim
    if samples.shape[samples.ndim - dim:] != geometry.shape:
        raise ValueError(f"sample grid {samples.shape} does not match {geometry.shape}")
    axes = tuple(range(samples.ndim - dim, samples.ndim))
    coef = _fft.fftn(samples, axes=axes, workers=-1) / geometry.N ** dim
    return SpectralField(geometry, coef, valence, real)


def sample(f):
    """SpectralField -> grid samples (complex)."""
    return to_grid(f.coef, f.geometry)


def to_grid(coef, geometry):
    dim = geometry.dim
    axes = tuple(range(coef.ndim - dim, coef.ndim))
    return _fft.ifftn(coef, axes=axes, workers=-1) * geometry.N ** dim


def from_grid(values, geometry):
    dim = geometry.dim
    axes = tuple(range(values.ndim - dim, values.ndim))
    return _fft.fftn(values, axes=axes, workers=-1) / geometry.N ** dim


def to_padded(coef, geometry):
    """Coefficients -> samples on the 3/2 padded grid."""
    N, M, dim = geometry.N, geometry.M, geometry.dim
    idx = _pad_index(N, M)
    lead = coef.shape[: coef.ndim - dim]
    pad = np.zeros(lead + (M,) * dim, dtype=complex)
    pad[(Ellipsis,) + np.ix_(*([idx] * dim))] = coef
    axes = tuple(range(len(lead), len(lead) + dim))
    return _fft.ifftn(pad, axes=axes, workers=-1) * M ** dim


def from_padded(values, geometry):
    """Samples on the padded grid -> coefficients truncated to the N grid."""
    N, M, dim = geometry.N, geometry.M, geometry.dim
    idx = _pad_index(N, M)
    axes = tuple(range(values.ndim - dim, values.ndim))
    full = _fft.fftn(values, axes=axes, workers=-1) / M ** dim
    return full[(Ellipsis,) + np.ix_(*([idx] * dim))]


def bandwidth(coef, geometry):
    """Largest |k_j| over the modes carrying a nonzero coefficient (exact zero test)."""
    dim = geometry.dim
    coef = np.asarray(coef)
    nz = coef != 0
    if coef.ndim > dim:
        nz = nz.reshape((-1,) + geometry.shape).any(axis=0)
    if not nz.any():
        return 0
    k = np.abs(np.fft.fftfreq(geometry.N, 1.0 / geometry.N).astype(int))
    best = 0
    for a in range(dim):
        prof = nz.any(axis=tuple(b for b in range(dim) if b != a)) if dim > 1 else nz
        best = max(best, int(k[prof].max()))
    return best


@functools.lru_cache(maxsize=None)
def _sub_index(N, M):
    h = M // 2 - 1
    ks = np.arange(-h, h + 1)
    return ks % N, ks % M


class Collocation:
    """Grid for products of fields whose bandwidths sum to ``total``.

    If the product fits in the N grid it is formed exactly on the smallest
    even grid of 2 total + 2 points per axis; otherwise the 3/2 padded grid is
    used and the result truncated to the N grid.
    """

    def __init__(self, geometry, total):
        self.geometry = geometry
        N = geometry.N
        self.exact = 2 * total + 2 <= N
        self.M = 2 * total + 2 if self.exact else geometry.M

    def to(self, coef):
        g = self.geometry
        if not self.exact:
            return to_padded(coef, g)
        M, dim = self.M, g.dim
        iN, iM = _sub_index(g.N, M)
        lead = coef.shape[: coef.ndim - dim]
        small = np.zeros(lead + (M,) * dim, dtype=complex)
        small[(Ellipsis,) + np.ix_(*([iM] * dim))] = coef[(Ellipsis,) + np.ix_(*([iN] * dim))]
        axes = tuple(range(len(lead), len(lead) + dim))
        return _fft.ifftn(small, axes=axes, workers=-1) * M ** dim

    def back(self, values):
        g = self.geometry
        if not self.exact:
            return from_padded(values, g)
        M, dim = self.M, g.dim
        iN, iM = _sub_index(g.N, M)
        lead = values.shape[: values.ndim - dim]
        axes = tuple(range(len(lead), len(lead) + dim))
        full = _fft.fftn(values, axes=axes, workers=-1) / M ** dim
        out = np.zeros(lead + g.shape, dtype=complex)
        out[(Ellipsis,) + np.ix_(*([iN] * dim))] = full[(Ellipsis,) + np.ix_(*([iM] * dim))]
        return out


def collocation(geometry, *coefs):
    return Collocation(geometry, sum(bandwidth(c, geometry) for c in coefs))


# calculus -----------------------------------------------------------------

def _parse_direction(direction):
    if isinstance(direction, tuple):
        kind, j = direction
    else:
        d = str(direction)
        kind, j = (("zbar", int(d[4:]) - 1) if d.startswith("zbar")
                   else ("z", int(d[1:]) - 1))
    if kind not in ("z", "zbar"):
        raise ValueError(f"unknown direction {direction!r}")
    return kind, j


def derivative(f, direction):
    """d/dz^j or d/dzbar^j of a field.

    ``direction`` is ``'z1'``, ``'zbar2'``, or a tuple ``('z', 0)`` with a
    zero based index.
    """
    kind, j = _parse_direction(direction)
    g = f.geometry
    if not 0 <= j < g.n:
        raise ValueError(f"direction index out of range for n={g.n}")
    mult = g.dz(j) if kind == "z" else g.dzbar(j)
    return SpectralField(g, f.coef * mult, f.valence, False)


def real_derivative(f, axis):
    g = f.geometry
    return SpectralField(g, f.coef * g.dreal(axis), f.valence, f.real)


def product(f, g, spec=None):
    """Dealiased pointwise product of two fields.

    Without ``spec`` the component arrays are multiplied with broadcasting.
    ``spec`` is an einsum signature over the component indices, e.g.
    ``'ij,jk->ik'`` for pointwise matrix composition.
    """
    if f.geometry != g.geometry:
        raise ValueError("fields live on different geometries")
    geo = f.geometry
    col = collocation(geo, f.coef, g.coef)
    a = col.to(f.coef)
    b = col.to(g.coef)
    if spec is None:
        if f.comp_shape and g.comp_shape and f.comp_shape != g.comp_shape:
            raise ValueError(f"incompatible valences {f.comp_shape} and {g.comp_shape}")
        try:
            c = a * b
        except ValueError as exc:
            raise ValueError(f"incompatible valences {f.comp_shape} and {g.comp_shape}") from exc
    else:
        lhs, out = spec.split("->")
        fa, fb = lhs.split(",")
        if len(fa) != len(f.comp_shape) or len(fb) != len(g.comp_shape):
            raise ValueError(f"contraction {spec!r} does not fit {f.comp_shape}, {g.comp_shape}")
        c = np.einsum(f"{fa}...,{fb}...->{out}...", a, b)
    return SpectralField(geo, col.back(c), f.valence, f.real and g.real)


def laplacian_multiplier(geometry):
    """Eigenvalue 2 pi^2 |k|^2 of the dbar-Laplacian on the flat torus."""
    return 2.0 * np.pi ** 2 * geometry.ksq()


# norms --------------------------------------------------------------------

@dataclass
class NormReport:
    ck: dict = field(default_factory=dict)
    sobolev: dict = field(default_factory=dict)


def _multi_indices(dim, order):
    for alpha in itertools.product(range(order + 1), repeat=dim):
        if sum(alpha) == order:
            yield alpha


def ck_norm(f, k):
    """Grid maximum of |d^alpha f| over real multi-indices |alpha| <= k."""
    g = f.geometry
    best = 0.0
    for order in range(k + 1):
        for alpha in _multi_indices(g.dim, order):
            mult = 1.0
            for a, p in enumerate(alpha):
                if p:
                    mult = mult * g.dreal(a) ** p
            vals = to_grid(f.coef * mult, g)
            best = max(best, float(np.max(np.abs(vals))) if vals.size else 0.0)
    return best


def sobolev_norm(f, s, weight="bessel"):
    """L^2_s norm with weight (1 + 4 pi^2 |k|^2)^s, or max(1, 4 pi^2 |k|^2)^s for weight="max"."""
    g = f.geometry
    k2 = 4.0 * np.pi ** 2 * g.ksq()
    if weight == "bessel":
        w = (1.0 + k2) ** s
    elif weight == "max":
        w = np.maximum(1.0, k2) ** s
    else:
        raise ValueError(f"unknown Sobolev weight {weight!r}")
    return float(np.sqrt(np.sum(w * np.abs(f.coef) ** 2)))


def norms(f, k_max):
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    rep = NormReport()
    for k in range(k_max + 1):
        rep.ck[k] = ck_norm(f, k)
        rep.sobolev[k] = sobolev_norm(f, k)
    return rep


def c0(f):
    """Grid sup-norm, the workhorse of the solver traces."""
    if f.coef.size == 0:
        return 0.0
    return float(np.max(np.abs(sample(f))))


# generation ---------------------------------------------------------------

def random_bandlimited(geometry, seed, comp_shape=(), bandwidth=None, amplitude=1.0,
                       real=False, valence="scalar"):
    """Deterministic random field with |k_j| <= bandwidth on every axis.

    Each component is normalised so that the sum of its absolute Fourier
    coefficients equals ``amplitude``; its grid sup-norm is therefore at most
    ``amplitude``.
    """
    b = geometry.K if bandwidth is None else bandwidth
    if b > geometry.K:
        raise ValueError(f"bandwidth {b} exceeds the truncation radius K={geometry.K}")
    if b < 0:
        raise ValueError("bandwidth must be non-negative")
    rng = np.random.default_rng(seed)
    shape = tuple(comp_shape) + geometry.shape
    coef = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    coef = coef * geometry.band_mask(b)
    if real:
        coef = 0.5 * (coef + conj_coef(coef, geometry.dim))
    axes = tuple(range(len(comp_shape), coef.ndim))
    total = np.sum(np.abs(coef), axis=axes, keepdims=True)
    total[total == 0] = 1.0
    coef = amplitude * coef / total
    return SpectralField(geometry, coef, valence, real)


def is_real(f, tol=1e-13):
    return bool(np.max(np.abs(f.coef - conj_coef(f.coef, f.geometry.dim)), initial=0.0) <= tol)


# snapshot IO --------------------------------------------------------------

def write_snapshot(f, path, threshold=0.0):
    """CSV with header component,k1..k2n,re,im; one row per stored coefficient."""
    g = f.geometry
    flat = f.coef.reshape((-1,) + g.shape)
    ks = np.fft.fftfreq(g.N, 1.0 / g.N).astype(int)
    header = ",".join(["component"] + [f"k{a + 1}" for a in range(g.dim)] + ["re", "im"])
    nz = np.argwhere(np.abs(flat) > threshold)
    v = flat[tuple(nz.T)]
    cols = [nz[:, 0]] + [ks[nz[:, 1 + a]] for a in range(g.dim)]
    ints = np.stack(cols, axis=1).tolist() if len(nz) else []
    with open(path, "w") as fh:
        fh.write(header + "\n")
        fh.writelines(",".join(map(str, i)) + f",{a:.17g},{b:.17g}\n"
                      for i, a, b in zip(ints, v.real.tolist(), v.imag.tolist()))


def read_snapshot(path, geometry, comp_shape=(), valence="scalar"):
    g = geometry
    ncomp = int(math.prod(comp_shape)) if comp_shape else 1
    flat = np.zeros((ncomp,) + g.shape, complex)
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        expected = ["component"] + [f"k{a + 1}" for a in range(g.dim)] + ["re", "im"]
        if header != expected:
            raise ValueError(f"unexpected snapshot header {header}")
        for row in r:
            c = int(row[0])
            idx = tuple(int(k) % g.N for k in row[1:1 + g.dim])
            flat[(c,) + idx] = float(row[-2]) + 1j * float(row[-1])
    return SpectralField(g, flat.reshape(tuple(comp_shape) + g.shape), valence)
