"""
Two-forms and one-forms on the torus in the complex frame (dz, dzbar).

A two-form is B = 1/2 sum M_ab theta^a ^ theta^b with theta = (dz, dzbar),
stored through the blocks M11 (dz dz), M12 (dz dzbar) and M22 (dzbar dzbar);
M21 = -M12^T.  As maps X -> i_X B the bidegree pieces read

    B20  : T^{1,0} -> T*^{1,0}   = M11^T
    B11  : T^{1,0} -> T*^{0,1}   = M12^T
    B11p : T^{0,1} -> T*^{1,0}   = -M12
    B02  : T^{0,1} -> T*^{0,1}   = M22^T
"""
from __future__ import annotations

import numpy as np

from .spectral_fields import SpectralField, c0, conj_coef, to_grid


def _T(a):
    return np.swapaxes(a, 0, 1)


class TwoForm:
    def __init__(self, geometry, M11, M12, M22):
        shp = (geometry.n, geometry.n) + geometry.shape
        self.geometry = geometry
        self.M11 = np.broadcast_to(np.asarray(M11, complex), shp).copy()
        self.M12 = np.broadcast_to(np.asarray(M12, complex), shp).copy()
        self.M22 = np.broadcast_to(np.asarray(M22, complex), shp).copy()

    @classmethod
    def zero(cls, geometry):
        return cls(geometry, 0, 0, 0)

    @classmethod
    def constant(cls, geometry, M11=None, M12=None, M22=None):
        n = geometry.n
        out = []
        for M in (M11, M12, M22):
            c = np.zeros((n, n) + geometry.shape, complex)
            if M is not None:
                c[(slice(None), slice(None)) + (0,) * geometry.dim] = M
            out.append(c)
        return cls(geometry, *out)

    # endomorphisms
    @property
    def B20(self):
        return _T(self.M11)

    @property
    def B11(self):
        return _T(self.M12)

    @property
    def B11p(self):
        return -self.M12

    @property
    def B02(self):
        return _T(self.M22)

    def __add__(self, o):
        return TwoForm(self.geometry, self.M11 + o.M11, self.M12 + o.M12, self.M22 + o.M22)

    def __sub__(self, o):
        return TwoForm(self.geometry, self.M11 - o.M11, self.M12 - o.M12, self.M22 - o.M22)

    def __mul__(self, s):
        return TwoForm(self.geometry, s * self.M11, s * self.M12, s * self.M22)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def conj(self):
        """Complex conjugate: swaps dz and dzbar."""
        d = self.geometry.dim
        cj = lambda a: conj_coef(a, d)
        return TwoForm(self.geometry, cj(self.M22), -_T(cj(self.M12)), cj(self.M11))

    def reality_defect(self):
        c = self.conj()
        return max(float(np.max(np.abs(a - b))) for a, b in
                   ((self.M11, c.M11), (self.M12, c.M12), (self.M22, c.M22)))

    def sup(self):
        return max(float(np.max(np.abs(to_grid(M, self.geometry)))) for M in
                   (self.M11, self.M12, self.M22))

    def part02(self):
        return SpectralField(self.geometry, self.M22, "form02")

    def full_matrix_samples(self):
        """Grid samples of the 2n x 2n complex block matrix M."""
        g = self.geometry
        M11, M12, M22 = (to_grid(M, g) for M in (self.M11, self.M12, self.M22))
        top = np.concatenate([M11, M12], axis=1)
        bot = np.concatenate([-_T(M12), M22], axis=1)
        return np.concatenate([top, bot], axis=0)

    def real_matrix_samples(self):
        """Grid samples of the real matrix Bm with B(X, Y) = X^T Bm Y (real frame).

        Returned with the grid axes first: shape grid + (2n, 2n).
        """
        n = self.geometry.n
        M = self.full_matrix_samples()
        T = complex_coframe(n)
        Mg = np.moveaxis(M, (0, 1), (-2, -1))
        return np.real(T.T @ Mg @ T)


def complex_coframe(n):
    """Rows dz^1..dz^n, dzbar^1..dzbar^n in the real coframe (dx^1, dy^1, ...)."""
    T = np.zeros((2 * n, 2 * n), complex)
    for j in range(n):
        T[j, 2 * j] = 1.0
        T[j, 2 * j + 1] = 1j
        T[n + j, 2 * j] = 1.0
        T[n + j, 2 * j + 1] = -1j
    return T


def d_one_form(geometry, a, b):
    """TwoForm d(a_j dz^j + b_j dzbar^j)."""
    g = geometry
    n = g.n
    dz = [g.dz(i) for i in range(n)]
    dzb = [g.dzbar(i) for i in range(n)]
    shp = (n, n) + g.shape
    M11, M12, M22 = (np.zeros(shp, complex) for _ in range(3))
    for i in range(n):
        for j in range(n):
            M11[i, j] = dz[i] * a[j] - dz[j] * a[i]
            M12[i, j] = dz[i] * b[j] - dzb[j] * a[i]
            M22[i, j] = dzb[i] * b[j] - dzb[j] * b[i]
    return TwoForm(g, M11, M12, M22)


class OneForm:
    """xi = sum a_j dz^j + b_j dzbar^j with coefficient arrays of shape (n,) + grid."""

    def __init__(self, geometry, a, b):
        shp = (geometry.n,) + geometry.shape
        self.geometry = geometry
        self.a = np.broadcast_to(np.asarray(a, complex), shp).copy()
        self.b = np.broadcast_to(np.asarray(b, complex), shp).copy()

    @classmethod
    def zero(cls, geometry):
        return cls(geometry, 0, 0)

    @classmethod
    def from_01(cls, geometry, u):
        """u + conj(u) for a (0,1)-form u with coefficient array (n,) + grid."""
        d = geometry.dim
        return cls(geometry, conj_coef(u, d), u)

    def __add__(self, o):
        return OneForm(self.geometry, self.a + o.a, self.b + o.b)

    def __sub__(self, o):
        return OneForm(self.geometry, self.a - o.a, self.b - o.b)

    def __mul__(self, s):
        return OneForm(self.geometry, s * self.a, s * self.b)

    __rmul__ = __mul__

    def d(self):
        return d_one_form(self.geometry, self.a, self.b)

    def reality_defect(self):
        d = self.geometry.dim
        return float(np.max(np.abs(self.b - conj_coef(self.a, d))))

    def sup(self):
        g = self.geometry
        return max(c0(SpectralField(g, self.a)), c0(SpectralField(g, self.b)))

    def real_samples(self):
        """Grid samples of the real-frame components (dx^1, dy^1, ...), grid axes first."""
        n = self.geometry.n
        T = complex_coframe(n)
        coeffs = np.concatenate([to_grid(self.a, self.geometry), to_grid(self.b, self.geometry)])
        return np.real(np.einsum("a...,ar->...r", coeffs, T))
