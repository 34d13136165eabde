"""
Pointwise linear algebra on V + V*, the fiber of the double tangent bundle.

Everything here works in the real frame (dx^1, dy^1, ..., dx^n, dy^n) of
R^{2n} = C^n.  A generalized complex structure is stored as the four blocks
of

    J = [[-A, pi], [beta, A*]]

acting on column vectors (X, xi).  Two-forms and bivectors enter as the maps
they induce by contraction in the first slot: B(X) = i_X B, pi(xi) = i_xi pi.
For a form with matrix Bm (B(X, Y) = X^T Bm Y) the map is Bm^T.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-10
LEVI_TOL = 1e-10


@dataclass
class GeneralizedVector:
    """X + xi with X a tangent and xi a cotangent vector (real frame)."""
    X: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X)
        self.xi = np.asarray(self.xi)
        if self.X.shape != self.xi.shape:
            raise ValueError("vector and form parts must have the same length")

    @property
    def dim(self):
        return self.X.shape[-1]

    def stacked(self):
        return np.concatenate([self.X, self.xi], axis=-1)

    @classmethod
    def from_stacked(cls, v):
        v = np.asarray(v)
        m = v.shape[-1] // 2
        return cls(v[..., :m], v[..., m:])


def natural_pairing(u, v):
    """<X + xi, Y + eta> = (xi(Y) + eta(X)) / 2."""
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")
    return 0.5 * (np.sum(u.xi * v.X, axis=-1) + np.sum(v.xi * u.X, axis=-1))


def pairing_matrix(m):
    """Gram matrix of the pairing on R^m + R^m*."""
    z = np.zeros((m, m))
    e = np.eye(m)
    return 0.5 * np.block([[z, e], [e, z]])


# standard structures --------------------------------------------------------

def standard_complex(n):
    """Constant complex structure of C^n, z^j = x^j + i y^j."""
    I = np.zeros((2 * n, 2 * n))
    for j in range(n):
        I[2 * j + 1, 2 * j] = 1.0
        I[2 * j, 2 * j + 1] = -1.0
    return I


def standard_symplectic(n):
    """Matrix of omega = sum dx^j ^ dy^j."""
    W = np.zeros((2 * n, 2 * n))
    for j in range(n):
        W[2 * j, 2 * j + 1] = 1.0
        W[2 * j + 1, 2 * j] = -1.0
    return W


def holomorphic_frame(n):
    """Columns d/dz^j expressed in the real frame."""
    Z = np.zeros((2 * n, n), complex)
    for j in range(n):
        Z[2 * j, j] = 0.5
        Z[2 * j + 1, j] = -0.5j
    return Z


def skew_from_upper(n, coeffs):
    """Full skew matrix C from its strictly upper entries, row major."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    C = np.zeros(coeffs.shape[:-1] + (n, n), complex)
    iu = np.triu_indices(n, 1)
    if coeffs.shape[-1] != len(iu[0]):
        raise ValueError(f"need {len(iu[0])} bivector coefficients for n={n}")
    C[..., iu[0], iu[1]] = coeffs
    C[..., iu[1], iu[0]] = -coeffs
    return C


@dataclass
class HolPoissonBase:
    """Constant holomorphic Poisson bivector sigma = sum_{i<j} c^{ij} d_i ^ d_j on C^n."""
    n: int
    sigma: np.ndarray

    def __post_init__(self):
        self.sigma = np.atleast_1d(np.asarray(self.sigma, dtype=complex))
        if self.sigma.shape != (self.n * (self.n - 1) // 2,):
            raise ValueError(f"sigma needs {self.n * (self.n - 1) // 2} coefficients")
        if self.n > 2:
            raise NotImplementedError("[sigma, sigma] is only automatic for n <= 2")

    @property
    def C(self):
        """Skew coefficient matrix: sigma = 1/2 sum C^{ij} d_i ^ d_j."""
        return skew_from_upper(self.n, self.sigma)

    @property
    def S(self):
        """sigma as a map T*^{1,0} -> T^{1,0}: (S xi)^j = xi_i C^{ij}."""
        return self.C.T

    @property
    def I(self):
        return standard_complex(self.n)

    @property
    def P(self):
        """Real Poisson bivector P = -4 Im(sigma), as a map T* -> T."""
        return poisson_from_sigma(self.n, self.S)

    @classmethod
    def zero(cls, n):
        return cls(n, np.zeros(n * (n - 1) // 2))


def sigma_real(n, S):
    """The map of sigma on real covectors, complex 2n x 2n."""
    Z = holomorphic_frame(n)
    return Z @ S @ Z.T


def poisson_from_sigma(n, S):
    return -4.0 * np.imag(sigma_real(n, S))


# generalized complex structures -----------------------------------------------

class GCStructure:
    """Blocks of J = [[-A, pi], [beta, A*]] (possibly with leading grid axes)."""

    def __init__(self, A, pi, beta, Astar):
        self.A = np.asarray(A)
        self.pi = np.asarray(pi)
        self.beta = np.asarray(beta)
        self.Astar = np.asarray(Astar)

    @property
    def m(self):
        return self.A.shape[-1]

    @property
    def n(self):
        return self.m // 2

    def matrix(self):
        top = np.concatenate([-self.A, self.pi], axis=-1)
        bot = np.concatenate([self.beta, self.Astar], axis=-1)
        return np.concatenate([top, bot], axis=-2)

    @classmethod
    def from_matrix(cls, Jm):
        m = Jm.shape[-1] // 2
        return cls(-Jm[..., :m, :m], Jm[..., :m, m:], Jm[..., m:, :m], Jm[..., m:, m:])

    def at(self, point=None):
        if point is None or self.A.ndim == 2:
            return self
        idx = tuple(point)
        return GCStructure(self.A[idx], self.pi[idx], self.beta[idx], self.Astar[idx])

    def square_defect(self):
        Jm = self.matrix()
        return float(np.max(np.abs(Jm @ Jm + np.eye(2 * self.m))))

    def orthogonality_defect(self):
        Jm = self.matrix()
        G = pairing_matrix(self.m)
        return float(np.max(np.abs(np.swapaxes(Jm, -1, -2) @ G @ Jm - G)))


class GCStructureField(GCStructure):
    """A structure given pointwise by a function of the point."""

    def __init__(self, fn, n):
        self._fn = fn
        J0 = fn(np.zeros(n, complex))
        super().__init__(J0.A, J0.pi, J0.beta, J0.Astar)

    def at(self, point=None):
        if point is None:
            return self
        return self._fn(np.asarray(point, dtype=complex))


def build_gc(kind, **data):
    """Block matrices of the three standard structures.

    kind='complex'      data: I (2n x 2n)
    kind='symplectic'   data: omega (matrix of the two-form)
    kind='hol_poisson'  data: I, sigma (HolPoissonBase, coefficient array, or a
                        callable point -> coefficient array)
    """
    if kind == "complex":
        I = np.asarray(data["I"], dtype=float)
        z = np.zeros_like(I)
        return GCStructure(I, z, z, I.T)
    if kind == "symplectic":
        W = np.asarray(data["omega"], dtype=float)
        if np.max(np.abs(W + W.T)) > 1e-12:
            raise ValueError("omega is not skew")
        if abs(np.linalg.det(W)) < 1e-12:
            raise ValueError("omega is degenerate")
        wflat = W.T
        z = np.zeros_like(W)
        return GCStructure(z, -np.linalg.inv(wflat), wflat, z)
    if kind == "hol_poisson":
        sig = data["sigma"]
        I = data.get("I")
        if isinstance(sig, HolPoissonBase):
            n = sig.n
        else:
            n = data.get("n") or np.asarray(I).shape[-1] // 2
        if I is None:
            I = standard_complex(n)
        I = np.asarray(I, dtype=float)
        if I.shape != (2 * n, 2 * n) or np.max(np.abs(I - standard_complex(n))) > 1e-14:
            raise ValueError("holomorphic Poisson structures are built on the standard I")
        if callable(sig):
            return GCStructureField(
                lambda p: build_gc("hol_poisson", I=I, sigma=HolPoissonBase(n, sig(p))), n)
        base = sig if isinstance(sig, HolPoissonBase) else HolPoissonBase(n, sig)
        P = base.P
        if np.max(np.abs(P + P.T)) > 1e-12:
            raise ValueError("sigma does not give a skew bivector")
        return GCStructure(I, P, np.zeros_like(I), I.T)
    raise ValueError(f"unknown structure kind {kind!r}")


def gc_type(J, point=None):
    """dim_C(T* cap J T*) = half the corank of the top right block."""
    Jp = J.at(point) if point is not None else J
    pi = Jp.pi
    m = pi.shape[-1]
    s = np.linalg.svd(pi, compute_uv=False)
    rank = int(np.sum(s > RANK_TOL))
    return (m - rank) // 2


def poisson_bivector(J):
    return J.pi


def b_field_matrix(Bm):
    """e^B on (X, xi) as a 2m x 2m matrix, with e^B(X + xi) = X + xi + i_X B."""
    Bm = np.asarray(Bm)
    m = Bm.shape[-1]
    E = np.zeros(Bm.shape[:-2] + (2 * m, 2 * m), dtype=Bm.dtype)
    E[..., :m, :m] = np.eye(m)
    E[..., m:, m:] = np.eye(m)
    E[..., m:, :m] = np.swapaxes(Bm, -1, -2)
    return E


def b_transform_vector(u, Bm):
    Bm = np.asarray(Bm)
    return GeneralizedVector(u.X, u.xi + np.einsum("...ab,...a->...b", Bm, u.X))


def b_transform_pointwise(J, Bm):
    """e^B J e^{-B}."""
    Bm = np.asarray(Bm)
    if np.max(np.abs(Bm + np.swapaxes(Bm, -1, -2)), initial=0.0) > 1e-12:
        raise ValueError("B must be skew")
    if np.iscomplexobj(Bm) and np.max(np.abs(Bm.imag), initial=0.0) > 0:
        raise ValueError("B must be real")
    E = b_field_matrix(Bm)
    Einv = b_field_matrix(-Bm)
    return GCStructure.from_matrix(E @ J.matrix() @ Einv)


def lambda_rescale(J, t):
    """Conjugate J by lambda_t(X + xi) = t X + xi / t."""
    if not t > 0:
        raise ValueError(f"rescaling parameter must be positive, got {t}")
    return GCStructure(J.A, t * t * J.pi, J.beta / (t * t), J.Astar)


def lambda_matrix(m, t):
    return np.diag(np.concatenate([np.full(m, float(t)), np.full(m, 1.0 / t)]))


# Levi form ------------------------------------------------------------------

@dataclass
class LeviData:
    """Complex Hessian H[i, j] = d^2 phi / dz^i dzbar^j and gradient d phi / dzbar."""
    hessian: np.ndarray
    gradient: np.ndarray
    n: int
    q: int

    def __post_init__(self):
        self.hessian = np.asarray(self.hessian, dtype=complex)
        self.gradient = np.asarray(self.gradient, dtype=complex)
        if np.max(np.abs(self.hessian - self.hessian.conj().T)) > 1e-14:
            raise ValueError("Levi hessian must be Hermitian")


def levi_signature(d):
    """(positive, negative) eigenvalue counts of the Levi form on CR."""
    g = d.gradient
    if np.linalg.norm(g) == 0:
        raise ValueError("gradient vanishes: boundary point is not regular")
    # CR = {u : sum u^i g_i = 0}, an n-1 dimensional subspace
    _, _, vh = np.linalg.svd(g.reshape(1, -1))
    Q = vh[1:].conj().T
    L = Q.conj().T @ d.hessian @ Q
    ev = np.linalg.eigvalsh(0.5 * (L + L.conj().T))
    return int(np.sum(ev > LEVI_TOL)), int(np.sum(ev < -LEVI_TOL))


def levi_qconvexity(d):
    pos, neg = levi_signature(d)
    return {"positive_count": pos, "negative_count": neg,
            "is_q_convex": bool(pos >= d.n - d.q or neg >= d.q + 1)}


def sphere_levi(n, q, point, inner=False, radius=1.0):
    """LeviData of phi = +-(|z|^2 - r^2) at a boundary point."""
    z = np.asarray(point, dtype=complex)
    s = -1.0 if inner else 1.0
    return LeviData(s * np.eye(n), s * z, n, q)


def annulus_qconvex(n, q, r_in=0.5, r_out=1.0):
    """q-convexity of {r_in < |z| < r_out}: both boundary spheres must pass."""
    e1 = np.zeros(n, complex)
    e1[0] = 1.0
    outer = levi_qconvexity(sphere_levi(n, q, r_out * e1))
    inner = levi_qconvexity(sphere_levi(n, q, r_in * e1, inner=True))
    return outer["is_q_convex"] and inner["is_q_convex"]
