import numpy as np
import pytest

from gcdeform.gt_algebra import (GeneralizedVector, HolPoissonBase, LeviData, annulus_qconvex,
                                 b_field_matrix, b_transform_pointwise, b_transform_vector,
                                 build_gc, gc_type, lambda_matrix, lambda_rescale,
                                 levi_qconvexity, levi_signature, natural_pairing,
                                 pairing_matrix, poisson_bivector, sphere_levi,
                                 standard_complex, standard_symplectic)


def _skew(rng, m):
    a = rng.standard_normal((m, m))
    return a - a.T


def _gv(rng, m):
    return GeneralizedVector(rng.standard_normal(m), rng.standard_normal(m))


# pairing ---------------------------------------------------------------------

def test_pairing_diagonal_vector():
    u = GeneralizedVector([1.0, 0.0], [1.0, 0.0])
    assert natural_pairing(u, u) == 1.0


def test_pairing_tangent_directions_isotropic():
    u = GeneralizedVector([1.0, 0.0], [0.0, 0.0])
    v = GeneralizedVector([0.0, 1.0], [0.0, 0.0])
    assert natural_pairing(u, v) == 0.0


def test_pairing_b_invariant(rng):
    for _ in range(20):
        u, v = _gv(rng, 4), _gv(rng, 4)
        Bm = _skew(rng, 4)
        d = natural_pairing(b_transform_vector(u, Bm), b_transform_vector(v, Bm)) - natural_pairing(u, v)
        assert abs(d) < 1e-14


def test_pairing_dimension_mismatch():
    with pytest.raises(ValueError):
        natural_pairing(GeneralizedVector([1.0], [0.0]), GeneralizedVector([1.0, 0.0], [0.0, 0.0]))


# structures ------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_structures_square_to_minus_one(n):
    for J in (build_gc("complex", I=standard_complex(n)),
              build_gc("symplectic", omega=standard_symplectic(n)),
              build_gc("hol_poisson", sigma=HolPoissonBase(n, [0.7 - 0.2j] if n == 2 else []))):
        assert J.square_defect() < 1e-14
        assert J.orthogonality_defect() < 1e-14


def test_complex_type_is_n():
    assert gc_type(build_gc("complex", I=standard_complex(2))) == 2


def test_symplectic_type_is_zero():
    assert gc_type(build_gc("symplectic", omega=standard_symplectic(2))) == 0


def test_hol_poisson_with_zero_sigma_is_complex():
    a = build_gc("hol_poisson", sigma=HolPoissonBase.zero(2)).matrix()
    b = build_gc("complex", I=standard_complex(2)).matrix()
    assert np.array_equal(a, b)


def test_hol_poisson_type_jumps_where_sigma_vanishes():
    J = build_gc("hol_poisson", I=standard_complex(2), sigma=lambda p: [p[0]])
    assert gc_type(J, [0.0, 0.0]) == 2
    assert gc_type(J, [1.0, 0.0]) == 0


def test_build_gc_rejects_bad_input():
    with pytest.raises(ValueError):
        build_gc("symplectic", omega=np.zeros((4, 4)))
    with pytest.raises(ValueError):
        build_gc("nonsense")


def test_poisson_bivector_of_complex_is_zero():
    assert not np.any(poisson_bivector(build_gc("complex", I=standard_complex(2))))


def test_poisson_bivector_of_symplectic():
    W = standard_symplectic(2) * np.array([1.0, 1.0, 2.0, 2.0])[:, None]
    W = 0.5 * (W - W.T)
    P = poisson_bivector(build_gc("symplectic", omega=W))
    # omega as the map X -> i_X omega has matrix W^T
    assert np.allclose(P, -np.linalg.inv(W.T), atol=1e-15)


def test_poisson_bivector_of_hol_poisson():
    c = 0.3 + 0.8j
    P = poisson_bivector(build_gc("hol_poisson", sigma=HolPoissonBase(2, [c])))
    # sigma = c d_1 ^ d_2 with d_j = (d_xj - i d_yj) / 2
    u = np.array([0.5, -0.5j, 0, 0])
    v = np.array([0, 0, 0.5, -0.5j])
    sig = c * (np.outer(u, v) - np.outer(v, u))
    assert np.allclose(P, -4 * np.imag(sig.T), atol=1e-15)


def test_b_transform_zero_is_identity():
    J = build_gc("symplectic", omega=standard_symplectic(2))
    assert np.array_equal(b_transform_pointwise(J, np.zeros((4, 4))).matrix(), J.matrix())


def test_b_transform_preserves_type(rng):
    for J in (build_gc("complex", I=standard_complex(2)),
              build_gc("symplectic", omega=standard_symplectic(2)),
              build_gc("hol_poisson", sigma=HolPoissonBase(2, [1.0]))):
        for _ in range(5):
            assert gc_type(b_transform_pointwise(J, _skew(rng, 4))) == gc_type(J)


def test_b_transform_brute_force(rng):
    J = build_gc("symplectic", omega=standard_symplectic(2))
    Bm = _skew(rng, 4)
    E = np.eye(8)
    E[4:, :4] = Bm.T
    Einv = np.eye(8)
    Einv[4:, :4] = -Bm.T
    want = E @ J.matrix() @ Einv
    assert np.allclose(b_transform_pointwise(J, Bm).matrix(), want, atol=1e-14)


def test_b_transform_rejects_non_skew():
    J = build_gc("complex", I=standard_complex(1))
    with pytest.raises(ValueError):
        b_transform_pointwise(J, np.eye(2))


def test_b_field_matrix_is_orthogonal(rng):
    E = b_field_matrix(_skew(rng, 4))
    G = pairing_matrix(4)
    assert np.max(np.abs(E.T @ G @ E - G)) < 1e-15


# rescaling -------------------------------------------------------------------

def test_lambda_rescale_of_hol_poisson():
    base = HolPoissonBase(2, [0.4 + 0.3j])
    t = 1.7
    a = lambda_rescale(build_gc("hol_poisson", sigma=base), t).matrix()
    b = build_gc("hol_poisson", sigma=HolPoissonBase(2, t * t * base.sigma)).matrix()
    assert np.max(np.abs(a - b)) < 1e-13


def test_lambda_rescale_identity():
    J = build_gc("hol_poisson", sigma=HolPoissonBase(2, [1.0]))
    assert np.array_equal(lambda_rescale(J, 1.0).matrix(), J.matrix())


def test_lambda_matrix_matches_rescale(rng):
    J = build_gc("symplectic", omega=standard_symplectic(2))
    L = lambda_matrix(4, 2.5)
    want = L @ J.matrix() @ np.linalg.inv(L)
    assert np.allclose(lambda_rescale(J, 2.5).matrix(), want, atol=1e-14)


def test_lambda_preserves_pairing(rng):
    G = pairing_matrix(4)
    L = lambda_matrix(4, 0.6)
    for _ in range(10):
        u, v = rng.standard_normal(8), rng.standard_normal(8)
        assert abs((L @ u) @ G @ (L @ v) - u @ G @ v) < 1e-14


def test_lambda_rejects_nonpositive():
    with pytest.raises(ValueError):
        lambda_rescale(build_gc("complex", I=standard_complex(1)), 0.0)


# Levi ------------------------------------------------------------------------

def test_ball_levi_counts():
    d = sphere_levi(2, 1, [1.0, 0.0])
    r = levi_qconvexity(d)
    assert r["positive_count"] == 1 and r["negative_count"] == 0
    for q in (1, 2):
        assert levi_qconvexity(sphere_levi(2, q, [1.0, 0.0]))["is_q_convex"]


def test_inner_annulus_boundary_negative_definite():
    d = sphere_levi(3, 1, [0.5, 0, 0], inner=True, radius=0.5)
    assert levi_signature(d) == (0, 2)


def test_annulus_verdicts():
    n = 4
    for q in range(1, n - 1):
        assert annulus_qconvex(n, q)
    assert not annulus_qconvex(n, n - 1)


def test_levi_signature_mixed():
    H = np.diag([1.0, -1.0, 0.0, 0.0])
    g = np.array([0, 0, 0, 1.0])
    assert levi_signature(LeviData(H, g, 4, 1)) == (1, 1)


def test_levi_rejects_singular_point():
    with pytest.raises(ValueError):
        levi_signature(LeviData(np.eye(2), np.zeros(2), 2, 1))
