"""Pure numpy versions of the pointwise kernels (grid axis first, n x n blocks)."""
from __future__ import annotations

import numpy as np


def _sw(a):
    return np.swapaxes(a, -1, -2)


def bfield_apply(S, E1, E2, E3, B20, B11, B11p, B02):
    """Closed two-form action on (E1, E2, E3), pointwise over the leading axis.

    Returns (E1', E2', E3', rcond) with rcond the smallest reciprocal
    condition number of 1 + B20 (S + E1) over the batch.
    """
    n = E1.shape[-1]
    Sig = S + E1
    Q = np.eye(n) + B20 @ Sig
    if n == 1:
        Qi = 1.0 / Q
        rcond = 1.0
    else:
        det = Q[:, 0, 0] * Q[:, 1, 1] - Q[:, 0, 1] * Q[:, 1, 0]
        Qi = np.empty_like(Q)
        # singular points are reported through rcond; the caller raises
        with np.errstate(divide="ignore", invalid="ignore"):
            Qi[:, 0, 0] = Q[:, 1, 1] / det
            Qi[:, 1, 1] = Q[:, 0, 0] / det
            Qi[:, 0, 1] = -Q[:, 0, 1] / det
            Qi[:, 1, 0] = -Q[:, 1, 0] / det
        # for 2 x 2 blocks 1 / (|Q|_F |Q^-1|_F) = |det Q| / |Q|_F^2, finite even when det = 0
        nq2 = np.sum(np.abs(Q) ** 2, axis=(1, 2))
        rcond = float(np.min(np.abs(det) / np.where(nq2 > 0, nq2, 1.0)))
    E2T = -_sw(E2)
    with np.errstate(invalid="ignore"):
        E1n = (E1 - S @ B20 @ Sig) @ Qi
        E2n = (E2 + B11 @ Sig) @ Qi
        E3n = E3 + B02 + B11 @ E2T - E2n @ (B11p + B20 @ E2T)
    return E1n, E2n, E3n, rcond
