import os
import subprocess
import sys

import numpy as np
import pytest

from gcdeform import _kernels, _kernels_py

_core = pytest.importorskip("gcdeform._core")


def _inputs(P, n, seed=0):
    rng = np.random.default_rng(seed)
    r = lambda: 0.1 * (rng.standard_normal((P, n, n)) + 1j * rng.standard_normal((P, n, n)))
    sk = lambda a: a - np.swapaxes(a, 1, 2)
    S = rng.standard_normal((n, n)) + 0j
    return S - S.T, sk(r()), r(), sk(r()), sk(r()), r(), r(), sk(r())


@pytest.mark.parametrize("n", [1, 2])
def test_compiled_matches_python(n):
    args = _inputs(500, n)
    a = _kernels_py.bfield_apply(*args)
    b = _core.bfield_apply(*args)
    for x, y in zip(a[:3], b[:3]):
        assert np.max(np.abs(x - y)) < 1e-14
    assert abs(a[3] - b[3]) < 1e-14


def test_singular_point_reports_zero_rcond():
    S = np.array([[0, -1], [1, 0]], complex)
    B20 = np.linalg.inv(S)[None] * -1.0
    z = np.zeros((1, 2, 2), complex)
    for fn in (_kernels_py.bfield_apply, _core.bfield_apply):
        assert fn(S, z, z, z, B20, z, z, z)[3] == 0.0


def test_compiled_rejects_large_n():
    with pytest.raises(ValueError):
        _core.bfield_apply(*_inputs(2, 3))


def test_default_backend_is_compiled():
    assert _kernels.BACKEND == "compiled"


def test_pure_python_switch():
    env = dict(os.environ, GCDEFORM_PURE_PYTHON="1")
    r = subprocess.run([sys.executable, "-c", "import gcdeform; print(gcdeform.BACKEND)"],
                       capture_output=True, text=True, env=env)
    assert r.stdout.strip() == "python"
