import numpy as np
import pytest
from scipy.optimize import linprog

from quantcap import _kernels_py, kernels

BACKENDS = [_kernels_py]
try:
    from quantcap import _core

    BACKENDS.append(_core)
except ImportError:  # extension not built
    pass

IDS = [b.__name__.rsplit(".", 1)[-1] for b in BACKENDS]


def random_lp(rng, m, n):
    A = rng.standard_normal((m, n))
    b = rng.uniform(0.1, 2.0, m)
    c = rng.standard_normal(n)
    # bounding row keeps the LP bounded
    A = np.vstack([A, np.ones(n)])
    b = np.append(b, 10.0)
    return A, b, c


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
@pytest.mark.parametrize("seed", range(20))
def test_simplex_matches_highs(impl, seed):
    rng = np.random.default_rng(seed)
    A, b, c = random_lp(rng, int(rng.integers(2, 12)), int(rng.integers(2, 8)))
    status, z, value = impl.simplex_max(A, b, c)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    assert status == 0 and ref.status == 0
    assert value == pytest.approx(-ref.fun, abs=1e-8)
    assert np.all(z >= -1e-12)
    assert np.all(A @ z <= b + 1e-9)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_simplex_unbounded(impl):
    A = np.array([[1.0, -1.0]])
    status, _, _ = impl.simplex_max(A, np.array([1.0]), np.array([0.0, 1.0]))
    assert status == 1


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_simplex_rejects_negative_rhs(impl):
    with pytest.raises(ValueError):
        impl.simplex_max(np.eye(2), np.array([1.0, -1.0]), np.ones(2))


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_simplex_degenerate(impl):
    # many constraints active at the optimum vertex
    A = np.array([[1.0, 0], [0, 1.0], [1.0, 1.0], [1.0, 2.0], [2.0, 1.0]])
    b = np.array([1.0, 1.0, 2.0, 3.0, 3.0])
    status, z, value = impl.simplex_max(A, b, np.array([1.0, 1.0]))
    assert status == 0
    assert value == pytest.approx(2.0)
    assert z == pytest.approx([1.0, 1.0])


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_sign_tally_brute_force(impl):
    rng = np.random.default_rng(3)
    Z = rng.standard_normal((500, 3))
    V = rng.standard_normal((4, 3))
    off = rng.standard_normal(4)
    counts = impl.sign_tally(Z, V, off)
    codes = ((Z @ V.T + off) > 0).astype(int) @ (1 << np.arange(4))
    assert np.array_equal(counts, np.bincount(codes, minlength=16))
    assert counts.sum() == 500


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not available")
    rng = np.random.default_rng(11)
    for _ in range(10):
        A, b, c = random_lp(rng, 9, 5)
        r1 = BACKENDS[0].simplex_max(A, b, c)
        r2 = BACKENDS[1].simplex_max(A, b, c)
        assert r1[0] == r2[0]
        assert r1[2] == pytest.approx(r2[2], abs=1e-10)
    Z = rng.standard_normal((1000, 3))
    V = rng.standard_normal((4, 3))
    off = rng.standard_normal(4)
    assert np.array_equal(BACKENDS[0].sign_tally(Z, V, off), BACKENDS[1].sign_tally(Z, V, off))


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")


def test_forced_fallback_selected_at_import():
    import os
    import subprocess
    import sys

    env = dict(os.environ, QUANTCAP_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from quantcap import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
