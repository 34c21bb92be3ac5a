from __future__ import annotations

import random

import pytest

from hltrees import kernels

py = kernels.backend("python")
try:
    cy = kernels.backend("cython")
except ImportError:  # pragma: no cover - extension not built
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def _mem(b, h, p, rng):
    return [bytearray(1 if rng.random() < p else 0 for _ in range(b**n)) for n in range(h)]


def test_selected_backend_is_known():
    assert kernels.IMPLEMENTATION in ("python", "cython")
    with pytest.raises(ValueError):
        kernels.backend("fortran")


def test_d1_least_full_tree():
    mem = [bytearray([1] * 2**n) for n in range(3)]
    assert py.d1_least(mem, 2, [0, 2]) == [[0], [0, 2]]
    assert py.d1_least(mem, 2, [1, 2], root=1) == [[1], [2, 3]]


@needs_cython
def test_backends_agree_d1():
    rng = random.Random(0)
    for _ in range(200):
        b = rng.choice([2, 3])
        h = 4 if b == 2 else 3
        mem = _mem(b, h, rng.choice([0.5, 0.7, 0.9]), rng)
        k = rng.randint(1, h)
        ls = sorted(rng.sample(range(h), k))
        root = rng.choice([-1, 0])
        assert py.d1_least(mem, b, ls, root) == cy.d1_least(mem, b, ls, root)


@needs_cython
@pytest.mark.parametrize("k,levels,need", [(2, (1, 2, 3), [1, 2, 4]), (2, (0, 2, 3), [1, 2, 4]), (3, (0, 1, 2, 3), [1, 1, 2, 4]), (2, (0, 1), [1, 1])])
def test_backends_agree_adversary(k, levels, need):
    a = py.adversary_d1(2, k, levels, need, 10**7)
    c = cy.adversary_d1(2, k, levels, need, 10**7)
    assert a[0] == c[0] and a[2] == c[2]
    assert [tuple(x) for x in a[1] or []] == [tuple(x) for x in c[1] or []]


def test_adversary_budget_status():
    status, _, units = py.adversary_d1(2, 2, (1, 2, 3, 4), [1, 2, 4, 8], 5)
    assert status == kernels.STATUS_BUDGET and units > 5


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = (
        "from hltrees import kernels; from hltrees.density_search import udhl_exact;"
        "print(kernels.IMPLEMENTATION, udhl_exact([2], 2, 1, 3).value)"
    )
    env = dict(os.environ, HLTREES_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "2"]
