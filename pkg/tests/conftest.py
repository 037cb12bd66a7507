import numpy as np
import pytest

from pqcmc.gf2 import Gf2Matrix


def naive_matmul(a, b):
    """Triple-loop product over GF(2) on lists of lists."""
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = 0
            for t in range(k):
                acc ^= a[i][t] & b[t][j]
            out[i][j] = acc
    return out


def random_matrix(rng, rows, cols):
    return Gf2Matrix.from_bits(rng.integers(0, 2, (rows, cols)))


def random_invertible_by_rejection(rng, n):
    """Independent of the library: numpy draws, rank by plain elimination on uint8 rows."""
    while True:
        bits = rng.integers(0, 2, (n, n)).astype(np.uint8)
        work = bits.copy()
        r = 0
        for c in range(n):
            piv = [i for i in range(r, n) if work[i, c]]
            if not piv:
                continue
            work[[r, piv[0]]] = work[[piv[0], r]]
            for i in range(n):
                if i != r and work[i, c]:
                    work[i] ^= work[r]
            r += 1
        if r == n:
            return Gf2Matrix.from_bits(bits)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
