import itertools
import math
from fractions import Fraction

import numpy as np
import pytest


def sigma_brute(k, lam):
    """sigma_k by enumerating all k-subsets (fsum for a clean reference)."""
    if k == 0:
        return 1.0
    return math.fsum(math.prod(c) for c in itertools.combinations(lam, k))


def kkt_exact(n, b, c, a):
    """
    Exact stationary point of -b sum x - sum_{i<j} x_i x_j + mu (a.x + C)
    by Gaussian elimination over the rationals. Returns (value, x, mu).
    """
    b, c = Fraction(b), Fraction(c)
    a = [Fraction(v) for v in a]
    m = n + 1
    rows = []
    for i in range(n):
        # -b - sum_{j != i} x_j + mu a_i = 0
        rows.append([Fraction(0) if j == i else Fraction(-1) for j in range(n)] + [a[i], b])
    rows.append(a + [Fraction(0), -c])
    for col in range(m):
        piv = next(r for r in range(col, m) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                f = rows[r][col] / rows[col][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    sol = [rows[i][m] / rows[i][i] for i in range(m)]
    x, mu = sol[:n], sol[n]
    value = -b * sum(x) - sum(x[i] * x[j] for i in range(n) for j in range(i + 1, n))
    return value, x, mu


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
