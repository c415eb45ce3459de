import numpy as np
import pytest

from pilotcs.seqgen import PeriodicSequence

_ACCEPTANCE = []


def random_sequence(M, rng):
    return PeriodicSequence.normalized(rng.standard_normal(M) + 1j * rng.standard_normal(M))


def dense_circulant_loops(b):
    """Circulant with first row b, built entry by entry."""
    b = np.asarray(getattr(b, "values", b))
    M = b.size
    A = np.empty((M, M), dtype=np.complex128)
    for r in range(M):
        for c in range(M):
            A[r, c] = b[(c - r) % M]
    return A


def dense_fold_matrix(pilot, L):
    """Folded convolution matrix built by convolving unit impulses and folding by hand."""
    p = np.asarray(getattr(pilot, "values", pilot))
    M = p.size
    cols = []
    for c in range(L):
        e = np.zeros(L)
        e[c] = 1.0
        lin = np.zeros(M + L - 1, dtype=np.complex128)
        for n in range(M):
            for k in range(L):
                lin[n + k] += p[n] * e[k]
        folded = lin.copy()
        for j in range(L - 1):
            folded[M + j] += folded[j]
        cols.append(folded[L - 1:])
    return np.stack(cols, axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    def record(name, passed, detail=""):
        _ACCEPTANCE.append((name, passed, detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
