import itertools
import zlib

import numpy as np
import pytest

from kirkwood.generate import make_rng
from kirkwood.linalg import OrthonormalBasis, pvm_from_basis, validate_density

SQ2 = np.sqrt(2)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = (KET0 + KET1) / SQ2
MINUS = (KET0 - KET1) / SQ2
PSI_Y = (KET0 + 1j * KET1) / SQ2  # (|0> + i|1>)/sqrt(2)


def dm(v):
    return validate_density(np.outer(v, np.conj(v)))


def brute_trace(*mats):
    """Tr(M_1 M_2 ... M_k) by explicit index summation."""
    d = mats[0].shape[0]
    total = 0j
    for idx in itertools.product(range(d), repeat=len(mats)):
        term = 1 + 0j
        for s, m in enumerate(mats):
            term *= m[idx[s], idx[(s + 1) % len(mats)]]
        total += term
    return total


@pytest.fixture
def z_pvm():
    return pvm_from_basis(OrthonormalBasis.standard(2))


@pytest.fixture
def x_pvm():
    return pvm_from_basis(OrthonormalBasis([PLUS, MINUS]))


@pytest.fixture
def rng(request):
    return make_rng(12345, zlib.crc32(request.node.name.encode()))


_ACCEPTANCE = {}


def record_acceptance(number, name, passed, detail):
    _ACCEPTANCE[number] = (name, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {name}: {detail}")
