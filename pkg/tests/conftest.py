import numpy as np
import pytest

from qubitlocc.qstate import ket, kron

S2 = 1 / np.sqrt(2)
PLUS = np.array([S2, S2], dtype=complex)
MINUS = np.array([S2, -S2], dtype=complex)
ZERO, ONE = ket("0"), ket("1")
BELL = (ket("00") + ket("11")) * S2


def projector(v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def mixture(*vecs):
    return sum(projector(v / np.linalg.norm(v)) for v in vecs) / len(vecs)


RHO1 = mixture(ket("00"), kron(PLUS, PLUS))
RHO2 = mixture(kron(ONE, MINUS), kron(MINUS, ONE))


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
