import numpy as np
import pytest
from hypothesis import settings

from laxpi import Coefficient, Curve, heisenberg, so3

settings.register_profile("laxpi", deadline=None, max_examples=40)
settings.load_profile("laxpi")


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def rodrigues(axis, theta):
    """Rotation by ``theta`` about unit ``axis``."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * K @ K


def so3_test_curve(grid_n=512):
    return Curve.from_terms(so3(), (0.0, 1.0),
                            [(0, Coefficient(sin=[(0.2, 1.0)])), (2, Coefficient(cos=[(0.2, 2.0)]))],
                            grid_n)


def heis_p2tq(grid_n=256):
    return Curve.from_terms(heisenberg(), (0.0, 1.0),
                            [(0, Coefficient((1.0,))), (1, Coefficient((0.0, 2.0)))], grid_n)


def unipotent_log(M):
    """Exact log of a unipotent matrix: finite Mercator series in ``M - I``."""
    N = M - np.eye(M.shape[0])
    out = np.zeros_like(N)
    P = np.eye(M.shape[0])
    for k in range(1, M.shape[0]):
        P = P @ N
        out += (-1) ** (k + 1) * P / k
    return out
