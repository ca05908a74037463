import numpy as np
import pytest

from curvedecay.curve import helix_curve, moment_curve, planar_curve
from curvedecay.oscquad import CutoffSpec


@pytest.fixture(scope="session")
def moment3():
    return moment_curve(3)


@pytest.fixture(scope="session")
def moment4():
    return moment_curve(4)


@pytest.fixture(scope="session")
def helix():
    return helix_curve((-1.5, 1.5))


@pytest.fixture(scope="session")
def parabola3():
    return planar_curve(3, 2)


@pytest.fixture(scope="session")
def wide_bump():
    return CutoffSpec(center=0.0, half_width=0.9, family="bump")


@pytest.fixture(scope="session")
def narrow_bump():
    return CutoffSpec(center=0.0, half_width=0.5, family="bump")


def random_unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_rotation(rng, d):
    m = rng.standard_normal((d, d))
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))
