import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from vvlf import experiments, forms

DATA_DIR = os.path.join(os.path.dirname(forms.__file__), "data")

ONE_DIM_WEIGHTS = (12, 16, 18, 20, 22, 26)


@pytest.fixture(scope="session")
def delta():
    return forms.delta_expansion(45)


@pytest.fixture(scope="session")
def scalar_forms():
    return {k: forms.scalar_basis(k) for k in ONE_DIM_WEIGHTS}


@pytest.fixture(scope="session")
def scalar_bases():
    return {k: experiments.builtin_scalar_basis(k) for k in ONE_DIM_WEIGHTS}


@pytest.fixture(scope="session")
def jacobi_fixture():
    return forms.load_jacobi(os.path.join(DATA_DIR, "jacobi_k10_m1.jcf"))


@pytest.fixture(scope="session")
def jacobi_fullfan():
    return forms.load_jacobi(os.path.join(DATA_DIR, "jacobi_k10_m1_fullfan.jcf"))


@pytest.fixture(scope="session")
def jacobi_decomposed(jacobi_fixture):
    return forms.theta_decompose(jacobi_fixture)
