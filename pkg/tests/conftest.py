import pytest

from bosonic_cert.code_states import CatParams, build_cat_basis, build_gaussian_input
from bosonic_cert.fock_algebra import FockVector

CUTOFF = 40


@pytest.fixture
def cutoff() -> int:
    return CUTOFF


@pytest.fixture
def vacuum() -> FockVector:
    return FockVector.basis(0, CUTOFF)


@pytest.fixture
def cat_alpha_2() -> FockVector:
    return build_cat_basis(CatParams(2.0), CUTOFF).zero


@pytest.fixture
def cat_alpha_1() -> FockVector:
    return build_cat_basis(CatParams(1.0), CUTOFF).zero


@pytest.fixture
def coherent_state():
    def build(alpha: complex) -> FockVector:
        return build_gaussian_input('coherent', CUTOFF, alpha=alpha)

    return build


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.delenv('BOSONIC_CERT_THREADS', raising=False)
