import pytest

from app.core.config import reset_settings
from app.services.ground import make_params
from app.services.straighten import Engine


@pytest.fixture(autouse=True)
def clean_settings():
    reset_settings()
    yield
    reset_settings()


@pytest.fixture(scope="session")
def p1():
    return make_params(1, 0, ["1"], ["0"])


@pytest.fixture(scope="session")
def p2():
    return make_params(2, 0, ["0", "2"], ["0", "1"])


@pytest.fixture(scope="session")
def p3():
    return make_params(1, 0, ["0"], ["5"])


@pytest.fixture(scope="session")
def engine_p1(p1):
    return Engine(p1, size_limit=8)


@pytest.fixture(scope="session")
def engine_p2(p2):
    return Engine(p2, size_limit=8)


@pytest.fixture(scope="session")
def engine_p3(p3):
    return Engine(p3, size_limit=8)
