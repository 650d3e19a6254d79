import pytest

from ladderlab.clasp import ClaspContext


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("clasp-cache"))


@pytest.fixture(scope="session")
def ctx2(cache_dir):
    return ClaspContext(2, cache_dir=cache_dir)


@pytest.fixture(scope="session")
def ctx3(cache_dir):
    return ClaspContext(3, cache_dir=cache_dir)


@pytest.fixture(scope="session")
def ctx4(cache_dir):
    return ClaspContext(4, cache_dir=cache_dir)


@pytest.fixture(scope="session")
def ctx5(cache_dir):
    return ClaspContext(5, cache_dir=cache_dir)
