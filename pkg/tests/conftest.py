import pytest

from sticky_lab.chain import params_from_mixture


@pytest.fixture
def small_params():
    return params_from_mixture(3, 6, "1/4")
