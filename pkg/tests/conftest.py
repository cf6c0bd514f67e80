import pytest

from poisson_growth import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the numba kernels once so timed assertions measure the
    # algorithms, not the JIT
    _kernels.warmup()
