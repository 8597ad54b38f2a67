import pytest

from deffuant import _kernels


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # Pay the one-off JIT cost up front so timed tests measure steady state.
    _kernels.warm_up()
