import pytest

from hsecant import backend


@pytest.fixture
def kernels():
    """Names of the kernel backends importable in this build."""
    return backend.available()


requires_compiled = pytest.mark.skipif(
    "compiled" not in backend.available(), reason="compiled kernels not built"
)
