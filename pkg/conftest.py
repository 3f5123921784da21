import numpy as np
import pytest


@pytest.fixture(autouse=True)
def _legacy_numpy_scalar_repr(request):
    """Doctests were written against numpy<2 scalar reprs (1.0, not np.float64(1.0))."""
    if not isinstance(request.node, pytest.DoctestItem):
        yield
        return
    previous = np.get_printoptions()
    np.set_printoptions(legacy='1.25')
    yield
    np.set_printoptions(**previous)
