import numpy as np
import pytest

from rpsim import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile (or load from cache) every jitted path once, so timed tests
    # measure physics rather than JIT latency.
    _kernels.warmup()


def random_density(rng, dim=8, trace=1.0):
    """Random positive matrix with the requested trace."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho * (trace / np.trace(rho).real)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
