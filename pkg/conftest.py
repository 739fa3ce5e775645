import numpy as np
import pytest

from app.models.gate import gate_error
from app.optimizer.krotov import OptimizationTrace
from app.schemas.optimization import StopReason


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def step_optimizer():
    """Factory for a stand-in optimizer that hits the target exactly when T >= T_star.

    A hit lands on the locked phase, or on the first admissible phase otherwise.

    Below T_star the gate stays at the identity, which for d = 2 has gate error 1.
    """

    def factory(T_star: float, calls: list | None = None):
        def optimizer(system, target, initial, config):
            if calls is not None:
                calls.append(initial.T)
            if initial.T >= T_star - 1e-12:
                phase = config.mode.phase if config.mode.is_locked else target.phases[0]
                unitary = np.exp(1j * phase) * target.matrix
            else:
                unitary = np.eye(target.d, dtype=complex)
            error = gate_error(target, unitary)
            return OptimizationTrace(
                error_history=[error],
                final_pulse=initial,
                final_error=error,
                final_unitary=unitary,
                iterations=1,
                stop_reason=StopReason.converged,
                reference_controls=initial,
                initial_error=error,
            )

        return optimizer

    return factory


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, d: int) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


@pytest.fixture
def hermitian(rng):
    return lambda d: random_hermitian(rng, d)
