import pytest

from bosonlab import SolverConfig, solve_ground_state

_CACHE = {}


def cached_solution(n, r_max, init="gaussian", init_param=1.0, tol=1e-10):
    """Solver runs shared across test modules; keyed by the full config."""
    key = (n, r_max, init, init_param, tol)
    if key not in _CACHE:
        _CACHE[key] = solve_ground_state(
            SolverConfig(n=n, r_max=r_max, init=init, init_param=init_param, tol=tol)
        )
    return _CACHE[key]


@pytest.fixture(scope="session")
def small_sol():
    return cached_solution(256, 60.0, tol=1e-9)


@pytest.fixture(scope="session")
def sol_2048_400():
    return cached_solution(2048, 400.0)


@pytest.fixture(scope="session")
def sol_4096_400():
    return cached_solution(4096, 400.0)


@pytest.fixture(scope="session")
def sol_2048_200():
    return cached_solution(2048, 200.0)


@pytest.fixture(scope="session")
def sol_4096_200():
    return cached_solution(4096, 200.0)
