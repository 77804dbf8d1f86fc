"""Shared fixtures: the desk-scale lattice and a small lattice for dense checks."""

import pytest

import bcslab as bl

# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def desk_spec():
    probe = bl.ModelSpec(d=1, L=16.0, beta=8.0, nu=20.0, lam=0.0)
    lam_c = bl.critical_coupling(probe, bl.build_momentum_set(probe))
    return bl.ModelSpec(d=1, L=16.0, beta=8.0, nu=20.0, lam=2.0 * lam_c)


@pytest.fixture(scope="session")
def desk_lambda_c(desk_spec):
    return desk_spec.lam / 2.0


@pytest.fixture(scope="session")
def desk_M(desk_spec):
    return bl.build_momentum_set(desk_spec)


@pytest.fixture(scope="session")
def desk_Q(desk_M):
    return bl.build_transfer_set(desk_M)


@pytest.fixture(scope="session")
def desk_sol(desk_spec, desk_M):
    return bl.solve_gap(desk_spec, desk_M)


@pytest.fixture(scope="session")
def desk_qf(desk_spec, desk_M, desk_Q, desk_sol):
    return bl.coefficients(desk_spec, desk_M, desk_Q, desk_sol.r0, 0.0)


@pytest.fixture(scope="session")
def small_spec():
    # 4 momenta, 9 transfers: dense matrices stay tiny
    probe = bl.ModelSpec(d=1, L=4.0, beta=2.0, nu=4.0, lam=0.0)
    lam_c = bl.critical_coupling(probe, bl.build_momentum_set(probe))
    return bl.ModelSpec(d=1, L=4.0, beta=2.0, nu=4.0, lam=2.0 * lam_c)


@pytest.fixture(scope="session")
def small_M(small_spec):
    return bl.build_momentum_set(small_spec)


@pytest.fixture(scope="session")
def small_Q(small_M):
    return bl.build_transfer_set(small_M)


@pytest.fixture(scope="session")
def small_sol(small_spec, small_M):
    return bl.solve_gap(small_spec, small_M)


@pytest.fixture(scope="session")
def small_qf(small_spec, small_M, small_Q, small_sol):
    return bl.coefficients(small_spec, small_M, small_Q, small_sol.r0, 0.0)
