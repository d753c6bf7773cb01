import warnings

import pytest

from quadopto.params import DriveConfig, SystemParams, config_to_objects, load_config
from quadopto.steady_state import operating_branch, solve_steady_states

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def base():
    params, _ = config_to_objects(load_config())
    return params


def drive_at(params, power_mw, detuning_over_omega_m=1.0):
    return DriveConfig(power=power_mw * 1e-3, detuning=detuning_over_omega_m * params.omega_m)


def branch_at(params, power_mw, ratio, detuning_over_omega_m=1.0):
    p = params.with_ratio(ratio)
    return p, operating_branch(solve_steady_states(p, drive_at(p, power_mw, detuning_over_omega_m)))


def quiet_params(**kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SystemParams(**kw)
