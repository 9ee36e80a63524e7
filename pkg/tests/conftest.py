import pytest

from stabagree.adversary import Scenario, enumerate_runs, max_drops, unrestricted


def two_generals(**changes):
    base = Scenario(2, 2, "all", max_drops(1), horizon=3, burn_in=6, strategy="min",
                    name="two_generals")
    return base.replace(**changes) if changes else base


def triangle(**changes):
    base = Scenario(3, 2, "all", max_drops(1), horizon=2, burn_in=8, strategy="min",
                    name="triangle")
    return base.replace(**changes) if changes else base


def no_comm(**changes):
    base = Scenario(2, 2, "all", unrestricted(fair_tail=False), horizon=2,
                    strategy="min", name="no_comm")
    return base.replace(**changes) if changes else base


@pytest.fixture(scope="session")
def tg_system():
    return enumerate_runs(two_generals())


@pytest.fixture(scope="session")
def tri_system():
    return enumerate_runs(triangle())


@pytest.fixture(scope="session")
def tri_system_max():
    return enumerate_runs(triangle(strategy="max"))


@pytest.fixture(scope="session")
def nc_system():
    return enumerate_runs(no_comm())


def find_run(system, input, schedule):
    return system.run_id(tuple(input), tuple(frozenset(p) for p in schedule))


# -- acceptance summary: one line per criterion ---------------------------------

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if _acceptance.get(label, "passed") == "passed":
            _acceptance[label] = rep.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s.split()[0][1:])):
        status = "PASS" if _acceptance[label] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
