import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from birdyn.catalog import catalog_bd_sigma_tau, catalog_df_epsilon, catalog_henon, catalog_quadratic_involution
from birdyn.picdyn import dynamical_degree, invariant_classes

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session", autouse=True)
def iterate_cache(tmp_path_factory):
    # composed iterates are shared between tests through the on-disk cache
    d = tmp_path_factory.mktemp("iterates")
    old = os.environ.get("BIRDYN_CACHE_DIR")
    os.environ["BIRDYN_CACHE_DIR"] = str(d)
    yield d
    if old is None:
        os.environ.pop("BIRDYN_CACHE_DIR", None)
    else:
        os.environ["BIRDYN_CACHE_DIR"] = old


class Loaded:
    def __init__(self, d):
        self.d = d
        self.mm = d.mm
        M = d.mm.pullback_matrix()
        self.lam = dynamical_degree(M)
        self.spectral = invariant_classes(M, d.mm.pushforward_matrix(), d.mm.model, d.mm.curves, self.lam)
        self._cls = None

    @property
    def cls(self):
        if self._cls is None:
            from birdyn.basecurves import classify

            self._cls = classify(self.mm, self.spectral, 6)
        return self._cls


@pytest.fixture(scope="session")
def df():
    return Loaded(catalog_df_epsilon(Fraction(1, 4)))


@pytest.fixture(scope="session")
def df35():
    return Loaded(catalog_df_epsilon(Fraction(3, 5)))


@pytest.fixture(scope="session")
def bd():
    return Loaded(catalog_bd_sigma_tau(2, 1))


@pytest.fixture(scope="session")
def henon():
    return catalog_henon()


@pytest.fixture(scope="session")
def involution():
    return catalog_quadratic_involution()


_criteria: list[str] = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _criteria.extend(v for k, v in report.user_properties if k == "criterion")


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in _criteria:
            terminalreporter.write_line(line)
