import itertools

import numpy as np
import pytest

from fwmsim.interaction import CouplingGraph

_ACCEPTANCE = []


class CriterionLog:
    def __init__(self, number, title):
        self.number = number
        self.title = title

    def check(self, passed, detail):
        _ACCEPTANCE.append((self.number, self.title, bool(passed), detail))
        return passed


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    return CriterionLog(*marker.args)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")


def random_graph(rng, n_modes, eps_max=2.0, p_edge=0.5):
    """Uniformly random edge subset with strengths in [0, eps_max]."""
    edges = [(i, j, rng.uniform(0.0, eps_max))
             for i, j in itertools.combinations(range(n_modes), 2) if rng.random() < p_edge]
    return CouplingGraph(n_modes, tuple(edges))


def supermode(n_modes, weights, quad="x"):
    """Unnormalised quadrature vector with ``weights[m]`` on mode ``m``."""
    c = np.zeros(2 * n_modes)
    for m, w in weights.items():
        c[2 * m + (quad == "p")] = w
    return c
