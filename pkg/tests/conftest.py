import pytest

from duopoly.services.model_service import build_best_reply, new_uncertainty_set

FIGURES = {
    "fig1a": (0.6, 0.2, 0.3, 0.0),
    "fig1b": (0.4, 0.1, 0.3, 0.0),
    "fig1c": (0.3, 0.15, 0.275, 0.0),
    "fig1d": (0.3, 0.1375, 0.275, 0.0),
    "fig1e": (0.3, 0.1, 0.25, 0.0),
    "fig1f": (0.3, 0.1, 0.28284275, 0.0),
    "fig3": (0.6, 0.15, 0.5, 0.0),
    "fig5": (0.33, 0.1, 0.3, 0.0),
    "fig6": (0.3, 0.1, 0.25, 0.0),
    "fig7": (0.29, 0.11, 0.235, 0.01),
}


def make_map(name: str):
    return build_best_reply(new_uncertainty_set(*FIGURES[name]))


@pytest.fixture
def fig1a_map():
    return make_map("fig1a")


@pytest.fixture
def fig1c_map():
    return make_map("fig1c")


@pytest.fixture
def fig1d_map():
    return make_map("fig1d")


@pytest.fixture
def fig3_map():
    return make_map("fig3")


@pytest.fixture
def fig5_map():
    return make_map("fig5")


@pytest.fixture
def fig6_map():
    return make_map("fig6")


@pytest.fixture
def fig7_map():
    return make_map("fig7")
