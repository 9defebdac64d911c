import math
import os

import numpy as np
import pytest

from rcexp.probability import Channel, Distribution, DistortionModel

FIGDIR = os.path.join(os.path.dirname(__file__), os.pardir, "figures")


def fig_path(name: str) -> str:
    return os.path.abspath(os.path.join(FIGDIR, name))


def random_distribution(rng, k, floor=0.05) -> Distribution:
    raw = rng.random(k) + floor
    return Distribution(raw / raw.sum())


def random_channel(rng, nx, ny, floor=0.05) -> Channel:
    raw = rng.random((nx, ny)) + floor
    return Channel(raw / raw.sum(axis=1, keepdims=True))


def random_distortion(rng, nx, nk, lo=-1.0, hi=1.0) -> DistortionModel:
    return DistortionModel(rng.uniform(lo, hi, (nx, nk)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def fig1_model():
    from rcexp.modelspec import load_model

    return load_model(fig_path("fig1.json"))


@pytest.fixture(scope="session")
def fig2_model():
    from rcexp.modelspec import load_model

    return load_model(fig_path("fig2.json"))


@pytest.fixture(scope="session")
def fig3_model():
    from rcexp.modelspec import load_model

    return load_model(fig_path("fig3.json"))


def binary_entropy_nats(p: float) -> float:
    return -p * math.log(p) - (1 - p) * math.log(1 - p)
