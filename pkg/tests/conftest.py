import pytest

from sadic import fractal as fractal_mod
from sadic.algorithms import get_algorithm


@pytest.fixture(scope="session")
def cassaigne():
    return get_algorithm("cassaigne")


@pytest.fixture(scope="session")
def c0c1(cassaigne):
    return cassaigne.substitutions["c0"].compose(cassaigne.substitutions["c1"])


@pytest.fixture(scope="session")
def embedding():
    return fractal_mod.ComplexEmbedding()


@pytest.fixture(scope="session")
def reference_balls():
    return (
        fractal_mod.Ball.of("-0.19", "-0.15", "0.75"),
        fractal_mod.Ball.of("0.5", "-0.6", "0.655"),
        fractal_mod.Ball.of("0.865", "0.123", "0.566"),
    )


@pytest.fixture(scope="session")
def ball_cert(embedding, c0c1, reference_balls):
    return fractal_mod.certify_balls(embedding, c0c1, reference_balls, 8)
