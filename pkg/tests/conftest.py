import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def witness():
    from dagselect import witness_graph

    return witness_graph()


@pytest.fixture
def demo():
    from dagselect import demo_graph

    return demo_graph()
