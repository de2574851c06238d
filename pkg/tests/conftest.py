import pytest

from drgvr import ModelParams


@pytest.fixture
def params():
    """Workhorse parameter point: supercritical, removal-heavy."""
    return ModelParams(beta=1.0, eps=0.25)
