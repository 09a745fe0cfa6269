import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nshyp.expr import parse
from nshyp.nset import NSet
from nshyp.privacy import StripPolicy

settings.register_profile(
    "det",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("det")


BMI_BOX = [(0.0, 200.0), (0.0, 250.0)]


@pytest.fixture(scope="session")
def bmi_policy() -> StripPolicy:
    """Obesity-threshold reporting policy: weight x1, height x2, 1/rho = 10."""
    return StripPolicy(domain_box=NSet.box(BMI_BOX), protected_index=1,
                       boundary=parse("0.003*x2^2", 2), rho=0.1)


def bmi_boundary(x2):
    """Independent straight-line boundary evaluation for oracles."""
    return 0.003 * np.asarray(x2, dtype=float) ** 2
