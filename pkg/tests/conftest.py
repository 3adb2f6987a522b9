import numpy as np
import pytest

from hoferbilliards import FourierSupportSpec, build_fourier_table, disc_table


@pytest.fixture(scope="session")
def disc():
    return disc_table()


@pytest.fixture(scope="session")
def mild_ellipse():
    # support bulge along the x-axis: major axis endpoints at q = 0, 1/2
    return build_fourier_table(FourierSupportSpec(1.0, cos=[0.0, 0.03]))


def random_support_spec(rng, harmonics=4, amplitude=0.03):
    """Admissible random support spec; rejection-samples until convex."""
    for _ in range(100):
        spec = FourierSupportSpec(
            1.0,
            cos=rng.uniform(-amplitude, amplitude, harmonics),
            sin=rng.uniform(-amplitude, amplitude, harmonics),
        )
        theta = np.linspace(0, 2 * np.pi, 512, endpoint=False)
        if spec.rho(theta).min() > 0.02:
            return spec
    raise AssertionError("could not sample a convex support spec")


@pytest.fixture
def spec_factory():
    return random_support_spec
