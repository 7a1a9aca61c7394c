import numpy as np
import pytest

from itoalg import builders
from itoalg.builders import ThermalInput, VacuumInput

RANDOM_KINDS = ("vacuum", "thermal", "mixed")


def builder_fixtures():
    """Named builder outputs covering every family and a few sums."""
    w1, p1 = builders.wiener(1), builders.poisson(1)
    therm = builders.thermal(ThermalInput(2, np.diag([0.75, 0.25])))
    out = {
        "newton": builders.newton(),
        "wiener1": w1,
        "wiener2": builders.wiener(2),
        "wiener3": builders.wiener(3),
        "poisson1": p1,
        "poisson2": builders.poisson(2),
        "poisson3": builders.poisson(3),
        "vacuum1_zero": builders.vacuum(VacuumInput.named(1, "zero")),
        "vacuum1_scalar": builders.vacuum(VacuumInput.named(1, "scalar")),
        "vacuum2_full": builders.vacuum(VacuumInput.named(2, "full")),
        "vacuum2_diagonal": builders.vacuum(VacuumInput.named(2, "diagonal")),
        "vacuum2_half": builders.vacuum(VacuumInput(2, (np.diag([1.0, 0.0]),))),
        "thermal1": builders.thermal(ThermalInput(1, np.eye(1))),
        "thermal2_tracial": builders.thermal(ThermalInput(2, np.eye(2) / 2)),
        "thermal2": therm,
        "mixed_wp": builders.orthogonal_sum(w1, p1),
        "wiener_thermal": builders.orthogonal_sum(w1, therm),
        "vacuum_wiener": builders.orthogonal_sum(builders.vacuum(VacuumInput.named(1, "scalar")), w1),
    }
    return out


BUILDERS = builder_fixtures()


def random_fixture(seed):
    return builders.random_algebra(seed, kind=RANDOM_KINDS[seed % 3])


RANDOM = {f"random{seed}": random_fixture(seed) for seed in range(20)}
ALL = {**BUILDERS, **RANDOM}


@pytest.fixture(params=sorted(BUILDERS), ids=sorted(BUILDERS))
def builder_spec(request):
    return BUILDERS[request.param]


@pytest.fixture(params=sorted(ALL), ids=sorted(ALL))
def any_spec(request):
    return ALL[request.param]


def rand_coords(rng, n, count=None):
    shape = (n,) if count is None else (count, n)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
