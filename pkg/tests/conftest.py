import os
import random

import pytest
from hypothesis import HealthCheck, settings

from quadpairs.exact_rings import (
    GaloisField,
    Integers,
    IntegersMod,
    Laurent,
    Poly,
    Product,
    Quotient,
    ring_from_json,
)

settings.register_profile(
    "exact",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "exact"))

Z = Integers()
Z2 = IntegersMod(2)
Z4 = IntegersMod(4)
Z5 = IntegersMod(5)
F4 = GaloisField(2)
F16 = GaloisField(4)
ZX_4X = ring_from_json({"quot": {"poly": ["Z", "x"], "by": "4x"}})
ZY_4Y = ring_from_json({"quot": {"poly": ["Z", "1/x"], "by": "4x^-1"}})
Z4_LAURENT = Laurent(Z4, "x")
Z2_LAURENT = Laurent(Z2, "x")
F2X = Poly(Z2, "x")
F4_CURVE = Quotient(Poly(F4, "x"), "x^2-1")


def all_elements(R):
    return [R.element(d) for d in R.elements()]


def sample(R, rng, D=2):
    return R.element(R.random(rng, D))


@pytest.fixture
def rng():
    return random.Random(20240611)


DESCRIPTORS = {
    "Z": Z,
    "Z/4": Z4,
    "Z/5": Z5,
    "GF(4)": F4,
    "GF(16)": F16,
    "Z[x]/<4x>": ZX_4X,
    "Z[1/x]/<4/x>": ZY_4Y,
    "Z/4[x,1/x]": Z4_LAURENT,
    "F2[x]": F2X,
    "GF(4)[x]/<x^2-1>": F4_CURVE,
    "GF(4)^2": Product([F4, F4]),
    "Z/4 x Z": Product([Z4, Z]),
}
