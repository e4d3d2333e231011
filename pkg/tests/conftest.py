import random
import sys

import pytest
from hypothesis import settings, strategies as st

from foliation_lab.poly import GF, QQ, PolyRing, Polynomial

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FP = GF()


def polys(ring: PolyRing, max_deg: int = 3, max_terms: int = 5, box: int = 9):
    """Hypothesis strategy for small random polynomials on ``ring``."""
    mono = st.tuples(*[st.integers(0, max_deg)] * ring.nvars).filter(lambda m: sum(m) <= max_deg)
    coeff = st.integers(-box, box)
    return st.dictionaries(mono, coeff, max_size=max_terms).map(lambda t: Polynomial(ring, t))


def homogeneous_polys(ring: PolyRing, deg: int, max_terms: int = 5, box: int = 9):
    mono = st.tuples(*[st.integers(0, deg)] * ring.nvars).filter(lambda m: sum(m) == deg)
    return st.dictionaries(mono, st.integers(-box, box), max_size=max_terms).map(lambda t: Polynomial(ring, t))


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture(params=[QQ, FP], ids=["QQ", "Fp"])
def field(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS.values():
        terminalreporter.write_line(line)
