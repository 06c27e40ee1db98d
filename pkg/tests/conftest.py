import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pisym.generators import random_process, random_symnet

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=10**9)


def processes(budget=5, separate=True, replication=False):
    return seeds.map(lambda s: random_process(random.Random(s), budget, separate=separate, replication=replication))


def symnets(budget=5, degrees=(2, 3)):
    return seeds.map(lambda s: random_symnet(random.Random(s), budget, degrees))


@pytest.fixture
def P():
    from pisym.parser import parse

    return parse
