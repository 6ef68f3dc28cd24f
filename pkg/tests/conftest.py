import pytest

from fairsub.model import FairnessFractions, PartitionedUniverse
from fairsub.oracles import TagCoverOracle

# Four elements in two color groups with tag sets
#   0: {A}   1: {A, B}   2: {C}   3: {C, D}
# used as the worked micro-instance throughout the suite.


@pytest.fixture
def t1_universe():
    return PartitionedUniverse([0, 0, 1, 1])


@pytest.fixture
def t1_oracle():
    return TagCoverOracle([["A"], ["A", "B"], ["C"], ["C", "D"]])


@pytest.fixture
def t1_fractions():
    return FairnessFractions.build(["2/5", "2/5"], ["3/5", "3/5"])
