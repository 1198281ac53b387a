import json
from pathlib import Path

import pytest
from hypothesis import strategies as st

from ndn_hns import (
    AttributesComponent,
    FreshnessSpec,
    HierarchicalComponent,
    Name,
    RootPrefix,
    TaskSpec,
    TaskType,
)
from ndn_hns.name import Digest, Encoding, FlatComponent
from ndn_hns.scenario import scenario_from_dict

FIXTURES = Path(__file__).parent / "fixtures"
SCENARIOS = Path(__file__).parent.parent / "src" / "ndn_hns" / "scenarios"

X = "IoT://SBC:UET%20Taxila/CPED/Pakistan/Taxila/14F-UET-PhD-CP-43/Timetable-14CP/.xls"
WORKED_TEXT = (
    X + ":session/14:/date/01-Jan:/time/13%3A30:/ver/1:/0:/5:/sense/Temperature"
)


def worked_hc() -> HierarchicalComponent:
    return HierarchicalComponent(
        "UET Taxila", "CPED", "Pakistan", "Taxila", "14F-UET-PhD-CP-43", "Timetable-14CP", ".xls"
    )


def worked_name() -> Name:
    ac = AttributesComponent(
        (("session", "14"), ("date", "01-Jan"), ("time", "13:30"), ("ver", "1")),
        FreshnessSpec.latest(),
        5,
        TaskSpec(TaskType.SENSE, "Temperature"),
    )
    return Name(RootPrefix("SBC"), worked_hc(), ac)


@pytest.fixture
def hc():
    return worked_hc()


@pytest.fixture
def example_name():
    return worked_name()


def load_dict(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def chain_dict() -> dict:
    return load_dict(SCENARIOS / "chain.json")


def chain_config(**edits):
    raw = chain_dict()
    for k, v in edits.items():
        raw[k] = v
    return scenario_from_dict(raw)


# random names: portions stress every escaped character, reserved words and non-ASCII text

_alphabet = st.sampled_from(list("abcXYZ019-_.~/:% %20ü漢€\t") + ["ts", "sense", "action", "0", "1", "..."])
portion = st.lists(_alphabet, min_size=1, max_size=6).map("".join)
codes = st.sampled_from(["SBC", "SCT", "SHM", "A", "ABCDEFGH"])
timestamps = st.integers(min_value=0, max_value=2**40)

freshness = st.one_of(
    st.none(),
    st.just(FreshnessSpec.latest()),
    st.just(FreshnessSpec.oldest()),
    timestamps.map(FreshnessSpec.generated_at),
)
tasks = st.one_of(st.none(), st.builds(TaskSpec, st.sampled_from(list(TaskType)), portion))


@st.composite
def attributes(draw):
    pairs = draw(st.dictionaries(portion, portion, max_size=4))
    fresh = draw(freshness)
    pop = draw(st.one_of(st.none(), st.integers(min_value=0, max_value=10**6)))
    task = draw(tasks)
    if not pairs and fresh is None and pop is None and task is None:
        return None
    return AttributesComponent(tuple(pairs.items()), fresh, pop, task)


digests = st.binary(min_size=32, max_size=32).map(Digest.from_bytes)
flats = st.one_of(
    st.none(),
    st.builds(FlatComponent, digests, digests, digests, st.sampled_from(list(Encoding))),
)


@st.composite
def names(draw):
    hc = HierarchicalComponent(*[draw(portion) for _ in range(7)])
    return Name(RootPrefix(draw(codes)), hc, draw(attributes()), draw(flats))
