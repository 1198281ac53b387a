import pytest

from conftest import X
from ndn_hns import NamePrefix, RootPrefix, parse, parse_prefix
from ndn_hns.engine import (
    APP_FACE,
    DataPacket,
    InterestPacket,
    NodeState,
    make_ack,
    make_data,
    satisfies,
)
from ndn_hns.errors import NotAnAction, UnknownFace

CPED = parse_prefix("IoT://SBC:UET%20Taxila/CPED")
TEMP = "IoT://SBC:UET%20Taxila/CPED/Pakistan/Taxila/Sensor-7/Temperature/.csv"
LIGHT = "IoT://SBC:UET%20Taxila/CPED/Pakistan/Taxila/Hall-A/Lights/Switch:action/ON"


def router(cs=10, faces=3) -> NodeState:
    node = NodeState("R", "router", cs)
    for f in range(1, faces + 1):
        node.add_face(f, f"peer{f}")
    node.add_route(CPED, [3])
    return node


def interest(text, nonce=1) -> InterestPacket:
    return InterestPacket(parse(text), nonce)


def data(text, t) -> DataPacket:
    return make_data(parse(text), t, b"v")


def labels(effects):
    return [e.label for e in effects]


def test_fresh_interest_forwards():
    node = router()
    assert labels(node.on_interest(interest(X), 1)) == ["PitCreate", "ForwardInterest(3)"]


def test_second_interest_aggregates():
    node = router()
    node.on_interest(interest(X, 1), 1)
    assert labels(node.on_interest(interest(X, 2), 2)) == ["PitAddFace(2)", "Drop(aggregated)"]
    assert node.pit[interest(X).key].faces == {1, 2}


def test_data_to_two_faces():
    node = router()
    node.on_interest(interest(X, 1), 1)
    node.on_interest(interest(X, 2), 2)
    effects = node.on_data(data(X, 0), 3)
    assert labels(effects) == ["CacheInsert", "SendData(1)", "SendData(2)", "PitRemove"]
    assert not node.pit


def test_cs_hit_short_circuits():
    node = router()
    node.on_data(data(X, 0), 3)
    effects = node.on_interest(interest(X, 9), 1)
    assert labels(effects) == ["SendData(1)"]
    assert not node.pit
    assert node.cs[effects[0].name].popularity == 1
    assert node.cs_hits == 1 and node.cs_lookups == 1


def test_unsolicited_data_only_cached():
    node = router()
    assert labels(node.on_data(data(X, 0), 3)) == ["CacheInsert"]


def test_no_route_and_loop_drops():
    node = router()
    eed = X.replace("CPED", "EED")
    assert labels(node.on_interest(interest(eed), 1)) == ["Drop(no-route)"]
    assert node.unsatisfiable == 1
    node.on_interest(interest(X, 5), 1)
    assert labels(node.on_interest(interest(X, 5), 2)) == ["Drop(loop)"]


def test_nonce_window_expires():
    node = router()
    node.nonce_window = 10
    node.on_interest(interest(X, 5), 1, now=0)
    node.on_data(data(X, 0), 3, now=1)
    assert labels(node.on_interest(interest(X, 5), 2, now=10)) == ["SendData(2)"]


def test_pit_expiry():
    node = router()
    node.pit_lifetime = 100
    node.on_interest(interest(X), 1, now=0)
    effects = node.on_interest(interest(TEMP, 2), 1, now=100)
    assert labels(effects)[0] == "PitExpire"


def test_latest_and_oldest_selection():
    node = router()
    node.on_data(data(TEMP, 5), 3)
    node.on_data(data(TEMP, 9), 3)
    assert node.cs_lookup(interest(TEMP + ":0")).data.generated_at == 9
    assert node.cs_lookup(interest(TEMP + ":1")).data.generated_at == 5
    assert node.cs_lookup(interest(TEMP)).data.generated_at == 9
    assert node.cs_lookup(interest(TEMP + ":ts/5")).data.generated_at == 5
    assert node.cs_lookup(interest(TEMP + ":ts/7")) is None


def test_empty_cs_lookup():
    assert router().cs_lookup(interest(X)) is None


def test_lru_eviction_capacity_two():
    node = router(cs=2)
    a, b, c = (data(TEMP.replace("Sensor-7", s), 0) for s in ("S1", "S2", "S3"))
    node.on_data(a, 3)
    node.on_data(b, 3)
    node.cs_lookup(InterestPacket(a.name, 1))  # a becomes most recent
    effects = node.on_data(c, 3)
    assert labels(effects) == ["CacheEvict", "CacheInsert"]
    assert effects[0].name == b.key
    assert set(node.cs) == {a.key, c.key}


def test_zero_capacity_disables_cs():
    node = router(cs=0)
    assert labels(node.on_data(data(X, 0), 3)) == []
    node.on_interest(interest(X), 1)
    assert node.cs_lookups == 0


def test_fib_longest_prefix_match():
    node = router()
    node.add_route(NamePrefix(RootPrefix("SBC"), ("UET Taxila",)), [1])
    name = parse(X)
    assert node.fib_longest_prefix_match(name).prefix == CPED
    assert node.fib_longest_prefix_match(parse(X.replace("CPED", "EED"))).next_faces == (1,)
    empty = NodeState("E")
    assert empty.fib_longest_prefix_match(name) is None


def test_multipath_fans_out():
    node = router()
    node.multipath = True
    node.add_route(CPED, [2, 3])
    assert labels(node.on_interest(interest(X), 1)) == ["PitCreate", "ForwardInterest(2)", "ForwardInterest(3)"]


def test_local_producer_face():
    node = NodeState("P", "producer", 0)
    node.add_face(1, "R")
    node.serve(CPED)
    assert labels(node.on_interest(interest(X), 1)) == ["PitCreate", "ForwardInterest(0)"]
    assert labels(node.on_data(data(X, 0), APP_FACE)) == ["SendData(1)", "PitRemove"]


def test_unknown_face():
    with pytest.raises(UnknownFace):
        router().on_interest(interest(X), 7)
    with pytest.raises(UnknownFace):
        router().add_route(CPED, [9])


def test_satisfies_filters():
    d = make_data(parse(X + ":session/14:/date/01-Jan"), 3, b"")
    assert satisfies(parse(X), d)
    assert satisfies(parse(X + ":session/14"), d)
    assert not satisfies(parse(X + ":session/15"), d)
    assert not satisfies(parse(X + ":sense/Temperature"), d)
    assert not satisfies(parse(X.replace(".xls", ".pdf")), d)


def test_data_stamp_must_agree():
    with pytest.raises(ValueError):
        DataPacket(parse(X + ":ts/4"), b"", 5)


def test_issue_action_and_ack():
    node = router()
    pkt = node.issue_action(parse(LIGHT))
    assert pkt.name.task.is_push
    with pytest.raises(NotAnAction):
        node.issue_action(parse(TEMP + ":sense/Temperature"))
    ack = make_ack(pkt.name, 4)
    assert not ack.cacheable and ack.payload == b"ACK"


def test_ack_not_cached_so_command_repeats():
    node = router()
    node.add_route(parse_prefix("IoT://SBC:UET%20Taxila/CPED/Pakistan/Taxila/Hall-A"), [2])
    for nonce in (1, 2):
        effects = node.on_interest(node.issue_action(parse(LIGHT)), 1)
        assert labels(effects) == ["PitCreate", "ForwardInterest(2)"]
        assert labels(node.on_data(make_ack(parse(LIGHT), nonce), 2)) == ["SendData(1)", "PitRemove"]
    assert not node.cs
