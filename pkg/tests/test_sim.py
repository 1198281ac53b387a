import json

import pytest

from conftest import SCENARIOS, X, chain_dict, load_dict
from ndn_hns.errors import ConfigError
from ndn_hns.scenario import load_scenario, scenario_from_dict
from ndn_hns.sim import METRIC_FIELDS, default_timeout, report, run

LIGHT = "IoT://SBC:UET%20Taxila/CPED/Pakistan/Taxila/Hall-A/Lights/Switch:action/ON"


def repeat_chain(cs=10, gap=10) -> dict:
    raw = chain_dict()
    raw["consumers"][0]["workload"].append({"time": gap, "name": X})
    raw["topology"]["nodes"][1]["cs_capacity"] = cs
    return raw


def test_chain_single_interest():
    result = run(load_scenario(SCENARIOS / "chain.json"))
    m = result.metrics
    assert (m.interests_issued, m.interests_satisfied) == (1, 1)
    assert m.satisfaction_rate == 1.0
    assert m.mean_hop_count == 2
    assert result.requests[0].hop_count == 2


def test_repeat_served_from_router_cache():
    result = run(scenario_from_dict(repeat_chain()))
    assert result.metrics.cache_hits == 1
    assert [r.hop_count for r in result.requests] == [2, 1]
    assert "11\tR\tSendData(1)" in result.trace_text


def test_repeat_without_cache():
    result = run(scenario_from_dict(repeat_chain(cs=0)))
    assert result.metrics.cache_hits == 0
    assert [r.hop_count for r in result.requests] == [2, 2]


def test_zero_workload():
    raw = chain_dict()
    raw["consumers"] = []
    m = run(scenario_from_dict(raw)).metrics
    assert (m.interests_issued, m.interests_satisfied, m.satisfaction_rate) == (0, 0, 1.0)


def test_timeout_without_producer():
    raw = chain_dict()
    raw["consumers"][0]["workload"] = [{"time": 0, "name": X.replace("CPED", "EED")}]
    result = run(scenario_from_dict(raw))
    assert result.metrics.satisfaction_rate == 0.0
    assert result.trace[-1] == f"{default_timeout(scenario_from_dict(raw))}\tC\tTimeout\t{X.replace('CPED', 'EED')}"


def test_actuator_executes_each_command():
    raw = chain_dict()
    raw["topology"]["nodes"][2]["role"] = "actuator"
    raw["consumers"][0]["workload"] = [{"time": 0, "name": LIGHT}, {"time": 10, "name": LIGHT}]
    result = run(scenario_from_dict(raw))
    assert result.metrics.satisfaction_rate == 1.0
    assert result.trace_text.count("Actuate(ACK)") == 2
    assert result.metrics.cache_hits == 0
    assert set(result.actuators["P"].values()) == {"ON"}


def test_action_to_plain_producer_is_nacked():
    raw = chain_dict()
    raw["consumers"][0]["workload"] = [{"time": 0, "name": LIGHT}]
    assert "Actuate(NACK)" in run(scenario_from_dict(raw)).trace_text


def test_determinism_and_seed_sensitivity():
    cfg = load_scenario(SCENARIOS / "campus.json")
    a, b = run(cfg), run(cfg)
    assert a.trace_text == b.trace_text
    assert report(a.metrics) == report(b.metrics)
    assert run(cfg.with_seed(cfg.seed + 1)).trace_text != a.trace_text


def test_every_satisfaction_has_delivery():
    result = run(load_scenario(SCENARIOS / "campus.json"))
    for line in result.trace:
        t, node, label, name = line.split("\t")
        if label.startswith("Satisfied"):
            assert f"{t}\t{node}\tSendData(0)\t" in result.trace_text
    assert result.trace_text.count("\tSatisfied(") == result.metrics.interests_satisfied


def test_report_formats():
    m = run(scenario_from_dict(repeat_chain())).metrics
    csv_text = report(m, "csv")
    header, values = csv_text.splitlines()
    assert header.split(",") == list(METRIC_FIELDS)
    assert values.split(",")[2] == "1.000000"
    parsed = json.loads(report(m, "json"))
    assert list(parsed)[: len(METRIC_FIELDS)] == list(METRIC_FIELDS)
    for key in METRIC_FIELDS:
        assert parsed[key] == pytest.approx(getattr(m, key), abs=5e-7)
    assert parsed["popularity"] == m.popularity
    with pytest.raises(ValueError):
        report(m, "xml")


@pytest.mark.parametrize(
    "edit, path",
    [
        (lambda r: r["topology"]["links"][0].update(latency=0), "topology.links[0].latency"),
        (lambda r: r["consumers"][0]["workload"][0].update(time=500), "consumers[0].workload[0].time"),
        (lambda r: r["producers"][0].update(served_prefix="IoT://SBC:a:b"), "producers[0].served_prefix"),
        (lambda r: r.update(colour="red"), "colour"),
        (lambda r: r["topology"]["nodes"].append({"node_id": "C", "role": "router"}), "topology.nodes[3].node_id"),
        (lambda r: r["topology"]["nodes"][0].update(role="toaster"), "topology.nodes[0].role"),
        (lambda r: r["consumers"][0].update(node_id="Q"), "consumers[0].node_id"),
    ],
)
def test_config_errors_name_the_field(edit, path):
    raw = chain_dict()
    edit(raw)
    with pytest.raises(ConfigError) as info:
        scenario_from_dict(raw)
    assert path in str(info.value)


def test_two_campus_servers_rejected():
    raw = chain_dict()
    raw["topology"]["nodes"][0]["role"] = "campus_server"
    raw["topology"]["nodes"][1]["role"] = "campus_server"
    with pytest.raises(ConfigError):
        scenario_from_dict(raw)


def test_shipped_scenarios_load():
    for path in SCENARIOS.glob("*.json"):
        assert load_dict(path)["seed"] >= 0
        run(load_scenario(path))
