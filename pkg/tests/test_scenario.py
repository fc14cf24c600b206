import numpy as np
import pytest

from icisim import DEFAULT_COST_SCALE, ScenarioError, bundled_path
from icisim import scenario as scn


def minimal_doc():
    node = {"vmag_V": 300.0, "v_dc_star_kV": 1.0, "c_dc_mF": 1.0,
            "g_dc_S": 0.1, "q_cost": 1.0, "p_load_kW": 10.0}
    return {
        "topology": {
            "nodes": [dict(node), dict(node)],
            "edges": [{"i": 1, "j": 2, "reactance_ohm": 0.1}],
        },
        "controller": {"mode": "secondary"},
        "comm_edges": [{"i": 1, "j": 2}],
    }


class TestFromDict:
    def test_units_and_indexing(self):
        sc = scn.from_dict(minimal_doc())
        assert sc.n == 2
        np.testing.assert_array_equal(sc.loads, [10e3, 10e3])
        assert sc.inverters[0].v_dc_star == 1000.0
        assert sc.inverters[0].c_dc == 1e-3
        assert sc.topology.edges == ((0, 1),)
        assert sc.cost_scale == DEFAULT_COST_SCALE

    def test_defaults(self):
        sc = scn.from_dict(minimal_doc())
        assert sc.f_nominal == 50.0
        assert sc.integrator.h == 5e-5
        assert sc.integrator.t_end == 20.0
        assert sc.events == []

    def test_primary_setpoints_default_to_loads(self):
        doc = minimal_doc()
        doc["controller"] = {"mode": "primary"}
        del doc["comm_edges"]
        sc = scn.from_dict(doc)
        np.testing.assert_array_equal(sc.p_m_star, sc.loads)

    def test_rejects_bad_frequency(self):
        doc = minimal_doc()
        doc["nominal"] = {"f_hz": 55.0}
        with pytest.raises(ScenarioError, match="f_hz"):
            scn.from_dict(doc)

    def test_rejects_nonpositive_reactance_naming_edge(self):
        doc = minimal_doc()
        doc["topology"]["edges"][0]["reactance_ohm"] = -0.1
        with pytest.raises(ScenarioError,
                           match=r"edges\[0\] \(1,2\): reactance_ohm"):
            scn.from_dict(doc)

    def test_rejects_missing_node_field(self):
        doc = minimal_doc()
        del doc["topology"]["nodes"][1]["g_dc_S"]
        with pytest.raises(ScenarioError, match="g_dc_S"):
            scn.from_dict(doc)

    def test_rejects_bad_mode_and_cost(self):
        doc = minimal_doc()
        doc["controller"]["mode"] = "tertiary"
        with pytest.raises(ScenarioError, match="mode"):
            scn.from_dict(doc)
        doc = minimal_doc()
        doc["topology"]["nodes"][0]["q_cost"] = -1.0
        with pytest.raises(ScenarioError, match="q_cost"):
            scn.from_dict(doc)

    def test_rejects_event_out_of_bounds(self):
        doc = minimal_doc()
        doc["events"] = [{"t_s": 100.0, "node": 1, "new_load_kW": 11.0}]
        with pytest.raises(ScenarioError, match="t_s"):
            scn.from_dict(doc)
        doc["events"] = [{"t_s": 1.0, "node": 7, "new_load_kW": 11.0}]
        with pytest.raises(ScenarioError, match="node"):
            scn.from_dict(doc)


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["table1", "single_ici"])
    def test_dict_round_trip(self, name):
        sc = scn.load(bundled_path(name))
        back = scn.from_dict(scn.to_dict(sc))
        assert back.mode == sc.mode
        assert back.topology.edges == sc.topology.edges
        np.testing.assert_array_equal(back.loads, sc.loads)
        np.testing.assert_array_equal(back.q_cost, sc.q_cost)
        assert back.cost_scale == sc.cost_scale
        assert back.integrator == sc.integrator
        assert back.events == sc.events
        if sc.mode == "secondary":
            assert back.comm.edges == sc.comm.edges
        else:
            np.testing.assert_array_equal(back.p_m_star, sc.p_m_star)

    def test_file_round_trip(self, table1, tmp_path):
        path = tmp_path / "copy.scenario"
        scn.dump(table1, path)
        back = scn.load(path)
        np.testing.assert_array_equal(back.loads, table1.loads)
        assert back.events == table1.events
        assert back.integrator == table1.integrator


class TestBundled:
    def test_table_scenario_contents(self, table1):
        assert table1.n == 5
        assert table1.mode == "secondary"
        np.testing.assert_array_equal(table1.loads,
                                      [10e3, 12.5e3, 13.5e3, 16e3, 25e3])
        np.testing.assert_allclose(table1.q_cost,
                                   [0.056, 0.028, 0.019, 0.014, 0.011])
        assert len(table1.events) == 3

    def test_unknown_name(self):
        with pytest.raises(ScenarioError, match="no bundled scenario"):
            bundled_path("nope")

    def test_unreadable_path(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            scn.load(tmp_path / "missing.scenario")
