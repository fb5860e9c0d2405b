import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pumadde.config import ConfigError, RunConfig, parse_config, serialize_config
from pumadde.ddesolve import EventRule, Target
from pumadde.model import ModelParams
from pumadde.scenarios import GridSpec

MODEL = {"r": 0.1, "K": 200, "a": 0.5, "gamma": 0.5, "beta": 0.1, "N": 2, "tau": 27}


def doc(**sections):
    return json.dumps({"model": MODEL, **sections})


class TestParse:
    def test_minimal_uses_defaults(self):
        cfg = parse_config(json.dumps({"model": MODEL}))
        assert cfg.model == ModelParams(**MODEL)
        assert cfg.t_end == 1000 and cfg.step is None and cfg.history is None
        assert cfg.rules == () and cfg.grid is None
        assert cfg.initial_history() == (100.0, 1.0)

    def test_tau_defaults_to_zero(self):
        m = dict(MODEL)
        del m["tau"]
        assert parse_config(json.dumps({"model": m})).model.tau == 0.0

    @pytest.mark.parametrize("key,value,path", [
        ("tau", -1, "model.tau"),
        ("r", 0, "model.r"),
        ("K", "big", "model.K"),
        ("beta", True, "model.beta"),
    ])
    def test_invalid_model_field_named(self, key, value, path):
        with pytest.raises(ConfigError, match=f"^{path}:"):
            parse_config(json.dumps({"model": {**MODEL, key: value}}))

    def test_missing_key_named(self):
        m = dict(MODEL)
        del m["gamma"]
        with pytest.raises(ConfigError, match="^model.gamma: missing"):
            parse_config(json.dumps({"model": m}))

    @pytest.mark.parametrize("text,path", [
        (json.dumps({"model": {**MODEL, "c": 1}}), "model.c"),
        (doc(simulation={"horizon": 5}), "simulation.horizon"),
        (doc(extra={}), "extra"),
        (doc(scenario={"rules": [{"target": "prey", "threshold": 1, "fraction_removed": 0.5,
                                  "when": 0}]}), r"scenario.rules\[0\].when"),
    ])
    def test_unknown_keys_rejected_with_path(self, text, path):
        with pytest.raises(ConfigError, match=f"^{path}: unknown key"):
            parse_config(text)

    def test_rule_validation(self):
        with pytest.raises(ConfigError, match=r"scenario.rules\[0\].fraction_removed"):
            parse_config(doc(scenario={"rules": [
                {"target": "prey", "threshold": 150, "fraction_removed": 1.5}]}))
        with pytest.raises(ConfigError, match=r"scenario.rules\[0\].target"):
            parse_config(doc(scenario={"rules": [
                {"target": "wolves", "threshold": 150, "fraction_removed": 0.5}]}))

    def test_history_pair(self):
        cfg = parse_config(doc(simulation={"history": [10, 0.5]}))
        assert cfg.history == (10.0, 0.5)
        with pytest.raises(ConfigError, match=r"simulation.history\[1\]"):
            parse_config(doc(simulation={"history": [10, -1]}))

    def test_default_grid(self):
        text = json.dumps({"grid": {"r": [0.05, 0.1, 0.2], "K": [200, 500], "a": [0.1, 0.5, 0.8],
                                    "gamma": [0.1, 0.5, 0.8], "beta": [0.05, 0.1], "N": [1, 2],
                                    "tau": 27}})
        cfg = parse_config(text)
        assert cfg.model is None
        assert cfg.grid.size == 216
        assert cfg.grid.tau == 27.0

    def test_grid_list_entries_checked(self):
        with pytest.raises(ConfigError, match=r"grid.K\[1\]"):
            parse_config(json.dumps({"grid": {"K": [200, -5]}}))

    def test_model_required_without_grid(self):
        with pytest.raises(ConfigError, match="^model"):
            parse_config(json.dumps({"simulation": {"t_end": 10}}))

    def test_bad_json(self):
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_config("{model: ")


finite = st.floats(0.01, 1000, allow_nan=False)
params_st = st.builds(ModelParams, finite, finite, finite, finite, finite, finite,
                      st.floats(0, 100))
rule_st = st.builds(EventRule, st.sampled_from(list(Target)), finite,
                    st.floats(0.01, 0.99))
tuple_st = st.lists(finite, min_size=1, max_size=3).map(tuple)
grid_st = st.builds(GridSpec, r=tuple_st, K=tuple_st, a=tuple_st, gamma=tuple_st,
                    beta=tuple_st, N=tuple_st, tau=st.floats(0, 100),
                    history=st.none() | st.tuples(finite, finite), t_end=finite,
                    h=st.none() | finite, eps_extinct=finite, osc_rel=finite,
                    workers=st.integers(1, 8))
config_st = st.builds(
    RunConfig,
    model=params_st,
    history=st.none() | st.tuples(finite, finite),
    t_end=finite,
    step=st.none() | finite,
    rules=st.lists(rule_st, max_size=3).map(tuple),
    grid=st.none() | grid_st,
    tau_ref=st.none() | st.floats(0, 100),
    j_max=st.integers(1, 20),
    out_dir=st.none() | st.text(min_size=1, max_size=10),
    svg=st.booleans(),
    log_prey=st.booleans(),
)


@settings(max_examples=200)
@given(config_st)
def test_serialize_roundtrip(cfg):
    assert parse_config(serialize_config(cfg)) == cfg
