import pytest

from optfield.config import (
    ConfigError,
    parse_config,
    serialize_config,
)

MINIMAL = """
{"preset": "rabi_resonant", "g": 0.001, "T": 25, "theta": 3.14159265,
 "n_max": 80, "tasks": ["solve"]}
"""

SCENARIO = """
{"scenario": {"control_time": 2.0,
              "atoms": [{"energies": [0.0, 1.0, 2.0],
                         "couplings": [[0, 0.1, 0], [0.1, 0, 0.1], [0, 0.1, 0]]}],
              "target_level": 3},
 "n_max": 10, "tasks": ["solve", "baseline"]}
"""


def test_minimal_config_parses():
    cfg = parse_config(MINIMAL)
    assert cfg.preset == "rabi_resonant"
    assert cfg.g == 0.001
    assert cfg.T == 25.0
    assert cfg.n_max == 80
    assert cfg.tasks == ["solve"]
    assert cfg.restrict is True


def test_round_trip_identity():
    for text in (MINIMAL, SCENARIO):
        cfg = parse_config(text)
        assert parse_config(serialize_config(cfg)) == cfg


def test_round_trip_with_sweep_and_options():
    text = """
    {"preset": "rabi_resonant", "g": 0.01, "T": 25, "theta": 1.0, "phi": 0.3,
     "tasks": ["sweep"], "n_max": 20, "n_trunc": 42, "threads": 2, "seed": 7,
     "label": "demo", "output_dir": "results", "overwrite": true,
     "sweep": {"axes": [
        {"parameter": "g", "start": 0.001, "stop": 0.2, "count": 5, "scale": "log"},
        {"parameter": "theta", "start": 0.3, "stop": 3.1, "count": 4}]},
     "wigner": {"x_min": -4, "x_max": 4, "x_count": 41, "localize": true},
     "evolve": {"t_max": 12.5, "count": 100}}
    """
    cfg = parse_config(text)
    assert parse_config(serialize_config(cfg)) == cfg
    assert cfg.sweep[0].scale == "log"
    assert cfg.sweep[1].scale == "linear"
    assert cfg.wigner.localize is True
    assert cfg.evolve.t_max == 12.5


def test_negative_control_time_rejected():
    with pytest.raises(ConfigError, match="control_time"):
        parse_config(
            '{"preset": "rabi_resonant", "g": 0.01, "T": -3, "theta": 1,'
            ' "tasks": ["solve"]}'
        )
    with pytest.raises(ConfigError, match="control_time"):
        parse_config(
            '{"scenario": {"control_time": -1, "atoms":'
            ' [{"energies": [0, 1], "couplings": [[0, 0.1], [0.1, 0]]}],'
            ' "target_level": 2}, "tasks": ["solve"]}'
        )


def test_unknown_keys_rejected_with_location():
    with pytest.raises(ConfigError, match=r"^bogus: unknown key"):
        parse_config('{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1, "tasks": ["solve"], "bogus": 1}')
    with pytest.raises(ConfigError, match=r"sweep\.axes\[0\]\.scael"):
        parse_config(
            '{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1,'
            ' "tasks": ["solve"], "sweep": {"axes": [{"parameter": "g",'
            ' "start": 1, "stop": 2, "count": 2, "scael": "log"}]}}'
        )
    with pytest.raises(ConfigError, match=r"scenario\.atoms\[0\]\.energy"):
        parse_config(
            '{"scenario": {"control_time": 1, "atoms": [{"energy": [0, 1],'
            ' "couplings": [[0, 0], [0, 0]]}], "target_level": 1},'
            ' "tasks": ["solve"]}'
        )


def test_task_validation():
    with pytest.raises(ConfigError, match=r"tasks\[1\]"):
        parse_config('{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1, "tasks": ["solve", "dance"]}')
    with pytest.raises(ConfigError, match="non-empty"):
        parse_config('{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1, "tasks": []}')


def test_preset_requirements_checked():
    with pytest.raises(ConfigError, match="requires key 'theta'"):
        parse_config('{"preset": "rabi_resonant", "g": 1, "T": 1, "tasks": ["solve"]}')
    with pytest.raises(ConfigError, match="requires key 'target'"):
        parse_config('{"preset": "multiqubit", "T": 1, "tasks": ["solve"]}')
    with pytest.raises(ConfigError, match="unknown preset"):
        parse_config('{"preset": "zeno", "T": 1, "tasks": ["solve"]}')


def test_preset_and_scenario_are_exclusive():
    with pytest.raises(ConfigError, match="not both"):
        parse_config(
            '{"preset": "multilevel_dr", "T": 1, "tasks": ["solve"],'
            ' "scenario": {"control_time": 1, "atoms": [{"energies": [0, 1],'
            ' "couplings": [[0, 0], [0, 0]]}], "target_level": 1}}'
        )
    with pytest.raises(ConfigError, match="either a preset"):
        parse_config('{"tasks": ["solve"]}')


def test_sweep_validation():
    with pytest.raises(ConfigError, match="unknown sweep parameter"):
        parse_config(
            '{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1,'
            ' "tasks": ["solve"], "sweep": {"axes": [{"parameter": "q",'
            ' "start": 1, "stop": 2, "count": 2}]}}'
        )
    with pytest.raises(ConfigError, match="log scale requires positive"):
        parse_config(
            '{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1,'
            ' "tasks": ["solve"], "sweep": {"axes": [{"parameter": "g",'
            ' "start": 0, "stop": 2, "count": 2, "scale": "log"}]}}'
        )
    with pytest.raises(ConfigError, match="sweep task requires"):
        parse_config('{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1, "tasks": ["sweep"]}')


def test_scenario_target_validation():
    with pytest.raises(ConfigError, match="target_level.*range"):
        parse_config(
            '{"scenario": {"control_time": 1, "atoms": [{"energies": [0, 1],'
            ' "couplings": [[0, 0.1], [0.1, 0]]}], "target_level": 4},'
            ' "tasks": ["solve"]}'
        )
    with pytest.raises(ConfigError, match="missing target"):
        parse_config(
            '{"scenario": {"control_time": 1, "atoms": [{"energies": [0, 1],'
            ' "couplings": [[0, 0.1], [0.1, 0]]}]}, "tasks": ["solve"]}'
        )
    cfg = parse_config(
        '{"scenario": {"control_time": 1, "atoms": [{"energies": [0, 1],'
        ' "couplings": [[0, 0.1], [0.1, 0]]}],'
        ' "target_atomic": [[0, 0], [1, 0]],'
        ' "initial_atomic": [[1, 0], [0, 0]]}, "tasks": ["solve"]}'
    )
    assert cfg.scenario.target_atomic == [[0.0, 0.0], [1.0, 0.0]]


def test_syntax_error_reports_position():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config('{"preset": }')


def test_n_trunc_bounds():
    with pytest.raises(ConfigError, match="n_trunc"):
        parse_config(
            '{"preset": "rabi_resonant", "g": 1, "T": 1, "theta": 1,'
            ' "n_max": 10, "n_trunc": 5, "tasks": ["solve"]}'
        )
