import math

import pytest

from risnull.config import PRESETS, ConfigError, parse_config


def test_empty_config_gives_defaults():
    cfg = parse_config()
    net = cfg.network
    assert net.noise_power_dbm == pytest.approx(-100.0)
    assert net.noise_power_w == pytest.approx(1e-13)
    assert net.ris_position == [0.0, 0.0, 0.0]
    assert net.tx_region == [[5.0, 45.0], [-45.0, -5.0]]
    assert net.rx_region == [[5.0, 45.0], [5.0, 45.0]]
    assert net.bandwidth_hz == 10e6
    assert cfg.sweep.trials == 100
    assert cfg.solver.isr_threshold_db == -60.0


def test_empty_file_equals_no_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("")
    assert parse_config(p).to_dict() == parse_config().to_dict()


def test_override_only_changes_that_key():
    base = parse_config().to_dict()
    cfg = parse_config(overrides=["K=8"]).to_dict()
    assert cfg["network"]["K"] == 8
    cfg["network"]["K"] = base["network"]["K"]
    assert cfg == base


def test_bad_kind_names_key():
    with pytest.raises(ConfigError) as exc:
        parse_config(overrides=["kind=foo"])
    assert "kind" in str(exc.value)
    assert exc.value.key == "network.kind"


@pytest.mark.parametrize(
    "item, key",
    [
        ("K=abc", "network.K"),
        ("network.K=0", "network.K"),
        ("trials=1.5", "sweep.trials"),
        ("sweep.values=[]", "sweep.values"),
        ("values=3", "sweep.values"),
        ("isr_weighted=1", "solver.isr_weighted"),
        ("nonsense=1", "nonsense"),
        ("network.nonsense=1", "network.nonsense"),
        ("pgd_alpha=0.9", "solver.pgd_alpha"),
        ("sweep.schemes=[magic]", "sweep.schemes"),
        ("tx_region=[[5,1],[0,1]]", "network.tx_region"),
    ],
)
def test_errors_name_the_key(item, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(overrides=[item])
    assert exc.value.key == key


def test_yaml_file_sections_and_override_order(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("network:\n  K: 5\n  tx_power_dbm: 20\nsweep:\n  trials: 7\n  values: [1, 2]\n")
    cfg = parse_config(p, ["network.K=6"])
    assert cfg.network.K == 6
    assert cfg.network.tx_power_dbm == 20.0
    assert cfg.sweep.trials == 7
    assert cfg.sweep.values == [1.0, 2.0]


def test_flat_yaml_keys(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("K: 3\ntrials: 4\n")
    cfg = parse_config(p)
    assert (cfg.network.K, cfg.sweep.trials) == (3, 4)


def test_infinite_and_null_values():
    cfg = parse_config(overrides=["pathloss_list=[-.inf, -120]", "direct_pathloss_db=null"])
    assert cfg.experiment.pathloss_list[0] == -math.inf
    assert cfg.network.direct_pathloss_db is None
    cfg = parse_config(overrides=["direct_pathloss_db=-130"])
    assert cfg.network.direct_pathloss_db == -130.0


def test_invalid_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("network: [unclosed\n")
    with pytest.raises(ConfigError):
        parse_config(p)


def test_presets_apply_before_file(tmp_path):
    assert parse_config(command="minrate").network.K == 4
    p = tmp_path / "c.yaml"
    p.write_text("network:\n  K: 3\n")
    assert parse_config(p, command="minrate").network.K == 3


def test_all_presets_parse():
    for command in PRESETS:
        parse_config(command=command)


def test_units_conversions():
    cfg = parse_config(overrides=["tx_power_dbm=30", "noise_psd_dbm_hz=-174", "bandwidth_hz=1e6"])
    assert cfg.network.power_w == pytest.approx(1.0)
    assert cfg.network.noise_power_dbm == pytest.approx(-114.0)
    budget = cfg.network.budget()
    assert budget.noise_power == pytest.approx(10**-14.4)
