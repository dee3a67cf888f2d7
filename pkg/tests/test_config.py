import math

import pytest

from tipping_abm.config import (
    ConfigError,
    PolicyRule,
    SimConfig,
    build_config,
    default_config,
    load_config,
    parse_config_text,
    with_params,
)


def test_defaults_validate():
    for engine in ("mark0", "mark1"):
        default_config(engine).validate()


def test_minimal_file_applies_documented_defaults(tmp_path):
    path = tmp_path / "minimal.cfg"
    path.write_text("n_firms = 250\n")
    cfg = load_config(str(path), "mark0")
    assert cfg.n_firms == 250
    # phase-diagram baseline defaults
    assert cfg.c == 0.5 and cfg.gamma_p == 0.05 and cfg.delta == 0.02
    assert cfg.phi == 0.1 and cfg.f == 1.0 and cfg.beta == 0.0
    cfg1 = load_config(str(path), "mark1")
    assert cfg1.c == 0.8 and cfg1.gamma_p == 0.1 and cfg1.gamma_y == 0.1
    assert cfg1.delta == 0.2 and cfg1.tau == 0.05 and cfg1.m_goods == 3
    assert cfg1.mu == 10.0


def test_theta_inf_accepted(tmp_path):
    path = tmp_path / "inf.cfg"
    path.write_text("n_firms = 10\ntheta = inf\n")
    cfg = load_config(str(path), "mark0")
    assert math.isinf(cfg.theta)


@pytest.mark.parametrize(
    "key,value",
    [
        ("c", 1.5),
        ("c", 0.0),
        ("eta_plus", -0.1),
        ("eta_minus", 1.5),
        ("gamma_p", 2.0),
        ("theta", 0.0),
        ("n_firms", 0),
        ("f", -0.5),
        ("rho0", -0.01),
        ("horizon", 0),
    ],
)
def test_range_violations_rejected_with_key_in_message(key, value):
    with pytest.raises(ConfigError, match=key):
        default_config("mark0", **{key: value})


def test_unknown_keys_are_hard_errors():
    with pytest.raises(ConfigError, match="thetta"):
        build_config({"thetta": "3"}, "mark0")


def test_duplicate_keys_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("a = 1\na = 2\n")


def test_comments_and_blank_lines_ignored():
    raw = parse_config_text("# comment\n\nn_firms = 5  # inline\n")
    assert raw == {"n_firms": "5"}


def test_policy_parsing_and_validation():
    cfg = build_config({"theta": "2", "policy": "0.1:10"}, "mark0")
    assert cfg.policy == PolicyRule(u_trigger=0.1, theta_high=10.0)
    with pytest.raises(ConfigError, match="raise"):
        build_config({"theta": "20", "policy": "0.1:10"}, "mark0")
    with pytest.raises(ConfigError, match="u_trigger"):
        build_config({"theta": "2", "policy": "1.5:10"}, "mark0")


def test_irrelevant_keys_logged_not_fatal(tmp_path, caplog):
    path = tmp_path / "mix.cfg"
    path.write_text("n_firms = 10\nrho0 = 0.02\n")
    with caplog.at_level("INFO", logger="tipping_abm"):
        cfg = load_config(str(path), "mark0")
    assert cfg.rho0 == 0.02
    assert any("rho0" in rec.getMessage() for rec in caplog.records)


def test_overrides_win_over_file(tmp_path):
    path = tmp_path / "o.cfg"
    path.write_text("n_firms = 10\nseed = 1\n")
    cfg = load_config(str(path), "mark0", overrides={"seed": 7, "c": "0.9"})
    assert cfg.seed == 7 and cfg.c == 0.9


def test_round_trip_through_dict():
    cfg = default_config(
        "mark0", theta=math.inf, policy=PolicyRule(0.1, math.inf), delta_plus=0.3
    )
    assert SimConfig.from_dict(cfg.to_dict()) == cfg


def test_hire_fire_ratio():
    cfg = default_config("mark0", eta_plus=0.3, eta_minus=0.1)
    assert cfg.hire_fire_ratio == pytest.approx(3.0)
    with pytest.raises(ConfigError):
        _ = with_params(cfg, eta_minus=0.0).hire_fire_ratio


def test_n_households():
    assert default_config("mark1", n_firms=100, mu=10.0).n_households == 1000
