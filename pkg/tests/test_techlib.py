import pytest

from gnoc.errors import InvalidValue, MissingKey, ParseError, UnknownSubtype
from gnoc.techlib import (CB_SUBTYPE, BlockKind, ClockSpec, block_params,
                          load_tech_config, serialize_tech_config)

MINIMAL = """
pitch_r = 1.0
pitch_c = 1.0
K = 10
L = 10
slew_grid_min = 4.0
slew_grid_max = 40.0
[kind B]
d0 = 5.0
k_sl = 0.3
r_drv = 0.5
c_in = 1.0
s0 = 2.0
k_sin = 0.1
k_sload = 0.2
[kind R]
d0 = 5.0
k_sl = 0.3
r_drv = 0.5
c_in = 1.0
s0 = 2.0
k_sin = 0.1
k_sload = 0.2
d_cq = 8.0
t_su = 3.0
t_h = 1.0
[kind S]
d0 = 12.0
k_sl = 0.3
r_drv = 0.7
c_in = 1.5
s0 = 3.0
k_sin = 0.1
k_sload = 0.2
"""


def test_default_config_dimensions(cfg):
    assert cfg.K == 10
    assert cfg.L == 10
    assert cfg.pitch_r == 1.0
    assert cfg.slew_legal_max == 40.0


def test_block_params_b(cfg):
    p = block_params(cfg, BlockKind.B)
    assert p.d0 == 5.0
    assert p.r_drv == 0.5


def test_block_params_w_cb_exposes_clock_buffer(cfg):
    p = block_params(cfg, BlockKind.W, CB_SUBTYPE)
    assert p.cb_d0 == 4.0
    assert p.cb_c_in == 0.8


def test_cb_subtype_invalid_on_s(cfg):
    with pytest.raises(UnknownSubtype):
        block_params(cfg, BlockKind.S, CB_SUBTYPE)


def test_every_kind_has_entries(cfg):
    for kind in BlockKind:
        assert kind in cfg.params
        assert kind in cfg.area_cost


def test_omitted_beta_defaults_to_one():
    cfg = load_tech_config(MINIMAL)
    assert cfg.beta == 1.0
    assert cfg.derate_min == 0.9
    assert cfg.derate_max == 1.1


def test_derate_below_one_rejected():
    with pytest.raises(InvalidValue):
        load_tech_config("derate_max = 0.5\n" + MINIMAL)


def test_k_below_one_rejected():
    bad = MINIMAL.replace("K = 10", "K = 0")
    with pytest.raises(InvalidValue):
        load_tech_config(bad)


def test_negative_parameter_rejected():
    bad = MINIMAL.replace("d0 = 12.0", "d0 = -1.0")
    with pytest.raises(InvalidValue):
        load_tech_config(bad)


def test_missing_required_key():
    with pytest.raises(MissingKey):
        load_tech_config("pitch_r = 1.0\n")


def test_missing_block_parameter():
    bad = MINIMAL.replace("r_drv = 0.7\n", "")
    with pytest.raises(MissingKey):
        load_tech_config(bad)


@pytest.mark.parametrize("line", ["pitch_r", "bogus = 1.0", "[kind X]", "[kind B"])
def test_malformed_lines(line):
    with pytest.raises(ParseError):
        load_tech_config(line + "\n" + MINIMAL)


def test_serialize_round_trip(cfg):
    text = serialize_tech_config(cfg)
    again = load_tech_config(text)
    assert again == cfg
    assert again.digest() == cfg.digest()


def test_default_file_matches_decisions_table(cfg):
    s = cfg.params[BlockKind.S]
    assert (s.d0, s.r_drv, s.c_in, s.s0) == (12.0, 0.7, 1.5, 3.0)
    r = cfg.params[BlockKind.R]
    assert (r.d_cq, r.t_su, r.t_h) == (8.0, 3.0, 1.0)
    assert cfg.area_cost[BlockKind.S] == 20.0


def test_clock_spec_invariants():
    ClockSpec(period=10.0, jitter=1.0)
    with pytest.raises(InvalidValue):
        ClockSpec(period=5.0, jitter=5.0)
    with pytest.raises(InvalidValue):
        ClockSpec(period=5.0, jitter=-1.0)
