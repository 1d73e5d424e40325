import pytest

from conftest import corpus
from gnoc.characterize import LookupMode, LookupPurpose, build_tables
from gnoc.errors import TableMismatch
from gnoc.golden import Corner, golden_path_analyze
from gnoc.grammar import parse_link
from gnoc.hasta import (PathDirection, ViolationKind, analyze_link,
                        analyze_path, clock_check, clock_slew, hasta_clock_analyze,
                        hold_check, render_report, setup_check)
from gnoc.techlib import (ClockSpec, default_tech_config, load_tech_config,
                          serialize_tech_config)

RELAXED = ClockSpec(period=1000.0)


def test_setup_check_arithmetic():
    assert setup_check(20.0, 2.0, 1.0, 9.0, 3.0) == pytest.approx(7.0)
    assert setup_check(20.0, 2.0, 0.0, 21.0, 3.0) == pytest.approx(-6.0)


def test_hold_check_arithmetic():
    assert hold_check(20.0, 2.0, 1.0) == pytest.approx(17.0)
    assert hold_check(5.0, 7.0, 1.0) == pytest.approx(-3.0)
    assert hold_check(5.0, 1.0, 1.0, jitter=2.0) == pytest.approx(1.0)


def test_setup_slack_linear_in_skew_and_jitter():
    base = setup_check(30.0, 0.0, 0.0, 10.0, 3.0)
    assert setup_check(30.0, 0.0, 4.0, 10.0, 3.0) == pytest.approx(base + 4.0)
    assert setup_check(30.0, 4.0, 0.0, 10.0, 3.0) == pytest.approx(base - 4.0)


def test_clock_slew_value(cfg):
    assert clock_slew(cfg) == 2.0


def test_analyze_path_one_lookup_per_segment(cfg, tables):
    link = parse_link("S W W B W W R W W S")
    res = analyze_path(link, tables, 10.0, LookupMode.INTERPOLATE,
                       LookupPurpose.SETUP_MAX)
    assert res.lookup_count == 3
    assert len(res.arrivals) == 3
    assert res.total_delay == res.arrivals[-1]


def test_analyze_path_matches_golden_chain(cfg, tables):
    """Interpolated chained delays track the oracle (no relaunch either side)."""
    for link in corpus(seed=11, count=40, seg_lo=1, seg_hi=10, w_lo=2, w_hi=5):
        res = analyze_path(link, tables, 10.0, LookupMode.INTERPOLATE,
                           LookupPurpose.SETUP_MAX)
        ref = golden_path_analyze(link, 10.0, Corner.MAX, cfg)
        assert res.total_delay == pytest.approx(ref.total_delay, rel=0.02)


def test_clock_latencies_sbs(cfg):
    arr = hasta_clock_analyze(parse_link("S B S"), cfg, Corner.NOMINAL)
    assert [a.latency for a in arr] == pytest.approx([0.0, 4.32, 8.64])
    assert [a.governing_buffer_index for a in arr] == [0, 1, 2]


def test_clock_latency_constant_between_buffers(cfg):
    arr = hasta_clock_analyze(parse_link("S W W B W S"), cfg, Corner.NOMINAL)
    # wires inherit the latency of the upstream buffer
    assert arr[1].latency == arr[2].latency == arr[0].latency == 0.0
    assert arr[4].latency == arr[3].latency
    assert arr[5].latency > arr[3].latency


def test_clock_entry_far_end_reverses(cfg):
    link = parse_link("S B S")
    fwd = hasta_clock_analyze(link, cfg, Corner.NOMINAL, entry_index=0)
    bwd = hasta_clock_analyze(link, cfg, Corner.NOMINAL, entry_index=2)
    assert bwd[2].latency == 0.0
    assert bwd[0].latency == pytest.approx(fwd[2].latency)


def test_clock_entry_interior_rejected(cfg):
    with pytest.raises(ValueError):
        hasta_clock_analyze(parse_link("S B S"), cfg, Corner.NOMINAL,
                            entry_index=1)


def test_clock_check_threshold(cfg):
    link = parse_link("S B S")  # MAX stage delay 4.752
    assert clock_check(link, cfg, ClockSpec(period=9.6)) == []
    bad = clock_check(link, cfg, ClockSpec(period=9.5))
    assert len(bad) == 2
    assert all(v.kind is ViolationKind.CLOCK_UNBUFFERED_GT_HALF_PERIOD
               for v in bad)


def test_analyze_link_clean(cfg, tables):
    rep = analyze_link(parse_link("S W W B W W S"), tables, cfg,
                       ClockSpec(period=100.0))
    assert rep.ok
    assert rep.lookup_count_setup == 2
    assert rep.lookup_count_hold == 2
    assert len(rep.paths) == 1
    p = rep.paths[0]
    assert p.direction is PathDirection.FORWARD
    assert p.path_delay_max >= p.path_delay_min


def test_analyze_link_paths_between_consecutive_flops(cfg, tables):
    rep = analyze_link(parse_link("S W W R W W B W W R W W S"), tables, cfg,
                       RELAXED)
    assert [(p.launch_index, p.capture_index) for p in rep.paths] == \
        [(0, 3), (3, 9), (9, 12)]


def test_analyze_link_backward_skew(cfg, tables):
    rep = analyze_link(parse_link("S W W B W W S"), tables, cfg, RELAXED,
                       clock_entry=6)
    assert rep.paths[0].skew < 0.0
    assert rep.paths[0].direction is PathDirection.BACKWARD


def test_setup_violation(cfg, tables):
    rep = analyze_link(parse_link("S B S"), tables, cfg,
                       ClockSpec(period=30.0, jitter=20.0))
    kinds = [v.kind for v in rep.violations]
    assert kinds == [ViolationKind.SETUP]
    assert rep.paths[0].setup_slack == pytest.approx(-4.295, abs=1e-6)


def test_slew_violation(cfg, tables):
    rep = analyze_link(parse_link("S W W W W W W W W W S"), tables, cfg,
                       RELAXED)
    assert [v.kind for v in rep.violations] == [ViolationKind.SLEW_RANGE]


def test_comb_violation(cfg, tables):
    rep = analyze_link(parse_link("S W.cb W W W W S"), tables, cfg,
                       ClockSpec(period=43.0))
    assert [v.kind for v in rep.violations] == [ViolationKind.COMB_GT_PERIOD]


def test_hold_violation(cfg):
    text = serialize_tech_config(default_tech_config()).replace(
        "t_h = 1.0", "t_h = 8.0")
    hcfg = load_tech_config(text)
    htables = build_tables(hcfg)
    rep = analyze_link(parse_link("S W.cb R W W S"), htables, hcfg, RELAXED)
    assert [v.kind for v in rep.violations] == [ViolationKind.HOLD]


def test_table_mismatch(cfg, tables):
    other = load_tech_config(
        serialize_tech_config(cfg).replace("pitch_r = 1.0", "pitch_r = 2.0"))
    with pytest.raises(TableMismatch):
        analyze_link(parse_link("S B S"), tables, other, RELAXED)


def test_pessimistic_brackets_golden_chain(cfg, tables):
    """PESSIMISTIC chained totals bound the oracle on both sides."""
    for link in corpus(seed=13, count=60, seg_lo=1, seg_hi=12, w_lo=2, w_hi=5):
        up = analyze_path(link, tables, 12.0, LookupMode.PESSIMISTIC,
                          LookupPurpose.SETUP_MAX)
        down = analyze_path(link, tables, 12.0, LookupMode.PESSIMISTIC,
                            LookupPurpose.HOLD_MIN)
        hi = golden_path_analyze(link, 12.0, Corner.MAX, cfg)
        lo = golden_path_analyze(link, 12.0, Corner.MIN, cfg)
        assert up.total_delay >= hi.total_delay - 1e-9
        assert down.total_delay <= lo.total_delay + 1e-9


def test_jitter_tightens_setup_only(cfg, tables):
    link = parse_link("S W W B W W S")
    a = analyze_link(link, tables, cfg, ClockSpec(period=100.0, jitter=0.0))
    b = analyze_link(link, tables, cfg, ClockSpec(period=100.0, jitter=5.0))
    assert b.paths[0].setup_slack == pytest.approx(a.paths[0].setup_slack - 5.0)
    assert b.paths[0].hold_slack == pytest.approx(a.paths[0].hold_slack)


def test_render_report_smoke(cfg, tables):
    rep = analyze_link(parse_link("S W W B W W S"), tables, cfg,
                       ClockSpec(period=100.0))
    text = render_report(rep)
    assert "seg_index,src,dst,n_wires" in text
    assert "launch,capture,skew" in text
    assert text.endswith("\n")
    # deterministic
    assert text == render_report(analyze_link(
        parse_link("S W W B W W S"), tables, cfg, ClockSpec(period=100.0)))
