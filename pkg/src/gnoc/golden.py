"""Analytical delay/slew oracle used as the characterization ground truth.

Wire delay follows a discrete uniform RC ladder (Elmore), block delay is
linear in input slew and load, and output slew combines the driver slew with
wire degradation in quadrature.  Deterministic and corner-derated, so it
doubles as the reference when validating table-based analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidValue
from .grammar import LinkSentence, segment_decompose
from .techlib import ACTIVE_KINDS, BlockKind, TechConfig, block_params


class Corner(Enum):
    MIN = "min"
    NOMINAL = "nominal"
    MAX = "max"


def derate(cfg: TechConfig, corner: Corner) -> float:
    if corner is Corner.MIN:
        return cfg.derate_min
    if corner is Corner.MAX:
        return cfg.derate_max
    return 1.0


@dataclass(frozen=True)
class StageResult:
    """Delay through one segment and the slew at the destination input pin."""

    delay: float
    slew_out: float
    clamped: bool = False  # input slew was below the table grid (lookup paths only)


def elmore_wire_delay(n: int, r_w: float, c_w: float,
                      r_drv: float, c_load: float) -> float:
    """Elmore delay of a driver plus n identical RC slots into c_load."""
    if n < 0:
        raise InvalidValue(f"slot count must be >= 0, got {n}")
    return r_drv * (n * c_w + c_load) + r_w * c_w * n * (n + 1) / 2 + r_w * n * c_load


def golden_segment(src: BlockKind, dst: BlockKind, n_wires: int, slew_in: float,
                   corner: Corner, cfg: TechConfig) -> StageResult:
    """Exact delay/slew of one segment: src block driving n_wires slots into dst."""
    if src not in ACTIVE_KINDS or dst not in ACTIVE_KINDS:
        raise InvalidValue(f"segment endpoints must be active, got {src}->{dst}")
    if n_wires < 0:
        raise InvalidValue(f"n_wires must be >= 0, got {n_wires}")
    p = block_params(cfg, src)
    q = block_params(cfg, dst)
    # Registers launch from the clock edge: intrinsic delay is clock-to-output.
    d0 = p.d_cq if src is BlockKind.R else p.d0
    c_tot = n_wires * cfg.pitch_c + q.c_in
    d_wire = (cfg.pitch_r * cfg.pitch_c * n_wires * (n_wires + 1) / 2
              + cfg.pitch_r * n_wires * q.c_in)
    delay = derate(cfg, corner) * (d0 + p.k_sl * slew_in + p.r_drv * c_tot + d_wire)
    s_drv = p.s0 + p.k_sin * slew_in + p.k_sload * c_tot
    slew_out = math.hypot(s_drv, cfg.beta * d_wire)
    return StageResult(delay=delay, slew_out=slew_out)


@dataclass(frozen=True)
class PathResult:
    stages: tuple[StageResult, ...]
    arrivals: tuple[float, ...]   # cumulative delay at each active block after the first

    @property
    def total_delay(self) -> float:
        return self.arrivals[-1] if self.arrivals else 0.0


def golden_path_analyze(link: LinkSentence, launch_slew: float, corner: Corner,
                        cfg: TechConfig) -> PathResult:
    """Chain golden_segment over the link's segments, slew feeding forward."""
    stages = []
    arrivals = []
    slew = launch_slew
    total = 0.0
    for seg in segment_decompose(link):
        res = golden_segment(seg.src_kind, seg.dst_kind, seg.n_wires, slew, corner, cfg)
        stages.append(res)
        total += res.delay
        arrivals.append(total)
        slew = res.slew_out
    return PathResult(stages=tuple(stages), arrivals=tuple(arrivals))


@dataclass(frozen=True)
class ClockResult:
    latencies: tuple[float, ...]      # per token, at its governing clock buffer
    stage_delays: tuple[float, ...]   # between consecutive clock buffers
    stage_spans: tuple[tuple[int, int], ...]  # (buffer token, next buffer token)


def clock_buffer_indices(link: LinkSentence) -> list[int]:
    """Tokens carrying a clock buffer: every active block plus every W.cb."""
    out = []
    for i, (kind, sub) in enumerate(link.tokens):
        if kind in ACTIVE_KINDS or sub.clock_buffered:
            out.append(i)
    return out


def clock_stage_delay(n: int, cfg: TechConfig, corner: Corner) -> float:
    """Delay of one clock stage: buffer plus n unbuffered slots to the next buffer."""
    p = block_params(cfg, BlockKind.B)  # cb_* fields are shared across kinds
    wire = elmore_wire_delay(n, cfg.pitch_r, cfg.pitch_c, p.cb_r_drv, p.cb_c_in)
    return derate(cfg, corner) * (p.cb_d0 + wire)


def golden_clock_analyze(link: LinkSentence, cfg: TechConfig,
                         corner: Corner) -> ClockResult:
    """Clock latency at every token, entering at token 0.

    A token's latency is the arrival at its governing buffer: the sum of the
    stage delays strictly before that buffer (zero at token 0).
    """
    buffers = clock_buffer_indices(link)
    stage_delays = []
    stage_spans = []
    for a, b in zip(buffers, buffers[1:]):
        stage_delays.append(clock_stage_delay(b - a - 1, cfg, corner))
        stage_spans.append((a, b))

    latencies = []
    lat = 0.0
    stage_iter = iter(zip(buffers[1:], stage_delays))
    next_buf, next_delay = next(stage_iter, (None, 0.0))
    for i in range(len(link)):
        if next_buf is not None and i >= next_buf:
            lat += next_delay
            next_buf, next_delay = next(stage_iter, (None, 0.0))
        latencies.append(lat)
    return ClockResult(latencies=tuple(latencies), stage_delays=tuple(stage_delays),
                       stage_spans=tuple(stage_spans))
