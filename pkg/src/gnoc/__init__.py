"""Timing analysis and synthesis toolkit for grid-abutted global NoC links."""

from .characterize import (LookupMode, LookupPurpose, TableSet, build_tables,
                           load_tables, save_tables, table_lookup)
from .dse import Candidate, DseResult, dse_loop, evaluate_candidate
from .golden import Corner, StageResult, golden_clock_analyze, golden_path_analyze, golden_segment
from .grammar import LinkSentence, Segment, parse_link, segment_decompose, serialize_link
from .hasta import TimingReport, analyze_link, analyze_path, clock_check
from .synthesize import LinkSpec, SynthesisResult, assign_clock_subtypes, link_cost, synthesize_link
from .techlib import (BlockKind, BlockParams, ClockSpec, SubtypeTag, TechConfig,
                      block_params, default_tech_config, load_tech_config)

__version__ = "0.1.0"
