import random

import pytest

from gnoc.characterize import build_tables
from gnoc.grammar import LinkSentence
from gnoc.techlib import (CB_SUBTYPE, DEFAULT_SUBTYPE, BlockKind,
                          default_tech_config)

ACTIVE = [BlockKind.B, BlockKind.R, BlockKind.S]


@pytest.fixture(scope="session")
def cfg():
    return default_tech_config()


@pytest.fixture(scope="session")
def tables(cfg):
    return build_tables(cfg)


def random_link(rng: random.Random, n_segments: int,
                w_lo: int = 0, w_hi: int = 5, cb_prob: float = 0.0) -> LinkSentence:
    """A random valid sentence with the given segment count."""
    tokens = [(BlockKind.S, DEFAULT_SUBTYPE)]
    for i in range(n_segments):
        last = i == n_segments - 1
        kind = BlockKind.S if last else rng.choice(ACTIVE)
        lo = w_lo
        if kind is BlockKind.S and tokens[-1][0] is BlockKind.S:
            lo = max(lo, 1)  # no adjacent S
        for _ in range(rng.randint(lo, w_hi)):
            sub = CB_SUBTYPE if rng.random() < cb_prob else DEFAULT_SUBTYPE
            tokens.append((BlockKind.W, sub))
        tokens.append((kind, DEFAULT_SUBTYPE))
    return LinkSentence(tuple(tokens))


def corpus(seed: int, count: int, seg_lo: int = 1, seg_hi: int = 50,
           w_lo: int = 0, w_hi: int = 5):
    rng = random.Random(seed)
    return [random_link(rng, rng.randint(seg_lo, seg_hi), w_lo, w_hi)
            for _ in range(count)]
