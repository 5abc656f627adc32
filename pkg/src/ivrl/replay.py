"""Bounded replay buffer with per-transition bootstrap masks."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError


@dataclass
class MaskedTransition:
    """One environment step plus its N-long Bernoulli bootstrap mask."""

    s: np.ndarray
    a: object  # int for discrete actions, vector for continuous
    r: float
    s_next: np.ndarray
    done: bool
    mask: np.ndarray


@dataclass
class Batch:
    """Stacked minibatch. Actions keep their discrete/continuous dtype."""

    s: np.ndarray
    a: np.ndarray
    r: np.ndarray
    s_next: np.ndarray
    done: np.ndarray
    mask: np.ndarray  # (K, N) booleans

    def __len__(self):
        return self.s.shape[0]


class NotReady(Exception):
    """Raised when sampling from a buffer with fewer items than requested."""


class ReplayBuffer:
    """Ring buffer of masked transitions with uniform resampling.

    Masks are drawn once at insertion (independent Bernoulli(p_m) per
    ensemble member) and never redrawn; eviction is FIFO.
    """

    def __init__(self, capacity: int, n_members: int, mask_prob: float,
                 rng: np.random.Generator):
        if capacity < 1:
            raise ConfigError(f"capacity must be >= 1, got {capacity}")
        if not 0.0 < mask_prob <= 1.0:
            raise ConfigError(f"mask_prob must be in (0, 1], got {mask_prob}")
        self.capacity = capacity
        self.n_members = n_members
        self.mask_prob = mask_prob
        self.rng = rng
        self._items: list = []
        self._pos = 0
        self.inserted = 0

    def __len__(self):
        return len(self._items)

    def push(self, s, a, r, s_next, done: bool):
        """Store a transition, drawing its bootstrap mask now."""
        if self.mask_prob >= 1.0:
            mask = np.ones(self.n_members, dtype=bool)
        else:
            mask = self.rng.random(self.n_members) < self.mask_prob
        item = MaskedTransition(np.asarray(s, dtype=np.float64), a, float(r),
                                np.asarray(s_next, dtype=np.float64),
                                bool(done), mask)
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._pos] = item
        self._pos = (self._pos + 1) % self.capacity
        self.inserted += 1

    def sample(self, k: int) -> Batch:
        """Uniform sample of k transitions, with replacement.

        Only requires a non-empty buffer; warmup thresholds are the
        caller's concern.
        """
        n = len(self._items)
        if n == 0:
            raise NotReady("buffer is empty")
        idx = self.rng.integers(0, n, size=k)
        items = [self._items[i] for i in idx]
        return Batch(
            s=np.stack([t.s for t in items]),
            a=np.asarray([t.a for t in items]),
            r=np.asarray([t.r for t in items], dtype=np.float64),
            s_next=np.stack([t.s_next for t in items]),
            done=np.asarray([t.done for t in items], dtype=bool),
            mask=np.stack([t.mask for t in items]),
        )


def apply_mask(batch: Batch, member: int) -> Batch:
    """Sub-batch of transitions whose mask admits the given member."""
    if member >= batch.mask.shape[1]:
        raise ConfigError(f"member index {member} out of range")
    keep = batch.mask[:, member]
    return Batch(batch.s[keep], batch.a[keep], batch.r[keep],
                 batch.s_next[keep], batch.done[keep], batch.mask[keep])
