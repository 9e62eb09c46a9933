"""Deterministic random-number streams.

Every stochastic operation takes an explicit stream. A stream is a
(seed, path) pair mapped onto ``numpy.random.SeedSequence(seed, spawn_key=path)``;
child streams are derived by appending integers to the path, so workers that
own disjoint paths never collide and results are independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# purpose tags used when deriving sub-streams
TAG_SAMPLE = 1
TAG_FIT = 2
TAG_BOOT = 3
TAG_MC = 4
TAG_LIMIT = 5
TAG_ORACLE = 6


@dataclass(frozen=True)
class RngStream:
    seed: int
    path: tuple[int, ...] = ()

    def child(self, *keys: int) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(int(k) for k in keys))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.seed_sequence())

    def derived_seed(self) -> int:
        """A single 64-bit value identifying this stream (for provenance)."""
        return int(self.seed_sequence().generate_state(1, np.uint64)[0])


def as_stream(stream: "RngStream | int") -> RngStream:
    if isinstance(stream, RngStream):
        return stream
    return RngStream(int(stream))
