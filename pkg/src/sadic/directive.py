"""Directive sequences: telescoping, minimal image lengths and growth verdicts.

A sequence is either an explicit finite list of morphisms or an eventually
periodic one (a finite prefix followed by a repeated cycle).  Level ``n``
morphism ``sigma_n`` maps words over ``A_{n+1}`` to words over ``A_n``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidArgumentError, ResourceLimitError
from .morphisms import Alphabet, IntMatrix, Morphism, compose

DEFAULT_GROWTH_THRESHOLD = 1000
DEFAULT_MAX_SYMBOLS = 10**7

CERTIFIED = "certified-growing"
HEURISTIC = "heuristically-growing"
UNKNOWN = "unknown"
NOT_GROWING = "not-growing-witness"


class DirectiveSequence:
    """Finitely described directive sequence ``(sigma_n)_{n >= 0}``.

    ``prefix`` levels come first; if ``cycle`` is nonempty it is repeated
    forever after the prefix.  ``depth`` is the truncation depth: for
    explicit sequences it is the number of levels, for periodic ones it is
    ``None`` unless a truncation was requested.
    """

    def __init__(self, prefix: Sequence[Morphism] = (), cycle: Sequence[Morphism] = (), depth: int | None = None):
        self.prefix = tuple(prefix)
        self.cycle = tuple(cycle)
        if not self.prefix and not self.cycle:
            raise InvalidArgumentError("a directive sequence needs at least one morphism")
        if not self.cycle:
            if depth is not None and depth != len(self.prefix):
                raise InvalidArgumentError("explicit sequences are truncated at their own length")
            depth = len(self.prefix)
        elif depth is not None and depth < 1:
            raise InvalidArgumentError("truncation depth must be positive")
        self.depth = depth
        for k, sigma in enumerate(self.prefix + self.cycle):
            if not sigma.non_erasing:
                raise InvalidArgumentError(f"morphism {k} ({sigma}) is erasing")
        chain = list(self.prefix + self.cycle)
        if self.cycle:
            chain.append(self.cycle[0])
        for n in range(1, len(chain)):
            if chain[n - 1].domain != chain[n].codomain:
                raise InvalidArgumentError(
                    f"alphabets do not chain at level {n}: domain {chain[n - 1].domain} "
                    f"!= codomain {chain[n].codomain}"
                )
        self._cache: dict[tuple[int, int], IntMatrix] = {}
        self._lock = threading.Lock()
        # level-n block expansions, filled by the oracle
        self._blocks: dict[tuple[int, int], object] = {}
        self._blocks_lock = threading.Lock()

    @classmethod
    def explicit(cls, morphisms: Sequence[Morphism]) -> DirectiveSequence:
        return cls(prefix=morphisms)

    @classmethod
    def periodic(cls, cycle: Sequence[Morphism], prefix: Sequence[Morphism] = (), depth: int | None = None) -> DirectiveSequence:
        if not cycle:
            raise InvalidArgumentError("periodic sequences need a nonempty cycle")
        return cls(prefix=prefix, cycle=cycle, depth=depth)

    @classmethod
    def constant(cls, sigma: Morphism) -> DirectiveSequence:
        return cls.periodic([sigma])

    @property
    def generator(self) -> str:
        return "periodic" if self.cycle else "explicit"

    def truncated(self, depth: int) -> DirectiveSequence:
        if self.cycle:
            return DirectiveSequence(self.prefix, self.cycle, depth)
        if depth > len(self.prefix):
            raise InvalidArgumentError("cannot extend an explicit sequence")
        return DirectiveSequence(self.prefix[:depth])

    def prepend(self, sigma: Morphism) -> DirectiveSequence:
        """Prolongation ``(sigma, sigma_0, sigma_1, ...)``."""
        depth = None if self.depth is None else self.depth + 1
        if self.cycle:
            return DirectiveSequence((sigma,) + self.prefix, self.cycle, depth)
        return DirectiveSequence((sigma,) + self.prefix)

    def _check_level(self, n: int, *, inclusive: bool):
        if n < 0 or (self.depth is not None and (n > self.depth or (n == self.depth and not inclusive))):
            raise InvalidArgumentError(f"level {n} outside truncation depth {self.depth}")

    def level(self, n: int) -> Morphism:
        """``sigma_n``."""
        self._check_level(n, inclusive=False)
        if n < len(self.prefix):
            return self.prefix[n]
        return self.cycle[(n - len(self.prefix)) % len(self.cycle)]

    def alphabet(self, n: int) -> Alphabet:
        """Level alphabet ``A_n``."""
        self._check_level(n, inclusive=True)
        if n == 0:
            return (self.prefix + self.cycle)[0].codomain
        if self.depth is not None and n == self.depth and not self.cycle:
            return self.prefix[-1].domain
        return self.level(n - 1).domain

    def matrix(self, m: int, n: int) -> IntMatrix:
        """Exact incidence matrix of ``sigma_m o ... o sigma_{n-1}``."""
        if m > n:
            raise InvalidArgumentError(f"need m <= n, got {m} > {n}")
        self._check_level(m, inclusive=True)
        self._check_level(n, inclusive=True)
        if m == n:
            return IntMatrix.identity(self.alphabet(n).size)
        with self._lock:
            hit = self._cache.get((m, n))
            if hit is not None:
                return hit
            start = max((k for (a, k) in self._cache if a == m and k < n), default=m + 1)
            acc = self._cache.get((m, start), self.level(m).incidence_matrix)
            for k in range(start, n):
                acc = acc @ self.level(k).incidence_matrix
                self._cache[(m, k + 1)] = acc
            self._cache.setdefault((m, m + 1), self.level(m).incidence_matrix)
            return acc

    def __repr__(self):
        return (f"DirectiveSequence(generator={self.generator!r}, prefix={len(self.prefix)}, "
                f"cycle={len(self.cycle)}, depth={self.depth})")


def telescope(seq: DirectiveSequence, m: int, n: int, max_symbols: int = DEFAULT_MAX_SYMBOLS) -> Morphism:
    """The composed morphism ``sigma_m o ... o sigma_{n-1}`` (identity on
    ``A_n`` when ``m == n``).  Refuses to build images whose total length
    exceeds ``max_symbols``."""
    total = sum(seq.matrix(m, n).column_sums())
    if total > max_symbols:
        raise ResourceLimitError(
            f"telescope [{m},{n}) has total image length {total} > {max_symbols}",
            predicted=total, limit=max_symbols,
        )
    result = Morphism.identity(seq.alphabet(n))
    for k in range(n - 1, m - 1, -1):
        result = compose(seq.level(k), result)
    return result


def min_image_length(seq: DirectiveSequence, n: int) -> int:
    """``beta_-(n)``, from the column sums of the telescoped incidence matrix."""
    return min(seq.matrix(0, n).column_sums())


@dataclass
class GrowthVerdict:
    status: str
    witness: dict = field(default_factory=dict)
    beta_values: list[int] = field(default_factory=list)


def check_everywhere_growing(seq: DirectiveSequence, depth: int,
                             threshold: int = DEFAULT_GROWTH_THRESHOLD) -> GrowthVerdict:
    """Finite-depth verdict on whether ``beta_-(n) -> infinity``.

    Eventually periodic sequences are decided exactly: with prefix length
    ``s``, period ``p`` and ``d = |A_s|``, every letter of ``A_s`` either
    has image length >= 2 under ``d`` periods (then ``beta_-`` at least
    doubles every ``d*p`` levels) or stays a single letter forever.
    Explicit lists can only reach ``heuristically-growing``.
    """
    seq._check_level(depth, inclusive=True)
    betas = [min_image_length(seq, n) for n in range(depth + 1)]
    if seq.cycle:
        tail = DirectiveSequence(seq.prefix, seq.cycle)  # untruncated: the window may reach past depth
        s, p = len(seq.prefix), len(seq.cycle)
        d = tail.alphabet(s).size
        for k in range(1, d + 1):
            sums = tail.matrix(s, s + k * p).column_sums()
            if min(sums) >= 2:
                return GrowthVerdict(CERTIFIED, {
                    "window_start": s, "window_length": k * p, "min_column_sum": min(sums),
                    "positive": tail.matrix(s, s + k * p).is_positive(),
                }, betas)
        j = sums.index(1)
        return GrowthVerdict(NOT_GROWING, {
            "level": s, "letter": tail.alphabet(s).letters[j],
            "bounded_length": tail.matrix(0, s).column_sums()[j],
        }, betas)
    nondecreasing = all(b1 <= b2 for b1, b2 in zip(betas, betas[1:]))
    if nondecreasing and betas[-1] >= threshold:
        return GrowthVerdict(HEURISTIC, {"level": depth, "beta": betas[-1], "threshold": threshold}, betas)
    return GrowthVerdict(UNKNOWN, {"level": depth, "beta": betas[-1], "threshold": threshold}, betas)


@dataclass
class LevelInvertibility:
    level: int
    determinant: int | None
    invertible: bool
    reason: str = ""


def check_invertible_levels(seq: DirectiveSequence, depth: int) -> list[LevelInvertibility]:
    """Exact determinant of ``M(sigma_n)`` for each ``n < depth``."""
    seq._check_level(depth, inclusive=True)
    out = []
    for n in range(depth):
        m = seq.level(n).incidence_matrix
        if not m.is_square():
            out.append(LevelInvertibility(n, None, False, "non-square"))
            continue
        det = m.det()
        out.append(LevelInvertibility(n, det, det != 0, "" if det else "singular"))
    return out
