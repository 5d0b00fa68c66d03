"""Brute-force ground truth: explicit expansions, sliding-window factor
frequencies and power-iteration Perron vectors.

Nothing here looks at cones or towers; it only expands words and counts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .directive import DEFAULT_MAX_SYMBOLS, DirectiveSequence
from .errors import ConvergenceError, InvalidArgumentError, NotApplicableError, ResourceLimitError
from .morphisms import IntMatrix, Word, count_occurrences


@dataclass(frozen=True)
class ExpansionBudget:
    max_symbols: int = DEFAULT_MAX_SYMBOLS
    memoize: bool = True

    def __post_init__(self):
        if self.max_symbols < 1:
            raise InvalidArgumentError("max_symbols must be positive")


def expand(seq: DirectiveSequence, n: int, a: str, budget: ExpansionBudget = ExpansionBudget()) -> Word:
    """``sigma_0 o ... o sigma_{n-1}(a)`` as an explicit word over ``A_0``.

    Built bottom-up from level blocks, ``expand(n+1, a)`` being the
    concatenation of ``expand(n, b)`` over the letters ``b`` of
    ``sigma_n(a)``; blocks are memoized on the sequence per (level, letter).
    """
    alph_n = seq.alphabet(n)
    j = alph_n.index(a)
    predicted = seq.matrix(0, n).column_sums()[j]
    if predicted > budget.max_symbols:
        raise ResourceLimitError(
            f"expansion of {a!r} at level {n} has length {predicted} > budget {budget.max_symbols}",
            predicted=predicted, limit=budget.max_symbols,
        )
    alph0 = seq.alphabet(0)
    # letters needed at each level, top-down
    needed = [set() for _ in range(n + 1)]
    needed[n].add(j)
    for k in range(n, 0, -1):
        images = seq.level(k - 1).images
        for b in needed[k]:
            needed[k - 1].update(images[b].codes.tolist())

    blocks ={b: Word(alph0, [b]).codes for b in needed[0]}
    for k in range(1, n + 1):
        images = seq.level(k - 1).images
        nxt = {}
        for b in needed[k]:
            key = (k, b)
            cached = seq._blocks.get(key) if budget.memoize else None
            if cached is None:
                cached = np.concatenate([blocks[c] for c in images[b].codes.tolist()])
                cached.flags.writeable = False
                if budget.memoize:
                    with seq._blocks_lock:
                        cached = seq._blocks.setdefault(key, cached)
            nxt[b] = cached
        blocks = nxt
    return Word(alph0, blocks[j])


def empirical_frequency(w: Word, u: Word) -> Fraction:
    """Occurrences of ``u`` in ``w`` divided by the number of windows
    ``|w| - |u| + 1``."""
    if len(u) < 1 or len(w) < len(u):
        raise InvalidArgumentError("need |w| >= |u| >= 1")
    return Fraction(count_occurrences(w, u), len(w) - len(u) + 1)


def factor_counts(w: Word, k: int, chunk: int = 1 << 22) -> Counter:
    """Counts of all length-``k`` factors of ``w`` in one pass.

    Keys are strings in the alphabet's display form (see ``str(Word)``).
    """
    if k < 1:
        raise InvalidArgumentError("factor length must be positive")
    d = w.alphabet.size
    if d ** k >= 2**62:
        raise InvalidArgumentError("factor length too large for integer encoding")
    codes = w.codes
    nwin = len(codes) - k + 1
    totals = Counter()
    if nwin <= 0:
        return totals
    for start in range(0, nwin, chunk):
        stop = min(nwin, start + chunk)
        enc = np.zeros(stop - start, dtype=np.int64)
        for j in range(k):
            enc = enc * d + codes[start + j : stop + j]
        vals, cnt = np.unique(enc, return_counts=True)
        totals.update(dict(zip(vals.tolist(), cnt.tolist())))
    out = Counter()
    for code, c in totals.items():
        digits = []
        for _ in range(k):
            code, r = divmod(code, d)
            digits.append(r)
        out[str(Word(w.alphabet, digits[::-1]))] = c
    return out


def is_primitive(m: IntMatrix, max_exponent: int | None = None) -> bool:
    """Whether some power ``M^e`` with ``e <= max_exponent`` is positive.
    The default bound ``(d-1)^2 + 1`` (Wielandt) makes the test exact."""
    if not m.is_square():
        return False
    d = m.rows
    if max_exponent is None:
        max_exponent = (d - 1) ** 2 + 1
    pattern = np.array([[x > 0 for x in row] for row in m.entries])
    power = pattern.copy()
    for _ in range(max_exponent):
        if power.all():
            return True
        power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
    return False


def perron_frequencies(m: IntMatrix, iters: int = 10_000, tol: float = 1e-13,
                       max_exponent: int | None = None) -> np.ndarray:
    """Simplex-normalized dominant eigenvector of a primitive matrix by
    power iteration from the uniform vector."""
    if not is_primitive(m, max_exponent):
        raise NotApplicableError("matrix is not primitive")
    a = m.to_numpy()
    a = a / a.max()
    x = np.full(m.rows, 1.0 / m.rows)
    for _ in range(iters):
        y = a @ x
        y /= y.sum()
        if np.abs(y - x).sum() < tol:
            return y
        x = y
    raise ConvergenceError(f"power iteration did not converge in {iters} iterations")
