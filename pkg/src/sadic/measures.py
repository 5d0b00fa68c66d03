"""Invariant measures as compatible towers of level vectors.

A tower ``v_0, ..., v_N`` with ``v_n = M(sigma_n) v_{n+1}`` is a finite
truncation of an element of the inverse-limit cone.  Its value on a
cylinder ``[w]`` is read off the level-``n`` blocks
``B_b = sigma_0 o ... o sigma_{n-1}(b)``:

* ``v_n[b]`` is the density (per level-0 position) of blocks of type ``b``,
  so ``m_n = sum_b v_n[b]`` is the density of block starts;
* occurrences of ``w`` lying inside a single block contribute
  ``point = sum_b |B_b|_w * v_n[b]``;
* every other occurrence starts in the last ``|w| - 1`` positions of some
  block, hence ``point <= mu([w]) <= point + (|w| - 1) * m_n``.

Under everywhere growth ``m_n -> 0`` and the interval shrinks to a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from .cones import DEFAULT_EPS, DEFAULT_WINDOW, MIN_LOOKAHEAD, estimate_cone_dim
from .directive import DEFAULT_MAX_SYMBOLS, DirectiveSequence
from .errors import InfeasibleError, InvalidArgumentError, ResourceLimitError
from .morphisms import IntMatrix, Morphism, Word, count_occurrences
from .oracle import ExpansionBudget, expand

FLOAT_TOL = 1e-12


def _as_fractions(v) -> tuple[Fraction, ...]:
    return tuple(x if isinstance(x, Fraction) else Fraction(x) for x in v)


def _l1(v) -> Fraction:
    return sum((abs(x) for x in v), Fraction(0))


class MeasureTower:
    """Compatible family of nonnegative level vectors on a directive sequence.

    ``tol == 0`` means exact mode: compatibility is checked with exact
    rational equality.  Otherwise each level must satisfy
    ``|M v_{n+1} - v_n|_1 <= tol * |v_n|_1``.
    """

    def __init__(self, seq: DirectiveSequence, vectors: Sequence[Sequence], tol: float = 0):
        vecs = tuple(_as_fractions(v) for v in vectors)
        if not vecs:
            raise InvalidArgumentError("a tower needs at least the level-0 vector")
        if seq.depth is not None and len(vecs) - 1 > seq.depth:
            raise InvalidArgumentError("tower is deeper than the sequence truncation")
        for n, v in enumerate(vecs):
            if len(v) != seq.alphabet(n).size:
                raise InvalidArgumentError(f"level {n} vector has wrong length")
            if any(x < 0 for x in v):
                raise InvalidArgumentError(f"level {n} vector has a negative entry")
        for n in range(len(vecs) - 1):
            image = seq.level(n).incidence_matrix.matvec(vecs[n + 1])
            if tol == 0:
                ok = image == vecs[n]
            else:
                diff = _l1(a - b for a, b in zip(image, vecs[n]))
                ok = diff <= Fraction(tol) * max(_l1(vecs[n]), Fraction(1, 10**300))
            if not ok:
                raise InvalidArgumentError(f"tower is not compatible at level {n}")
        self.seq = seq
        self.vectors = vecs
        self.tol = tol

    @classmethod
    def from_top(cls, seq: DirectiveSequence, top: Sequence, depth: int) -> MeasureTower:
        """Push a level-``depth`` vector down: ``v_n = M(sigma_[n,depth)) top``."""
        vecs = [_as_fractions(top)]
        for n in range(depth - 1, -1, -1):
            vecs.append(seq.level(n).incidence_matrix.matvec(vecs[-1]))
        return cls(seq, vecs[::-1])

    @classmethod
    def from_generator(cls, seq: DirectiveSequence, depth: int, lookahead: int, letter: str | None = None) -> MeasureTower:
        """Tower whose top vector ``v_depth`` is the column of
        ``M(sigma_[depth, depth+lookahead))`` for ``letter``, i.e. a
        level-``depth`` cone generator (unnormalized)."""
        top = depth + lookahead
        alph = seq.alphabet(top)
        j = alph.index(letter) if letter is not None else 0
        col = seq.matrix(depth, top).column(j)
        return cls.from_top(seq, col, depth)

    @classmethod
    def zero(cls, seq: DirectiveSequence, depth: int) -> MeasureTower:
        return cls(seq, [(0,) * seq.alphabet(n).size for n in range(depth + 1)])

    @property
    def depth(self) -> int:
        return len(self.vectors) - 1

    @property
    def exact(self) -> bool:
        return self.tol == 0

    def scaled(self, c) -> MeasureTower:
        c = Fraction(c)
        return MeasureTower(self.seq, [[x * c for x in v] for v in self.vectors], self.tol)

    def normalized(self) -> MeasureTower:
        """Probability tower (caller-side normalization by the total mass)."""
        mass = total_mass(self)
        if mass == 0:
            raise InvalidArgumentError("cannot normalize the zero measure")
        return self.scaled(1 / mass)

    def to_text(self) -> str:
        lines = [f"tower.depth={self.depth}", f"tower.exact={str(self.exact).lower()}"]
        for n, v in enumerate(self.vectors):
            letters = self.seq.alphabet(n).letters
            lines.append(f"[level {n}]")
            for a, x in zip(letters, v):
                lines.append(f"v.{a}={x.numerator}/{x.denominator}")
                lines.append(f"v.{a}.decimal={float(x):.10g}")
        return "\n".join(lines)

    def __repr__(self):
        return f"MeasureTower(depth={self.depth}, v0={[float(x) for x in self.vectors[0]]})"


def zeta(t: MeasureTower, n: int) -> tuple[Fraction, ...]:
    """Letter-cylinder values of the level-``n`` measure: ``v_n``."""
    if not 0 <= n <= t.depth:
        raise InvalidArgumentError(f"level {n} outside tower depth {t.depth}")
    return t.vectors[n]


def total_mass(t: MeasureTower) -> Fraction:
    return sum(t.vectors[0], Fraction(0))


@dataclass
class CylinderEstimate:
    """Interval ``[lower, upper]`` for ``mu([w])``.

    ``point`` is the inside-block occurrence sum, which is also the lower
    end; ``upper = point + error_bound``.
    """

    word: Word
    depth: int
    lower: Fraction
    upper: Fraction
    point: Fraction
    error_bound: Fraction

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x, slack=0) -> bool:
        return self.lower - slack <= x <= self.upper + slack

    def to_text(self) -> str:
        return (f"w={self.word}, n={self.depth}, lower={float(self.lower):.10g}, "
                f"point={float(self.point):.10g}, upper={float(self.upper):.10g}, "
                f"error_bound={float(self.error_bound):.10g}")


def cylinder_measure(t: MeasureTower, w: Word | str | Sequence[str], n: int,
                     max_symbols: int = DEFAULT_MAX_SYMBOLS) -> CylinderEstimate:
    """Bracket ``mu([w])`` using the level-``n`` blocks of the tower."""
    alph0 = t.seq.alphabet(0)
    if not isinstance(w, Word):
        w = alph0.word(w)
    if w.alphabet != alph0:
        raise InvalidArgumentError("word is not over the level-0 alphabet")
    if len(w) == 0:
        raise InvalidArgumentError("cylinder word must be nonempty")
    v = zeta(t, n)
    lengths = t.seq.matrix(0, n).column_sums()
    total = sum(L for L, x in zip(lengths, v) if x)
    if total > max_symbols:
        raise ResourceLimitError(
            f"expanding level-{n} blocks needs {total} symbols > {max_symbols}; lower n",
            predicted=total, limit=max_symbols,
        )
    budget = ExpansionBudget(max_symbols)
    letters = t.seq.alphabet(n).letters
    point = Fraction(0)
    for b, x in zip(letters, v):
        if x:
            point += count_occurrences(expand(t.seq, n, b, budget), w) * x
    err = (len(w) - 1) * sum(v, Fraction(0))
    return CylinderEstimate(w, n, point, point + err, point, err)


@dataclass
class AmbiguityReport:
    """The lift of the letter vector is not unique at ``level``: the pruned
    nonnegative solution set has positive ``dimension``."""

    level: int
    dimension: int
    vectors: list[tuple[Fraction, ...]] = field(default_factory=list)  # levels lifted so far
    reason: str = ""


def _solve_exact(a: list[list[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve a square nonsingular system exactly by Gauss-Jordan elimination."""
    n = len(a)
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    for k in range(n):
        piv = next(i for i in range(k, n) if aug[i][k] != 0)
        aug[k], aug[piv] = aug[piv], aug[k]
        inv = 1 / aug[k][k]
        aug[k] = [x * inv for x in aug[k]]
        for i in range(n):
            if i != k and aug[i][k] != 0:
                f = aug[i][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
    return [row[n] for row in aug]


def _lift_pruned(m: IntMatrix, rays: list[tuple[Fraction, ...]], v: tuple[Fraction, ...], eps: float, level: int):
    """Solve ``m x = v`` with ``x`` a nonnegative combination of ``rays``.

    Returns ``(x, exact)`` or an ``(None, dim)`` pair for an ambiguous lift.
    """
    cols = [m.matvec(r) for r in rays]  # columns of A = m R
    a_float = np.array([[float(c[i]) for c in cols] for i in range(m.rows)])
    v_float = np.array([float(x) for x in v])
    scale = max(float(_l1(v)), 1e-300)
    lam_f, res = nnls(a_float, v_float)
    if res > eps * scale:
        raise InfeasibleError(f"no nonnegative lift at level {level} (residual {res:.3g})", level=level)
    rank = int(np.linalg.matrix_rank(a_float, tol=eps))
    if rank < len(rays):
        return None, len(rays) - rank
    # unique least-squares solution, exactly, via the normal equations
    c = len(cols)
    ata = [[sum((cols[i][k] * cols[j][k] for k in range(m.rows)), Fraction(0)) for j in range(c)] for i in range(c)]
    atv = [sum((cols[i][k] * v[k] for k in range(m.rows)), Fraction(0)) for i in range(c)]
    lam = _solve_exact(ata, atv)
    if any(x < -eps * scale for x in lam):
        raise InfeasibleError(f"lift leaves the cone at level {level}", level=level)
    lam = [max(x, Fraction(0)) for x in lam]
    x = tuple(sum((l * r[i] for l, r in zip(lam, rays)), Fraction(0)) for i in range(len(rays[0])))
    resid = _l1(a - b for a, b in zip(m.matvec(x), v))
    if resid > Fraction(eps) * Fraction(scale):
        raise InfeasibleError(f"no lift within tolerance at level {level}", level=level)
    return x, resid == 0


def unique_tower_from_letters(seq: DirectiveSequence, v0: Sequence, depth: int, eps: float = DEFAULT_EPS,
                              lookahead: int | None = None, window: int = DEFAULT_WINDOW):
    """Lift a letter vector ``v0`` up the sequence to a tower of ``depth``.

    Invertible levels are solved exactly.  Singular or non-square levels
    are solved inside the level-``n+1`` cone approximation (inspected
    ``lookahead`` levels deeper, default ``max(depth, 40)``).  Returns a
    :class:`MeasureTower`, or an :class:`AmbiguityReport` if some level
    still admits a positive-dimensional family of lifts.  Raises
    :class:`InfeasibleError` naming the first level with no lift.
    """
    v = _as_fractions(v0)
    if len(v) != seq.alphabet(0).size:
        raise InvalidArgumentError("v0 length does not match the level-0 alphabet")
    if any(x < 0 for x in v):
        raise InvalidArgumentError("v0 must be entrywise nonnegative")
    if seq.depth is not None and depth > seq.depth:
        raise InvalidArgumentError(f"depth {depth} beyond truncation {seq.depth}")
    if lookahead is None:
        lookahead = max(depth, MIN_LOOKAHEAD)
    vecs = [v]
    exact = True
    for n in range(depth):
        m = seq.level(n).incidence_matrix
        cur = vecs[-1]
        scale = _l1(cur)
        if m.is_square() and m.det() != 0:
            x = _solve_exact(m.to_fractions(), cur)
            worst = min(x, default=Fraction(0))
            if worst < 0:
                if worst < -Fraction(eps) * scale:
                    raise InfeasibleError(
                        f"letter vector has no nonnegative lift at level {n + 1} "
                        f"(entry {float(worst):.3g})", level=n + 1)
                x = [max(xi, Fraction(0)) for xi in x]
                exact = False
            vecs.append(tuple(x))
            continue
        top = n + 1 + lookahead if seq.depth is None else min(n + 1 + lookahead, seq.depth)
        if top > n + 1:
            rays = estimate_cone_dim(seq, n + 1, top, eps, window).extreme_rays
        else:
            size = seq.alphabet(n + 1).size
            rays = [tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size)]
        x, info = _lift_pruned(m, rays, cur, eps, n + 1)
        if x is None:
            return AmbiguityReport(n + 1, info, vecs,
                                   f"lifting from level {n}: {info}-dimensional family of nonnegative solutions in the cone")
        exact = exact and info
        vecs.append(x)
    return MeasureTower(seq, vecs, tol=0 if exact else max(eps, FLOAT_TOL))


def pushforward(sigma: Morphism, t: MeasureTower) -> MeasureTower:
    """Image tower on the prolongated sequence ``(sigma, sigma_0, ...)``;
    the new level-0 vector is ``M(sigma) v_0``.  Mass is not preserved."""
    if not sigma.non_erasing:
        raise InvalidArgumentError("pushforward needs a non-erasing morphism (some letter image is empty)")
    if sigma.domain != t.seq.alphabet(0):
        raise InvalidArgumentError("morphism domain differs from the tower's level-0 alphabet")
    seq = t.seq.prepend(sigma)
    head = sigma.incidence_matrix.matvec(t.vectors[0])
    return MeasureTower(seq, (head,) + t.vectors, t.tol)
