"""Finite-depth approximations of the letter cones ``C_n`` and estimates of
their dimensions.

The level-``n`` cone is approximated from above by the cone spanned by the
columns of the telescoped matrix ``M(sigma_n o ... o sigma_{m-1})``.  All
dimension counts and thinness verdicts are estimates: they carry a
convergence flag computed over the last few inspected depths.  Only when
every level matrix is invertible and growth is certified does a constant
estimate follow from theory.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import nnls

from .directive import DirectiveSequence
from .errors import InvalidArgumentError, InvalidStateError
from .morphisms import IntMatrix

DEFAULT_EPS = 1e-8
DEFAULT_WINDOW = 5
MIN_LOOKAHEAD = 40
EXTREME_RESIDUAL = 1e-9

THIN = "thin"
NOT_THIN = "not-thin-witness"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ConeApprox:
    level: int
    depth: int
    raw_matrix: IntMatrix
    generators: tuple[tuple[Fraction, ...], ...]  # one simplex vector per column

    def as_array(self) -> np.ndarray:
        """Generators as rows of a float array."""
        return np.array([[float(x) for x in g] for g in self.generators])


def cone_generators(seq: DirectiveSequence, n: int, m: int) -> ConeApprox:
    """Simplex-normalized columns of ``M(sigma_[n,m))``."""
    if not n < m:
        raise InvalidArgumentError(f"need n < m, got n={n}, m={m}")
    mat = seq.matrix(n, m)
    sums = mat.column_sums()
    if min(sums) == 0:
        raise InvalidStateError(f"zero column in telescope [{n},{m}): erasing morphism")
    gens = tuple(tuple(Fraction(x, s) for x in mat.column(j)) for j, s in enumerate(sums))
    return ConeApprox(n, m, mat, gens)


def cone_residual(generators: np.ndarray, x) -> float:
    """L2 residual of the best nonnegative combination of ``generators``
    (rows) approximating ``x``."""
    _, res = nnls(np.asarray(generators, dtype=float).T, np.asarray(x, dtype=float))
    return float(res)


def _cluster(points: np.ndarray, eps: float) -> list[list[int]]:
    """Single-linkage clusters under L1 distance <= eps, in order of first member."""
    k = len(points)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if np.abs(points[i] - points[j]).sum() <= eps:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _representative(points: np.ndarray, members: list[int]) -> int:
    # member closest to the componentwise median; ties go to the lexicographically smallest
    med = np.median(points[members], axis=0)
    return min(members, key=lambda i: (float(np.abs(points[i] - med).sum()), tuple(points[i])))


def _extreme(reps: np.ndarray) -> list[bool]:
    out = []
    for i in range(len(reps)):
        others = np.delete(reps, i, axis=0)
        out.append(len(others) == 0 or cone_residual(others, reps[i]) > EXTREME_RESIDUAL)
    return out


@dataclass
class DepthEstimate:
    depth: int
    c_estimate: int
    rays: list[tuple[Fraction, ...]]  # extreme representatives, exact
    ray_letters: list[str]            # letter of A_depth whose column each ray is


def _estimate_at(seq: DirectiveSequence, n: int, m: int, eps: float) -> DepthEstimate:
    approx = cone_generators(seq, n, m)
    pts = approx.as_array()
    reps = [_representative(pts, c) for c in _cluster(pts, eps)]
    rep_pts = pts[reps]
    rank = int(np.linalg.matrix_rank(rep_pts, tol=eps))
    letters = seq.alphabet(m).letters
    rays, names = [], []
    for r, ext in zip(reps, _extreme(rep_pts)):
        if ext:
            rays.append(approx.generators[r])
            names.append(letters[r])
    return DepthEstimate(m, max(rank, 1), rays, names)


@dataclass
class LevelEstimate:
    n: int
    c_estimate: int
    extreme_rays: list[tuple[Fraction, ...]]
    converged: bool
    depth: int = 0
    ray_letters: list[str] = field(default_factory=list)
    history: list[int] = field(default_factory=list)  # estimates at the inspected depths

    def rays_float(self) -> list[list[float]]:
        return [[float(x) for x in r] for r in self.extreme_rays]


def estimate_cone_dim(seq: DirectiveSequence, n: int, depth: int, eps: float = DEFAULT_EPS,
                      window: int = DEFAULT_WINDOW) -> LevelEstimate:
    """Estimate ``c_n`` from the generators at ``depth``.

    Converged means the estimate was identical at the last ``window``
    depths ``depth - window + 1, ..., depth``.
    """
    if not n < depth:
        raise InvalidArgumentError(f"need n < depth, got n={n}, depth={depth}")
    if window < 1:
        raise InvalidArgumentError("window must be positive")
    history = [_estimate_at(seq, n, m, eps).c_estimate for m in range(max(n + 1, depth - window + 1), depth)]
    last = _estimate_at(seq, n, depth, eps)
    history.append(last.c_estimate)
    converged = len(history) >= window and len(set(history)) == 1
    return LevelEstimate(n, last.c_estimate, last.rays, converged, depth, last.ray_letters, history)


@dataclass
class ConeReport:
    levels: list[LevelEstimate]
    thin: str
    witness: tuple[int, int] | None
    stabilization_level: int | None
    e_bounds: tuple[int, int]
    eps: float = DEFAULT_EPS


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SADIC_THREADS", "1")))
    except ValueError:
        return 1


def check_thin(seq: DirectiveSequence, depth: int, eps: float = DEFAULT_EPS,
               window: int = DEFAULT_WINDOW, lookahead: int | None = None) -> ConeReport:
    """Estimate ``c_n`` for ``n < depth`` and decide thinness.

    Each level is inspected ``lookahead`` levels deeper (default
    ``max(depth, 40)``), capped at the truncation depth of explicit
    sequences.
    """
    if depth < 2:
        raise InvalidArgumentError("check_thin needs depth >= 2")
    if lookahead is None:
        lookahead = max(depth, MIN_LOOKAHEAD)
    if seq.depth is not None and depth > seq.depth:
        raise InvalidArgumentError(f"depth {depth} beyond truncation {seq.depth}")

    def one(n):
        top = n + lookahead if seq.depth is None else min(n + lookahead, seq.depth)
        return estimate_cone_dim(seq, n, top, eps, window)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        levels = list(pool.map(one, range(depth)))

    conv = [lv for lv in levels if lv.converged]
    witness = None
    if len(conv) == len(levels) and all(lv.c_estimate == levels[0].c_estimate for lv in levels):
        verdict = THIN
    else:
        first = conv[0] if conv else None
        other = next((lv for lv in conv if lv.c_estimate != first.c_estimate), None) if first else None
        if other is not None:
            verdict, witness = NOT_THIN, (first.n, other.n)
        else:
            verdict = UNDETERMINED
    report = ConeReport(levels, verdict, witness, None,
                        (levels[0].c_estimate, seq.alphabet(0).size), eps)
    report.stabilization_level = find_stabilization_level(report)
    return report


def find_stabilization_level(report: ConeReport) -> int | None:
    """Smallest inspected ``n`` such that all converged estimates at levels
    ``>= n`` agree; ``None`` when nothing converged."""
    if len(report.levels) == 1:
        return 0
    conv = [lv for lv in report.levels if lv.converged]
    if not conv:
        return None
    for lv in report.levels:
        if len({c.c_estimate for c in conv if c.n >= lv.n}) <= 1:
            return lv.n
    return None
