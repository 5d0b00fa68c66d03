"""Alphabets, words, monoid morphisms and their incidence matrices.

Words are stored as read-only integer code arrays indexed into their
alphabet, so that expansions of telescoped morphisms with millions of
symbols stay cheap to count over.  Incidence matrices are kept in exact
Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError


def _code_dtype(size: int):
    if size <= 256:
        return np.uint8
    if size <= 65536:
        return np.uint16
    return np.int64


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite alphabet.  Letters are short whitespace-free strings."""

    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise InvalidArgumentError("alphabet must contain at least one letter")
        if len(set(letters)) != len(letters):
            raise InvalidArgumentError(f"duplicate letters in alphabet {letters}")
        for a in letters:
            if not isinstance(a, str) or not a or any(ch.isspace() for ch in a):
                raise InvalidArgumentError(f"invalid letter {a!r}")

    @classmethod
    def of(cls, letters: str | Iterable[str]) -> Alphabet:
        """``Alphabet.of("ab")`` or ``Alphabet.of(["a1", "a2"])``."""
        if isinstance(letters, str):
            letters = letters.split() if any(c.isspace() for c in letters) else list(letters)
        return cls(tuple(letters))

    @property
    def size(self) -> int:
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, letter) -> bool:
        return letter in self._index

    @cached_property
    def _index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.letters)}

    @property
    def single_char(self) -> bool:
        return all(len(a) == 1 for a in self.letters)

    def index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise InvalidArgumentError(
                f"letter {letter!r} not in alphabet {self.letters}"
            ) from None

    def word(self, text: str | Sequence[str]) -> Word:
        """Parse a word.  Strings containing whitespace are split into
        tokens; otherwise each character is one letter."""
        if isinstance(text, str):
            tokens = text.split() if any(c.isspace() for c in text) else list(text)
        else:
            tokens = list(text)
        return Word.from_letters(self, tokens)

    def empty_word(self) -> Word:
        return Word(self, np.zeros(0, dtype=_code_dtype(self.size)))

    def __str__(self):
        return "{" + ", ".join(self.letters) + "}"


class Word:
    """Finite word over an :class:`Alphabet`, immutable."""

    __slots__ = ("alphabet", "_codes")

    def __init__(self, alphabet: Alphabet, codes):
        dtype = _code_dtype(alphabet.size)
        arr = np.asarray(codes)
        if arr.ndim != 1:
            raise InvalidArgumentError("word codes must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
            raise InvalidArgumentError("word code out of alphabet range")
        # reuse frozen arrays, copy anything the caller could still mutate
        if arr.flags.writeable or arr.dtype != dtype:
            arr = np.array(arr, dtype=dtype)
            arr.flags.writeable = False
        self.alphabet = alphabet
        self._codes = arr

    @classmethod
    def from_letters(cls, alphabet: Alphabet, letters: Iterable[str]) -> Word:
        codes = [alphabet.index(x) for x in letters]
        return cls(alphabet, np.array(codes, dtype=_code_dtype(alphabet.size)))

    @property
    def codes(self) -> np.ndarray:
        """Read-only code array (letter indices)."""
        return self._codes

    @property
    def length(self) -> int:
        return int(self._codes.size)

    def __len__(self):
        return int(self._codes.size)

    def __iter__(self):
        letters = self.alphabet.letters
        return (letters[c] for c in self._codes.tolist())

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.alphabet, self._codes[item])
        return self.alphabet.letters[int(self._codes[item])]

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self._codes, other._codes)

    def __hash__(self):
        return hash((self.alphabet, self._codes.tobytes()))

    def __add__(self, other: Word) -> Word:
        if other.alphabet != self.alphabet:
            raise InvalidArgumentError("cannot concatenate words over different alphabets")
        return Word(self.alphabet, np.concatenate([self._codes, other._codes]))

    def __str__(self):
        sep = "" if self.alphabet.single_char else " "
        return sep.join(self)

    def __repr__(self):
        text = str(self) if len(self) <= 40 else str(self[:40]) + "..."
        return f"Word({text!r})"


def count_letter(w: Word, x: str) -> int:
    """``|w|_x``, the number of occurrences of the letter ``x`` in ``w``."""
    return int(np.count_nonzero(w.codes == w.alphabet.index(x)))


def letter_counts(w: Word) -> list[int]:
    """Abelianization of ``w``: occurrence counts in alphabet order."""
    return np.bincount(w.codes, minlength=w.alphabet.size).astype(int).tolist()


def count_occurrences(w: Word, u: Word) -> int:
    """Number of (possibly overlapping) occurrences of the factor ``u`` in ``w``."""
    if len(u) == 0:
        raise InvalidArgumentError("factor must be nonempty")
    if u.alphabet != w.alphabet:
        raise InvalidArgumentError("word and factor use different alphabets")
    k, n = len(u), len(w)
    if k > n:
        return 0
    hits = w.codes[: n - k + 1] == u.codes[0]
    for j in range(1, k):
        hits &= w.codes[j : n - k + 1 + j] == u.codes[j]
    return int(np.count_nonzero(hits))


@dataclass(frozen=True)
class IntMatrix:
    """Dense matrix of arbitrary-precision integers."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if not rows or not rows[0]:
            raise InvalidArgumentError("matrix must have positive dimensions")
        if any(len(r) != len(rows[0]) for r in rows):
            raise InvalidArgumentError("ragged matrix rows")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.entries))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise InvalidArgumentError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.entries))
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries)
        )

    def matvec(self, v: Sequence) -> tuple:
        """Product with a vector of ints or Fractions (exact)."""
        if len(v) != self.cols:
            raise InvalidArgumentError("vector length does not match matrix columns")
        return tuple(sum((a * x for a, x in zip(row, v)), 0) for row in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_positive(self) -> bool:
        return all(x > 0 for row in self.entries for x in row)

    def det(self) -> int:
        """Exact determinant (fraction-free Bareiss elimination)."""
        if not self.is_square():
            raise InvalidArgumentError("determinant of a non-square matrix")
        a = [list(r) for r in self.entries]
        n = self.rows
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(x) for x in row] for row in self.entries]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.entries) + "]"


@dataclass(frozen=True)
class Morphism:
    """Monoid morphism ``domain* -> codomain*`` given by letter images."""

    domain: Alphabet
    codomain: Alphabet
    images: tuple[Word, ...]
    _matrix: IntMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.domain.size:
            raise InvalidArgumentError("every domain letter needs exactly one image")
        for w in images:
            if w.alphabet != self.codomain:
                raise InvalidArgumentError("image word is not over the codomain alphabet")
        cols = [letter_counts(w) for w in images]
        rows = tuple(tuple(cols[j][i] for j in range(self.domain.size)) for i in range(self.codomain.size))
        object.__setattr__(self, "_matrix", IntMatrix(rows))

    @classmethod
    def from_dict(cls, rules: dict[str, str | Sequence[str]], codomain: Alphabet | None = None) -> Morphism:
        """Build from ``{"a": "ab", "b": "a"}``.  The codomain defaults to the
        left-hand sides followed by any other letters used on the right."""
        domain = Alphabet(tuple(rules))
        parsed = {}
        for a, img in rules.items():
            if isinstance(img, str):
                img = img.split() if any(c.isspace() for c in img) else list(img)
            parsed[a] = list(img)
        if codomain is None:
            extra = []
            for img in parsed.values():
                extra.extend(x for x in img if x not in domain.letters and x not in extra)
            codomain = Alphabet(domain.letters + tuple(extra))
        return cls(domain, codomain, tuple(Word.from_letters(codomain, parsed[a]) for a in domain))

    @classmethod
    def from_text(cls, text: str, codomain: Alphabet | None = None) -> Morphism:
        """Parse one ``letter -> image`` rule per line (blank lines and
        ``#`` comments ignored)."""
        rules: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise InvalidArgumentError(f"line {lineno}: expected 'letter -> image', got {raw!r}")
            lhs, rhs = (s.strip() for s in line.split("->", 1))
            if not lhs or any(c.isspace() for c in lhs):
                raise InvalidArgumentError(f"line {lineno}: bad letter {lhs!r}")
            if lhs in rules:
                raise InvalidArgumentError(f"line {lineno}: duplicate rule for {lhs!r}")
            rules[lhs] = rhs
        if not rules:
            raise InvalidArgumentError("no rules found")
        return cls.from_dict(rules, codomain=codomain)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> Morphism:
        return cls(alphabet, alphabet, tuple(Word(alphabet, [i]) for i in range(alphabet.size)))

    def image(self, letter: str) -> Word:
        return self.images[self.domain.index(letter)]

    @property
    def non_erasing(self) -> bool:
        return all(len(w) > 0 for w in self.images)

    @property
    def incidence_matrix(self) -> IntMatrix:
        return self._matrix

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def to_text(self) -> str:
        return "\n".join(f"{a} -> {w}" for a, w in zip(self.domain, self.images))

    def __str__(self):
        return ", ".join(f"{a}->{w}" for a, w in zip(self.domain, self.images))


def apply(sigma: Morphism, w: Word) -> Word:
    """Image of ``w`` under ``sigma`` (concatenation of letter images)."""
    if w.alphabet != sigma.domain:
        raise InvalidArgumentError("word is not over the morphism's domain alphabet")
    if len(w) == 0:
        return sigma.codomain.empty_word()
    parts = [sigma.images[c].codes for c in w.codes.tolist()]
    return Word(sigma.codomain, np.concatenate(parts))


def compose(sigma: Morphism, tau: Morphism) -> Morphism:
    """``sigma o tau``: first ``tau``, then ``sigma``."""
    if tau.codomain != sigma.domain:
        raise InvalidArgumentError(
            f"cannot compose: codomain {tau.codomain} != domain {sigma.domain}"
        )
    return Morphism(tau.domain, sigma.codomain, tuple(apply(sigma, w) for w in tau.images))


def incidence_matrix(sigma: Morphism) -> IntMatrix:
    """Entry ``(i, j)`` counts letter ``i`` of the codomain in the image of
    domain letter ``j``."""
    return sigma.incidence_matrix
