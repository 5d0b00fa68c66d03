"""Built-in directive sequences used by the CLI, the docs and the tests."""

from __future__ import annotations

from .directive import DirectiveSequence
from .errors import InvalidArgumentError
from .morphisms import Alphabet, Morphism

FIBONACCI = Morphism.from_text("a -> ab\nb -> a")
THUE_MORSE = Morphism.from_text("a -> ab\nb -> ba")
TRIBONACCI = Morphism.from_text("a -> ab\nb -> ac\nc -> a")
CHACON = Morphism.from_text("a -> aabc\nb -> bc\nc -> abc")
SWAP = Morphism.from_text("a -> b\nb -> a")
IDENTITY = Morphism.identity(Alphabet.of("ab"))
# two independent Fibonacci copies on {a,b} and {c,d}
TWO_COPIES = Morphism.from_text("a -> ab\nb -> a\nc -> cd\nd -> c")
MERGE = Morphism.from_text("a -> a\nb -> b\nc -> a\nd -> b", codomain=Alphabet.of("ab"))

_BUILDERS = {
    "fibonacci": lambda: DirectiveSequence.constant(FIBONACCI),
    "thue-morse": lambda: DirectiveSequence.constant(THUE_MORSE),
    "tribonacci": lambda: DirectiveSequence.constant(TRIBONACCI),
    "chacon": lambda: DirectiveSequence.constant(CHACON),
    "two-copies": lambda: DirectiveSequence.constant(TWO_COPIES),
    "merge-two-copies": lambda: DirectiveSequence.periodic([TWO_COPIES], prefix=[MERGE]),
    "identity": lambda: DirectiveSequence.constant(IDENTITY),
    # invertible at every level and growing
    "fibonacci-swap": lambda: DirectiveSequence.periodic([FIBONACCI, FIBONACCI, SWAP]),
}

PRESETS = tuple(_BUILDERS)


def preset(name: str) -> DirectiveSequence:
    """A fresh (unshared memo) copy of the named preset sequence."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise InvalidArgumentError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
