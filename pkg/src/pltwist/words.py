"""Group words over named generators, evaluated into PLMap values.

Order convention (fixed, tested by the F relators): a word g1 g2 acts
as t -> g2(g1(t)), i.e. the left factor is applied first, so the group
product is ``mul(a, b) = compose(b, a)``.  Conjugation a^-1 y a then
means the function a o y o a^-1 read right-to-left in composition.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .errors import DuplicateName, ParseError, UnknownGenerator
from .plmap import PLMap, TailLaw, compose

Word = List[Tuple[str, int]]


def _theta_breakpoints():
    F = Fraction
    return [(F(0), F(0)), (F(1, 4), F(1, 2)), (F(1, 2), F(3, 4)), (F(1), F(1))]


def standard_generators() -> Dict[str, PLMap]:
    T = TailLaw.translation
    P = TailLaw.unit_periodic
    x0 = PLMap.translation(1)
    x1 = PLMap(1, [(0, 0), (1, 2)], T(0), T(1))
    theta = PLMap(1, _theta_breakpoints(), T(0), T(0))
    Theta = PLMap(1, _theta_breakpoints(), P(), P())
    R = PLMap.reflection()
    return {"x0": x0, "x1": x1, "theta": theta, "Theta": Theta, "R": R}


class Registry:
    """Generator table; registration is append-only behind a lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._table: Dict[str, PLMap] = standard_generators()

    def register(self, name: str, pl: PLMap) -> None:
        from .plmap import classify

        if not classify(pl).in_EPtilde2:
            raise ValueError(f"{name}: generators must lie in the eventually periodic class")
        with self._lock:
            if name in self._table:
                raise DuplicateName(name)
            self._table[name] = pl

    def __getitem__(self, name: str) -> PLMap:
        try:
            return self._table[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def names(self):
        return sorted(self._table)


_DEFAULT = Registry()


def default_registry() -> Registry:
    return _DEFAULT


def mul(a: PLMap, b: PLMap) -> PLMap:
    """Group product in the word convention: apply a first."""
    return compose(b, a)


def parse_word(text: str) -> Word:
    """Whitespace-separated tokens ``name`` or ``name^k``."""
    word: Word = []
    for col, tok in enumerate(text.split()):
        if "^" in tok:
            name, _, expo = tok.partition("^")
            try:
                k = int(expo)
            except ValueError:
                raise ParseError(f"bad exponent in token {tok!r}") from None
        else:
            name, k = tok, 1
        if not name:
            raise ParseError(f"empty generator name in token {tok!r}")
        word.append((name, k))
    return word


def eval_word(word, registry: Registry = None) -> PLMap:
    """Evaluate a word (or word string) to a normalized PLMap."""
    if registry is None:
        registry = _DEFAULT
    if isinstance(word, str):
        word = parse_word(word)
    acc = PLMap.identity()
    for name, k in word:
        g = registry[name]
        if k != 0:
            acc = mul(acc, g**k)
    return acc


def commutator(a: PLMap, b: PLMap) -> PLMap:
    """[a, b] = a^-1 b^-1 a b in the word convention."""
    return mul(mul(mul(a.invert(), b.invert()), a), b)


def f_relators_hold(registry: Registry = None) -> bool:
    """The two defining relations of F in x0, x1 evaluate to the identity."""
    reg = registry or _DEFAULT
    x0, x1 = reg["x0"], reg["x1"]
    a = mul(x0, x1.invert())
    b1 = mul(mul(x0.invert(), x1), x0)
    b2 = mul(mul(mul(mul(x0.invert(), x0.invert()), x1), x0), x0)
    ident = PLMap.identity()
    return commutator(a, b1) == ident and commutator(a, b2) == ident
