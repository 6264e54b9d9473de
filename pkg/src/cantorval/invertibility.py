"""Free-group words, Nielsen reduction and the interval/Cantorval decision."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from operator import mul
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Optional, Tuple, Union

from loguru import logger
from sympy.combinatorics.free_groups import FreeGroupElement, free_group

from .errors import NielsenLimit, NotInvertible, SubstitutionSyntaxError
from .substitution import LETTERS, Letter, Substitution, substitution_matrix

if TYPE_CHECKING:
    from .boundary import DimensionResult

DEFAULT_MAX_NIELSEN_MOVES = 10_000
DEFAULT_DIM_TOLERANCE = 1e-6

FREE_GROUP, A, B = free_group("a b")
GENERATORS: Dict[Letter, FreeGroupElement] = {'a': A, 'b': B}

Syllable = Tuple[Letter, int]


def free_reduce(syllables: Iterable[Syllable]) -> FreeGroupElement:
    """Group element of a sequence of ``(letter, ±1)`` syllables, freely reduced."""
    return reduce(mul, (GENERATORS[letter] ** power for letter, power in syllables), FREE_GROUP.identity)


def from_word(word: str) -> FreeGroupElement:
    return free_reduce((letter, 1) for letter in word)


def parse_word(text: str) -> FreeGroupElement:
    """Parse ``b^-1 a`` style words; ``e`` or an empty string is the identity."""
    syllables: List[Syllable] = []
    for token in text.split():
        if token == 'e':
            continue
        letter, _, exponent = token.partition('^')
        if letter not in LETTERS or exponent not in ('', '1', '-1'):
            raise SubstitutionSyntaxError(f"Bad group word token '{token}'", {'text': text})
        syllables.append((letter, -1 if exponent == '-1' else 1))
    return free_reduce(syllables)


def word_str(element: FreeGroupElement) -> str:
    if element.is_identity:
        return 'e'
    tokens: List[str] = []
    for symbol, exponent in element.array_form:
        token = str(symbol) if exponent > 0 else f"{symbol}^-1"
        tokens.extend([token] * abs(exponent))
    return ' '.join(tokens)


def substitute(element: FreeGroupElement, images: Dict[Letter, FreeGroupElement]) -> FreeGroupElement:
    """Image under the endomorphism sending each letter to ``images[letter]``."""
    result = FREE_GROUP.identity
    for symbol, exponent in element.array_form:
        result = result * images[str(symbol)] ** exponent
    return result


def _images(s: Substitution) -> Dict[Letter, FreeGroupElement]:
    return {letter: from_word(s.image(letter)) for letter in LETTERS}


@dataclass
class NielsenResult:
    u: FreeGroupElement
    v: FreeGroupElement
    moves: List[str] = field(default_factory=list)
    # u and v written as words in the original pair, with a standing for u₀ and b for v₀
    u_expr: FreeGroupElement = field(default_factory=lambda: A)
    v_expr: FreeGroupElement = field(default_factory=lambda: B)

    @property
    def total_length(self) -> int:
        return len(self.u) + len(self.v)


def nielsen_reduce(u: FreeGroupElement, v: FreeGroupElement,
                   max_moves: int = DEFAULT_MAX_NIELSEN_MOVES) -> NielsenResult:
    """Apply strictly shortening Nielsen moves until none is left."""
    state = NielsenResult(u, v)
    while True:
        su, sv, eu, ev = state.u, state.v, state.u_expr, state.v_expr
        candidates = [
            ("u <- u v", su * sv, sv, eu * ev, ev),
            ("u <- u v^-1", su * sv**-1, sv, eu * ev**-1, ev),
            ("u <- v u", sv * su, sv, ev * eu, ev),
            ("u <- v^-1 u", sv**-1 * su, sv, ev**-1 * eu, ev),
            ("v <- v u", su, sv * su, eu, ev * eu),
            ("v <- v u^-1", su, sv * su**-1, eu, ev * eu**-1),
            ("v <- u v", su, su * sv, eu, eu * ev),
            ("v <- u^-1 v", su, su**-1 * sv, eu, eu**-1 * ev),
        ]
        best = min(candidates, key=lambda c: len(c[1]) + len(c[2]))
        if len(best[1]) + len(best[2]) >= state.total_length:
            return state
        if len(state.moves) >= max_moves:
            raise NielsenLimit(f"Nielsen reduction exceeded {max_moves} moves",
                               {'u': word_str(u), 'v': word_str(v)})
        label, state.u, state.v, state.u_expr, state.v_expr = best
        state.moves.append(label)
        logger.debug(f"Nielsen move {label}: ({word_str(state.u)}, {word_str(state.v)})")


def _is_basis_pair(u: FreeGroupElement, v: FreeGroupElement) -> bool:
    if len(u) != 1 or len(v) != 1:
        return False
    return {str(u.array_form[0][0]), str(v.array_form[0][0])} == set(LETTERS)


def is_invertible(s: Substitution, max_moves: int = DEFAULT_MAX_NIELSEN_MOVES) -> bool:
    if abs(substitution_matrix(s).det) != 1:
        return False
    images = _images(s)
    result = nielsen_reduce(images['a'], images['b'], max_moves)
    return _is_basis_pair(result.u, result.v)


def inverse(s: Substitution,
            max_moves: int = DEFAULT_MAX_NIELSEN_MOVES) -> Tuple[FreeGroupElement, FreeGroupElement]:
    """ρ⁻¹(a) and ρ⁻¹(b) as free group elements, verified by composing with ρ."""
    images = _images(s)
    if abs(substitution_matrix(s).det) != 1:
        raise NotInvertible(f"{s} has |det M| != 1", {'substitution': str(s)})
    result = nielsen_reduce(images['a'], images['b'], max_moves)
    if not _is_basis_pair(result.u, result.v):
        raise NotInvertible(f"{s} is not an automorphism of the free group",
                            {'substitution': str(s), 'reduced': [word_str(result.u), word_str(result.v)]})
    solved: Dict[Letter, FreeGroupElement] = {}
    for reduced, expr in ((result.u, result.u_expr), (result.v, result.v_expr)):
        symbol, power = reduced.array_form[0]
        solved[str(symbol)] = expr ** power
    for letter in LETTERS:
        if substitute(solved[letter], images) != GENERATORS[letter]:
            raise NotInvertible(f"Inverse of {s} failed verification on {letter}")
    return solved['a'], solved['b']


@dataclass
class Classification:
    kind: str
    evidence: Dict[str, Any] = field(default_factory=dict)


INTERVAL = "Interval"
CANTORVAL = "Cantorval"
UNDETERMINED = "FiniteUnionOrUndetermined"


def classify(s: Substitution, dim: Optional[Union[DimensionResult, float]] = None,
             dim_tolerance: float = DEFAULT_DIM_TOLERANCE,
             invertible: Optional[bool] = None) -> Classification:
    if invertible is None:
        invertible = is_invertible(s)
    evidence: Dict[str, Any] = {'invertible': invertible}
    if invertible:
        return Classification(INTERVAL, evidence)
    dimension = getattr(dim, 'dimension', dim)
    evidence['boundary_dimension'] = dimension
    if dimension is not None and dimension > dim_tolerance:
        return Classification(CANTORVAL, evidence)
    return Classification(UNDETERMINED, evidence)
