"""Binary words, substitutions and their integer matrices."""
import re
from dataclasses import dataclass
from typing import Dict, Literal, Tuple

from loguru import logger

from .errors import (
    BadLetter,
    EmptyImage,
    NoLegalSeed,
    ResourceLimit,
    SubstitutionSyntaxError,
)

Letter = Literal['a', 'b']
Word = str

LETTERS: Tuple[Letter, Letter] = ('a', 'b')
DEFAULT_MAX_WORD_LENGTH = 10_000_000
SEED_SEARCH_DEPTH = 8
MAX_SEED_PERIOD = 4

_WORD = re.compile(r"^[A-Za-z]*$")


def _check_word(word: str) -> None:
    for letter in word:
        if letter not in LETTERS:
            raise BadLetter(f"Symbol '{letter}' is not a letter of the alphabet {{a, b}}",
                            {'symbol': letter})


@dataclass(frozen=True)
class IntMatrix2:
    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        if min(self.m11, self.m12, self.m21, self.m22) < 0:
            raise ValueError("Substitution matrices have nonnegative entries")

    @property
    def trace(self) -> int:
        return self.m11 + self.m22

    @property
    def det(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: 'IntMatrix2') -> 'IntMatrix2':
        return IntMatrix2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def apply(self, vec: Tuple[int, int]) -> Tuple[int, int]:
        return (self.m11 * vec[0] + self.m12 * vec[1], self.m21 * vec[0] + self.m22 * vec[1])

    def entry(self, i: Letter, j: Letter) -> int:
        return self.rows()[LETTERS.index(i)][LETTERS.index(j)]

    def is_positive(self) -> bool:
        return min(self.m11, self.m12, self.m21, self.m22) > 0

    def rows(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return ((self.m11, self.m12), (self.m21, self.m22))


@dataclass(frozen=True)
class Substitution:
    image_a: Word
    image_b: Word

    def __post_init__(self):
        for letter, image in zip(LETTERS, (self.image_a, self.image_b)):
            if not image:
                raise EmptyImage(f"Image of '{letter}' is empty", {'letter': letter})
            _check_word(image)

    def image(self, letter: Letter) -> Word:
        return self.image_a if letter == 'a' else self.image_b

    @property
    def table(self) -> Dict[int, str]:
        return {ord('a'): self.image_a, ord('b'): self.image_b}

    def __call__(self, word: Word) -> Word:
        return word.translate(self.table)

    def power(self, k: int) -> 'Substitution':
        return Substitution(iterate(self, 'a', k), iterate(self, 'b', k))

    def __str__(self) -> str:
        return f"({self.image_a},{self.image_b})"


@dataclass(frozen=True)
class SeedCycle:
    left_seed: Letter
    right_seed: Letter
    period: int

    def __str__(self) -> str:
        return f"{self.left_seed}|{self.right_seed} (period {self.period})"


def parse_substitution(text: str) -> Substitution:
    """Parse ``(<word>,<word>)`` or ``a -> <word> ; b -> <word>``.

    Whitespace is ignored everywhere.
    """
    compact = re.sub(r"\s+", "", text or "")
    if compact.startswith('(') and compact.endswith(')'):
        parts = compact[1:-1].split(',')
        if len(parts) != 2:
            raise SubstitutionSyntaxError(f"Expected two images in '{text}'", {'text': text})
        images = dict(zip(LETTERS, parts))
    else:
        images = {}
        for rule in filter(None, compact.split(';')):
            if '->' not in rule:
                raise SubstitutionSyntaxError(f"Rule '{rule}' has no '->'", {'text': text})
            head, image = rule.split('->', 1)
            if len(head) != 1 or not _WORD.match(head):
                raise SubstitutionSyntaxError(f"Bad rule head '{head}'", {'text': text})
            if head not in LETTERS:
                raise BadLetter(f"Symbol '{head}' is not a letter of the alphabet {{a, b}}",
                                {'symbol': head})
            if head in images:
                raise SubstitutionSyntaxError(f"Letter '{head}' is defined twice", {'text': text})
            images[head] = image
        if set(images) != set(LETTERS):
            raise SubstitutionSyntaxError("Both a and b need an image", {'text': text})
    for letter, image in images.items():
        if not _WORD.match(image):
            raise SubstitutionSyntaxError(f"Image of '{letter}' is not a word: '{image}'",
                                          {'text': text})
    return Substitution(images['a'], images['b'])


def abelianize(word: Word) -> Tuple[int, int]:
    return (word.count('a'), word.count('b'))


def substitution_matrix(s: Substitution) -> IntMatrix2:
    col_a = abelianize(s.image_a)
    col_b = abelianize(s.image_b)
    return IntMatrix2(col_a[0], col_b[0], col_a[1], col_b[1])


def is_primitive(m: IntMatrix2) -> bool:
    power = m
    for _ in range(MAX_SEED_PERIOD):
        if power.is_positive():
            return True
        power = power @ m
    return False


def is_unimodular(m: IntMatrix2) -> bool:
    return abs(m.det) == 1


def iterate(s: Substitution, w: Word, n: int, max_length: int = DEFAULT_MAX_WORD_LENGTH) -> Word:
    """Apply ``s`` letterwise ``n`` times, refusing words longer than ``max_length``."""
    if n < 0:
        raise ValueError("Iteration count must be nonnegative")
    _check_word(w)
    table = s.table
    len_a, len_b = len(s.image_a), len(s.image_b)
    for step in range(n):
        count_a, count_b = abelianize(w)
        next_length = count_a * len_a + count_b * len_b
        if next_length > max_length:
            raise ResourceLimit(
                f"Word length {next_length} at step {step + 1} exceeds cap {max_length}",
                {'length': next_length, 'cap': max_length})
        w = w.translate(table)
    return w


def is_legal(s: Substitution, factor: Word, depth: int = SEED_SEARCH_DEPTH,
             max_length: int = DEFAULT_MAX_WORD_LENGTH) -> bool:
    """True when ``factor`` occurs in some ``s^n(a)`` with ``n <= depth``."""
    word = 'a'
    for n in range(depth + 1):
        if factor in word:
            return True
        if n < depth:
            try:
                word = iterate(s, word, 1, max_length)
            except ResourceLimit:
                return False
    return False


def seed_cycle(s: Substitution, max_length: int = DEFAULT_MAX_WORD_LENGTH) -> SeedCycle:
    legal = {(left, right): is_legal(s, left + right, max_length=max_length)
             for left in LETTERS for right in LETTERS}
    for k in range(1, MAX_SEED_PERIOD + 1):
        power = s.power(k)
        for left in LETTERS:
            for right in LETTERS:
                if not legal[(left, right)]:
                    continue
                if power.image(left)[-1] == left and power.image(right)[0] == right:
                    logger.debug(f"Seed {left}|{right} with period {k} for {s}")
                    return SeedCycle(left, right, k)
    raise NoLegalSeed(f"No legal seed with period <= {MAX_SEED_PERIOD} for {s}",
                      {'substitution': str(s)})
