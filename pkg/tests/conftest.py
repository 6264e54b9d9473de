from fractions import Fraction

import pytest

from cantorval.geometry import displacement_matrix, natural_lengths
from cantorval.quadratic import make_field
from cantorval.substitution import parse_substitution, substitution_matrix
from cantorval.windows import build_window_system, certified_hull

FIBONACCI = "(ab,a)"
SCRAMBLED = "(aab,ba)"
SILVER = "(bba,ab)"
NON_UNIMODULAR = "(aaba,aa)"


class Prepared:
    """Field, lengths, displacements, window system and hulls of one substitution."""

    def __init__(self, text: str, hull_eps=Fraction(1, 10 ** 9)):
        self.s = parse_substitution(text)
        self.m = substitution_matrix(self.s)
        self.f = make_field(self.m)
        self.lengths = natural_lengths(self.s)
        self.T = displacement_matrix(self.s, self.lengths)
        self.sys = build_window_system(self.T, self.f)
        self.hulls = certified_hull(self.sys, hull_eps)

    def num(self, a, b=0):
        return self.f.num(a, b)


@pytest.fixture(scope="session")
def fibonacci():
    return Prepared(FIBONACCI)


@pytest.fixture(scope="session")
def scrambled():
    return Prepared(SCRAMBLED)


@pytest.fixture(scope="session")
def silver():
    return Prepared(SILVER)


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep a user's ~/.cantorval/config.yaml out of the tests."""
    monkeypatch.setenv("CANTORVAL_CONFIG", str(tmp_path / "missing.yaml"))
