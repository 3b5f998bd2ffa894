"""Sequence alignment, transition cosine, and density overlap.

The alignment kernel is verified against a plain recursive Needleman-Wunsch
with memoization: exhaustively for every sequence pair up to length 4 over a
3-symbol alphabet, then on longer random pairs.
"""

import itertools
from functools import lru_cache

import numpy as np
import pytest

from gazekit.aoi import TransitionCounts, TransitionKind
from gazekit.errors import AlphabetMismatch, GeometryMismatch
from gazekit.model import DensityGrid, Dim
from gazekit.similarity import (
    NwScore,
    NwScoring,
    density_overlap,
    nw_score,
    similarity_matrix,
    transition_cosine,
)


def nw_reference(a, b, match=1.0, mismatch=-1.0, gap=-1.0):
    """Textbook recursion on the last characters of each prefix."""
    a = tuple(a)
    b = tuple(b)

    @lru_cache(maxsize=None)
    def best(i, j):
        if i == 0 and j == 0:
            return 0.0
        opts = []
        if i > 0 and j > 0:
            opts.append(best(i - 1, j - 1) + (match if a[i - 1] == b[j - 1] else mismatch))
        if i > 0:
            opts.append(best(i - 1, j) + gap)
        if j > 0:
            opts.append(best(i, j - 1) + gap)
        return max(opts)

    return best(len(a), len(b))


# -- alignment ---------------------------------------------------------------


def test_nw_worked_examples():
    assert nw_score("ABC", "ABC") == NwScore(3.0, 1.0)
    got = nw_score("ABC", "AXC")
    assert got.raw == 1.0 and got.normalized == pytest.approx(1 / 3)
    got = nw_score("A", "")
    assert got.raw == -1.0 and got.normalized == -1.0
    assert nw_score("", "") == NwScore(0.0, 1.0)


def test_nw_exhaustive_short_sequences():
    symbols = "ABC"
    all_seqs = [[]] + [list(p) for n in (1, 2, 3) for p in itertools.product(symbols, repeat=n)]
    for a in all_seqs:
        for b in all_seqs:
            got = nw_score(a, b)
            want = nw_reference(a, b)
            assert got.raw == want, (a, b)
            if a or b:
                assert got.normalized == pytest.approx(want / max(len(a), len(b)))


def test_nw_randomized_against_reference():
    rng = np.random.default_rng(41)
    symbols = ["A", "B", "C", "D", "E"]
    for _ in range(150):
        a = [symbols[k] for k in rng.integers(0, 5, int(rng.integers(0, 12)))]
        b = [symbols[k] for k in rng.integers(0, 5, int(rng.integers(0, 12)))]
        assert nw_score(a, b).raw == nw_reference(a, b)


def test_nw_custom_scoring():
    scoring = NwScoring(match=2.0, mismatch=-3.0, gap=-0.5)
    rng = np.random.default_rng(42)
    for _ in range(50):
        a = ["AB"[k] for k in rng.integers(0, 2, int(rng.integers(0, 8)))]
        b = ["AB"[k] for k in rng.integers(0, 2, int(rng.integers(0, 8)))]
        got = nw_score(a, b, scoring)
        want = nw_reference(a, b, 2.0, -3.0, -0.5)
        assert got.raw == want
        if a or b:
            assert got.normalized == pytest.approx(want / (2.0 * max(len(a), len(b))))


def test_nw_symmetry_and_self_similarity():
    rng = np.random.default_rng(43)
    for _ in range(100):
        a = ["ABC"[k] for k in rng.integers(0, 3, int(rng.integers(1, 10)))]
        b = ["ABC"[k] for k in rng.integers(0, 3, int(rng.integers(1, 10)))]
        assert nw_score(a, b) == nw_score(b, a)
        assert nw_score(a, a) == NwScore(float(len(a)), 1.0)
        assert nw_score(a, b).normalized <= 1.0


def test_nw_scoring_validation():
    with pytest.raises(ValueError):
        NwScoring(match=1.0, mismatch=1.0)
    with pytest.raises(ValueError):
        NwScoring(match=1.0, gap=2.0)


# -- transition cosine -------------------------------------------------------


def tc(counts, kind=TransitionKind.DIRECT, alphabet=("A", "B", "C")):
    return TransitionCounts(kind=kind, alphabet=alphabet, counts=np.asarray(counts))


def test_cosine_ignores_diagonal():
    a = tc([[9, 1, 0], [0, 0, 0], [0, 0, 5]])
    b = tc([[0, 1, 0], [0, 7, 0], [0, 0, 0]])
    assert transition_cosine(a, b) == pytest.approx(1.0)  # only A->B off-diagonal


def test_cosine_zero_conventions():
    zero = tc(np.zeros((3, 3), dtype=int))
    diag = tc(np.diag([4, 0, 2]))
    some = tc([[0, 2, 0], [0, 0, 0], [0, 0, 0]])
    assert transition_cosine(zero, zero) == 1.0
    assert transition_cosine(zero, diag) == 1.0  # diagonal-only is zero off-diagonal
    assert transition_cosine(zero, some) == 0.0
    assert transition_cosine(some, zero) == 0.0


def test_cosine_bounds_and_symmetry_randomized():
    rng = np.random.default_rng(44)
    for _ in range(300):
        a = tc(rng.integers(0, 10, (3, 3)))
        b = tc(rng.integers(0, 10, (3, 3)))
        v = transition_cosine(a, b)
        assert 0.0 <= v <= 1.0
        assert v == transition_cosine(b, a)
        assert transition_cosine(a, a) == pytest.approx(1.0) or a.flat_offdiag().sum() == 0


def test_cosine_alphabet_mismatch():
    a = tc(np.zeros((3, 3), dtype=int))
    b = tc(np.zeros((2, 2), dtype=int), alphabet=("A", "B"))
    with pytest.raises(AlphabetMismatch):
        transition_cosine(a, b)
    c = tc(np.zeros((3, 3), dtype=int), kind=TransitionKind.GLANCE)
    with pytest.raises(AlphabetMismatch):
        transition_cosine(a, c)


# -- density overlap ---------------------------------------------------------


def grid(mass):
    mass = np.asarray(mass, dtype=np.float64)
    return DensityGrid(origin=(0.0, 0.0), cell_size=1.0, width=mass.shape[1],
                       height=mass.shape[0], mass=mass, total_mass=float(mass.sum()))


def test_density_overlap_values():
    a = grid([[0.5, 0.5], [0.0, 0.0]])
    b = grid([[0.0, 0.5], [0.5, 0.0]])
    assert density_overlap(a, a) == pytest.approx(1.0)
    assert density_overlap(a, b) == pytest.approx(0.5)
    disjoint = grid([[0.0, 0.0], [0.5, 0.5]])
    assert density_overlap(a, disjoint) == 0.0


def test_density_overlap_randomized_properties():
    rng = np.random.default_rng(45)
    for _ in range(200):
        a = rng.uniform(0, 1, (4, 5))
        b = rng.uniform(0, 1, (4, 5))
        a /= a.sum()
        b /= b.sum()
        ga, gb = grid(a), grid(b)
        v = density_overlap(ga, gb)
        assert 0.0 <= v <= 1.0 + 1e-12
        assert v == pytest.approx(density_overlap(gb, ga))
        assert density_overlap(ga, ga) == pytest.approx(1.0)


def test_density_overlap_geometry_mismatch():
    a = grid(np.full((2, 2), 0.25))
    b = DensityGrid(origin=(1.0, 0.0), cell_size=1.0, width=2, height=2,
                    mass=np.full((2, 2), 0.25), total_mass=1.0)
    with pytest.raises(GeometryMismatch):
        density_overlap(a, b)


# -- matrix assembly ---------------------------------------------------------


def test_similarity_matrix_symmetric_with_unit_diagonal():
    seqs = {"s1": "ABAB", "s2": "ABC", "s3": ""}

    def pair(u, v):
        return nw_score(seqs[u], seqs[v]).normalized

    m = similarity_matrix(("s1", "s2", "s3"), pair, Dim.SAMPLE, "nw")
    assert m.symmetric
    assert np.allclose(np.diag(m.values), 1.0)
    assert m.value_at("s1", "s2") == m.value_at("s2", "s1")
    assert m.value_at("s1", "s2") == pytest.approx(nw_score("ABAB", "ABC").normalized)
    with pytest.raises(ValueError):
        similarity_matrix((), pair, Dim.SAMPLE, "nw")
