import random
from fractions import Fraction

import pytest

from w3lab import kac
from w3lab.exact import (B_SQUARED, C, ExactScalar, H, ONE, W, ZERO, scalar)
from w3lab.verma import (GramMatrix, LevelTooLarge, Mode, ModeWord, OMEGA,
                         apply, apply_lambda, apply_mode, determinant,
                         determinant_at, enumerate_basis, gram_matrix,
                         inner_product)

L1 = ModeWord((1,), ())
L2 = ModeWord((2,), ())
W1 = ModeWord((), (1,))
W2 = ModeWord((), (2,))
L1W1 = ModeWord((1,), (1,))

DEN = ExactScalar({(1, 0, 0): Fraction(5), (0, 0, 0): Fraction(22)})


def as_vec(word):
    return {word: ONE}


# ---------------------------------------------------------------------------
# basis enumeration
# ---------------------------------------------------------------------------

def test_enumerate_basis_level0():
    assert enumerate_basis(0) == [OMEGA]


def test_enumerate_basis_level1():
    assert [w.label() for w in enumerate_basis(1)] == ["L-1", "W-1"]


def test_enumerate_basis_level2():
    labels = [w.label() for w in enumerate_basis(2)]
    assert labels == ["L-2", "L-1 L-1", "L-1 W-1", "W-2", "W-1 W-1"]


def test_enumerate_basis_counts_match_p2():
    for n in range(7):
        assert len(enumerate_basis(n)) == kac.p2(n)


def test_mode_word_validation():
    with pytest.raises(ValueError):
        ModeWord((2, 1), ())
    with pytest.raises(ValueError):
        ModeWord((), (0,))
    assert ModeWord.from_label("L-2 L-1 W-3") == ModeWord((1, 2), (3,))
    assert ModeWord.from_label("1") == OMEGA


# ---------------------------------------------------------------------------
# apply_mode
# ---------------------------------------------------------------------------

def test_apply_l1_to_lminus1():
    assert apply_mode("L", 1, as_vec(L1)) == {OMEGA: scalar(2) * H}


def test_positive_modes_annihilate():
    assert apply_mode("L", 5, as_vec(OMEGA)) == {}
    assert apply_mode("W", 3, as_vec(OMEGA)) == {}


def test_apply_l1_to_wminus1():
    assert apply_mode("L", 1, as_vec(W1)) == {OMEGA: scalar(3) * W}


def test_zero_modes_read_weights():
    assert apply_mode("L", 0, as_vec(OMEGA)) == {OMEGA: H}
    assert apply_mode("W", 0, as_vec(OMEGA)) == {OMEGA: W}


def test_mode_value_wrapper():
    assert Mode("L", 2).grade == 2
    assert Mode("W", -1).grade == 3
    assert apply(Mode("L", 1), as_vec(L1)) == apply_mode("L", 1, as_vec(L1))
    with pytest.raises(ValueError):
        apply_mode("X", 0, as_vec(OMEGA))


def test_creation_keeps_words_ordered():
    v = apply_mode("L", -2, as_vec(L1))
    # L_{-2} L_{-1} O reorders to L_{-1} L_{-2} O plus the commutator term
    assert set(v) == {ModeWord((1, 2), ()), ModeWord((3,), ())}
    assert v[ModeWord((3,), ())] == scalar(-1)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def test_inner_product_normalization():
    assert inner_product(OMEGA, OMEGA) == ONE


def test_inner_product_level1():
    assert inner_product(L1, L1) == scalar(2) * H
    assert inner_product(L1, W1) == scalar(3) * W
    # derived by hand from [W_1, W_-1] = 2 b^2 Lambda_0 - (1/5) L_0
    ww = inner_product(W1, W1)
    expect = (scalar(32) * H * H + scalar(2) * H - C * H).exact_div(DEN)
    assert ww == expect


def test_inner_product_cross_level_vanishes():
    assert inner_product(L1, L2) == ZERO


def test_level2_hand_checked_entries():
    # Virasoro block
    assert inner_product(L2, L2) == scalar(4) * H + C * scalar(Fraction(1, 2))
    L11 = ModeWord((1, 1), ())
    assert inner_product(L2, L11) == scalar(6) * H
    assert inner_product(L11, L11) == scalar(8) * H * H + scalar(4) * H
    # W block, from [W_2, W_-2] = 4 b^2 Lambda_0 + (8/5) L_0
    expect = (scalar(64) * H * H + scalar(48) * H
              + scalar(8) * C * H).exact_div(DEN)
    assert inner_product(W2, W2) == expect
    assert inner_product(L2, W2) == scalar(6) * W
    # mixed, from L_1 W_-2 O = 4 W_-1 O
    expect = (scalar(128) * H * H + scalar(8) * H
              - scalar(4) * C * H).exact_div(DEN)
    assert inner_product(L1W1, W2) == expect


def test_orthogonality_across_levels():
    words = [w for lev in range(5) for w in enumerate_basis(lev)]
    rng = random.Random(5)
    pairs = [(u, v) for u in words for v in words if u.level != v.level]
    for u, v in rng.sample(pairs, 60):
        assert inner_product(u, v) == ZERO


def test_w_parity_vanishes_at_w_zero():
    rng = random.Random(17)
    words = [w for lev in range(5) for w in enumerate_basis(lev)]
    checked = 0
    for u in words:
        for v in words:
            if (len(u.wpart) + len(v.wpart)) % 2 == 1 and u.level == v.level:
                val = inner_product(u, v)
                for _ in range(3):
                    cv = Fraction(rng.randint(3, 50))
                    hv = Fraction(rng.randint(-7, 7), rng.randint(1, 5))
                    assert val.evaluate(cv, hv, 0) == 0
                checked += 1
    assert checked >= 10


def test_hermitian_symmetry():
    words = [w for lev in range(4) for w in enumerate_basis(lev)]
    for u in words:
        for v in words:
            assert inner_product(u, v) == inner_product(v, u)


def _commutator_rhs(g1, m, g2, n, vec):
    """RHS of the algebra relations applied to vec."""
    out = {}
    def acc(v, s):
        for word, coef in v.items():
            cur = out.get(word, ZERO) + coef * s
            if cur:
                out[word] = cur
            elif word in out:
                del out[word]
    if g1 == "L" and g2 == "L":
        acc(apply_mode("L", m + n, vec), scalar(m - n))
        if m + n == 0:
            acc(vec, C * scalar(Fraction(m * (m * m - 1), 12)))
    elif g1 == "L" and g2 == "W":
        acc(apply_mode("W", m + n, vec), scalar(2 * m - n))
    elif g1 == "W" and g2 == "L":
        acc(apply_mode("W", m + n, vec), scalar(m - 2 * n))
    else:
        if m + n == 0:
            acc(vec, C * scalar(Fraction(m * (m * m - 1) * (m * m - 4), 360)))
        acc(apply_lambda(m + n, vec), B_SQUARED * scalar(m - n))
        acc(apply_mode("L", m + n, vec),
            scalar(Fraction((m - n) * (2 * m * m - m * n + 2 * n * n - 8), 30)))
    return out


def test_lambda_finite_ranges_are_complete():
    """Widening the mode sums beyond the stated ranges changes nothing."""
    for word in enumerate_basis(2) + enumerate_basis(3):
        lev = word.level
        for s in (-2, 0, 1, 3):
            tight = apply_lambda(s, as_vec(word))
            wide = {}
            def acc(v, scale):
                for w2, c2 in v.items():
                    cur = wide.get(w2, ZERO) + c2 * scale
                    if cur:
                        wide[w2] = cur
                    elif w2 in wide:
                        del wide[w2]
            for k in range(-1, lev + 6):
                acc(apply_mode("L", s - k, apply_mode("L", k, as_vec(word))),
                    ONE)
            for k in range(s - lev - 6, -1):
                acc(apply_mode("L", k, apply_mode("L", s - k, as_vec(word))),
                    ONE)
            acc(apply_mode("L", s, as_vec(word)),
                scalar(Fraction(-3 * (s + 2) * (s + 3), 10)))
            assert tight == wide


def test_jacobi_style_commutator_consistency():
    """[X_m, Y_n] computed by double application equals the algebra RHS."""
    words = [w for lev in range(4) for w in enumerate_basis(lev)]
    gens = ["L", "W"]
    for g1 in gens:
        for g2 in gens:
            for m in range(-3, 4):
                for n in range(-3, 4):
                    if g1 == g2 and m < n:
                        continue  # antisymmetry makes the other half redundant
                    for word in words:
                        vec = as_vec(word)
                        lhs = {}
                        for w2, c2 in apply_mode(g2, n, vec).items():
                            for w3, c3 in apply_mode(g1, m, {w2: ONE}).items():
                                cur = lhs.get(w3, ZERO) + c2 * c3
                                if cur:
                                    lhs[w3] = cur
                                elif w3 in lhs:
                                    del lhs[w3]
                        for w2, c2 in apply_mode(g1, m, vec).items():
                            for w3, c3 in apply_mode(g2, n, {w2: ONE}).items():
                                cur = lhs.get(w3, ZERO) - c2 * c3
                                if cur:
                                    lhs[w3] = cur
                                elif w3 in lhs:
                                    del lhs[w3]
                        assert lhs == _commutator_rhs(g1, m, g2, n, vec), \
                            (g1, m, g2, n, word.label())


# ---------------------------------------------------------------------------
# Gram matrices and determinants
# ---------------------------------------------------------------------------

def test_gram_level0(grams):
    assert grams[0].entries == [[ONE]]
    assert determinant(grams[0]) == ONE


def test_gram_level1_symbolic(grams):
    g = grams[1]
    assert [w.label() for w in g.basis] == ["L-1", "W-1"]
    assert g.entries[0][0] == scalar(2) * H
    assert g.entries[0][1] == scalar(3) * W
    assert g.entries[1][0] == scalar(3) * W


def test_gram_symmetric(grams):
    for g in grams.values():
        for i in range(g.dimension):
            for j in range(g.dimension):
                assert g.entries[i][j] == g.entries[j][i]


def test_gram_dimensions(grams):
    for n, g in grams.items():
        assert g.dimension == kac.p2(n)


def test_determinant_2x2_identity(grams):
    g = grams[1]
    x = g.entries[1][1]
    expect = scalar(2) * H * x - scalar(9) * W * W
    assert determinant(g) == expect


def test_determinant_level1_positive_inside_region(grams):
    val = determinant_at(grams[1], 3, Fraction(1, 24), 0)
    assert val > 0


def test_determinant_evaluation_matches_symbolic(grams):
    for n in (1, 2):
        sym = determinant(grams[n])
        for pt in [(3, Fraction(1, 24), 0), (10, 2, Fraction(1, 7)),
                   (50, 1, Fraction(-2, 3))]:
            assert determinant_at(grams[n], *pt) == sym.evaluate(*pt)


def test_level_guard():
    with pytest.raises(LevelTooLarge):
        gram_matrix(7)
    with pytest.raises(LevelTooLarge):
        gram_matrix(9, level_cap=8)


def test_gram_json_round_trip(grams):
    for n in (0, 1, 2):
        g = grams[n]
        back = GramMatrix.from_json(g.to_json())
        assert back.level == g.level
        assert back.basis == g.basis
        assert back.entries == g.entries
        # deterministic serialization
        assert back.to_json() == g.to_json()


def test_gram_level1_golden_json(grams):
    expect = (
        '{\n  "level": 1,\n  "basis": [\n    "L-1",\n    "W-1"\n  ],\n'
        '  "entries": [\n    [\n      "2*h",\n      "3*w"\n    ],\n'
        '    [\n      "3*w",\n      "(-c*h + 32*h^2 + 2*h)/(22+5c)^1"\n    ]\n'
        '  ]\n}'
    )
    assert grams[1].to_json() == expect
