"""Abstract lowest-weight calculus for the two-field algebra (L, W).

Ordered words of creation modes applied to the lowest weight vector span the
representation space; this module rewrites an arbitrary mode application back
into that ordered basis using the commutation relations

    [L_m, L_n] = (m-n) L_{m+n} + (c/12) m(m^2-1) delta_{m+n,0}
    [L_m, W_n] = (2m-n) W_{m+n}
    [W_m, W_n] = (c/360) m(m^2-1)(m^2-4) delta_{m+n,0}
                 + b^2 (m-n) Lambda_{m+n}
                 + (1/30)(m-n)(2m^2 - mn + 2n^2 - 8) L_{m+n}

with b^2 = 16/(22+5c) and
Lambda_n = sum_{k>-2} L_{n-k} L_k + sum_{k<=-2} L_k L_{n-k}
           - (3/10)(n+2)(n+3) L_n.

The L-coefficient in [W, W] is 1/30: that value is forced by the field-form
relations (expand the delta-function commutator into modes) and is the one the
free-field realization satisfies.

All coefficients produced by the reduction are ExactScalars, i.e. polynomials
in c, 1/(22+5c), h, w.  Termination of the rewriting recurses on the grade
g = 2*(number of L) + 3*(number of W), which strictly drops on every
commutator byproduct, plus the number of out-of-order adjacent pairs, which
drops on every swap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Tuple

from .exact import (B_SQUARED, C, ExactScalar, H, ONE, W, ZERO, parse_scalar,
                    scalar)


class LevelTooLarge(ValueError):
    """Requested Gram level exceeds the configured symbolic-size guard."""


class Mode(NamedTuple):
    """A single generator mode; the grade (2 for L, 3 for W) is derived."""

    gen: str
    n: int

    @property
    def grade(self) -> int:
        return 2 if self.gen == "L" else 3


# Soft guard: P2(level)^2 exact reductions must stay desk-sized.
DEFAULT_LEVEL_CAP = 6


@dataclass(frozen=True)
class ModeWord:
    """Ordered word L_{-m1}...L_{-ml} W_{-n1}...W_{-nk} applied to Omega.

    Both index tuples are weakly increasing positive integers.
    """

    lpart: Tuple[int, ...] = ()
    wpart: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(m <= 0 for m in self.lpart) or any(n <= 0 for n in self.wpart):
            raise ValueError("mode indices must be positive")
        if list(self.lpart) != sorted(self.lpart) or \
           list(self.wpart) != sorted(self.wpart):
            raise ValueError("mode indices must be weakly increasing")

    @property
    def level(self) -> int:
        return sum(self.lpart) + sum(self.wpart)

    @property
    def grade(self) -> int:
        return 2 * len(self.lpart) + 3 * len(self.wpart)

    def label(self) -> str:
        if not self.lpart and not self.wpart:
            return "1"
        toks = [f"L-{m}" for m in self.lpart] + [f"W-{n}" for n in self.wpart]
        return " ".join(toks)

    @staticmethod
    def from_label(text: str) -> "ModeWord":
        text = text.strip()
        if text in ("1", ""):
            return OMEGA
        lpart, wpart = [], []
        for tok in text.split():
            gen, idx = tok[0], int(tok[1:])
            if idx >= 0:
                raise ValueError(f"expected negative mode index in {tok!r}")
            (lpart if gen == "L" else wpart).append(-idx)
        return ModeWord(tuple(sorted(lpart)), tuple(sorted(wpart)))


OMEGA = ModeWord()

# A vector in the module: finite map word -> coefficient.
VermaVector = Dict[ModeWord, ExactScalar]

_L_COEFF_WW = Fraction(1, 30)


def _add_into(acc: VermaVector, word: ModeWord, coef: ExactScalar) -> None:
    cur = acc.get(word)
    new = coef if cur is None else cur + coef
    if new:
        acc[word] = new
    elif cur is not None:
        del acc[word]


def _combine(acc: VermaVector, vec: VermaVector, scale: ExactScalar) -> None:
    if not scale:
        return
    for word, coef in vec.items():
        _add_into(acc, word, coef * scale)


def _may_prepend(gen: str, idx: int, word: ModeWord) -> bool:
    """True if the creator (gen, idx<0) can be prepended keeping order."""
    m0 = -idx
    if gen == "L":
        return not word.lpart or m0 <= word.lpart[0]
    # W creators must sit after every L
    if word.lpart:
        return False
    return not word.wpart or m0 <= word.wpart[0]


def _prepended(gen: str, idx: int, word: ModeWord) -> ModeWord:
    m0 = -idx
    if gen == "L":
        return ModeWord((m0,) + word.lpart, word.wpart)
    return ModeWord(word.lpart, (m0,) + word.wpart)


def _leading(word: ModeWord) -> Tuple[str, int, ModeWord]:
    if word.lpart:
        return "L", -word.lpart[0], ModeWord(word.lpart[1:], word.wpart)
    return "W", -word.wpart[0], ModeWord((), word.wpart[1:])


_apply_cache: Dict[Tuple[str, int, ModeWord], VermaVector] = {}


def _apply_word(gen: str, n: int, word: ModeWord) -> VermaVector:
    """Action of the generator mode (gen, n) on a basis word."""
    key = (gen, n, word)
    hit = _apply_cache.get(key)
    if hit is not None:
        return hit

    out: VermaVector = {}
    if word is OMEGA or (not word.lpart and not word.wpart):
        if n < 0:
            out = {_prepended(gen, n, word): ONE}
        elif n == 0:
            out = {OMEGA: H if gen == "L" else W}
        # positive modes annihilate Omega
    elif n < 0 and _may_prepend(gen, n, word):
        out = {_prepended(gen, n, word): ONE}
    else:
        g1, i1, rest = _leading(word)
        # K_nu K_mu rest = K_mu (K_nu rest) + [K_nu, K_mu] rest
        inner = _apply_word(gen, n, rest)
        for w2, coef in inner.items():
            _combine(out, _apply_word(g1, i1, w2), coef)
        for coef, vec in _commutator_action(gen, n, g1, i1, rest):
            _combine(out, vec, coef)

    _apply_cache[key] = out
    return out


def _commutator_action(g1: str, m: int, g2: str, n: int,
                       word: ModeWord) -> Iterable[Tuple[ExactScalar, VermaVector]]:
    """Yield (coefficient, vector) pairs for [K_{g1,m}, K_{g2,n}] word."""
    base = {word: ONE}
    if g1 == "L" and g2 == "L":
        if m != n:
            yield scalar(m - n), _apply_word("L", m + n, word)
        if m + n == 0:
            cc = C * scalar(Fraction(m * (m * m - 1), 12))
            if cc:
                yield cc, base
    elif g1 == "L" and g2 == "W":
        if 2 * m != n:
            yield scalar(2 * m - n), _apply_word("W", m + n, word)
    elif g1 == "W" and g2 == "L":
        # [W_m, L_n] = -[L_n, W_m]
        if 2 * n != m:
            yield scalar(m - 2 * n), _apply_word("W", m + n, word)
    else:
        s = m + n
        if s == 0:
            cc = C * scalar(Fraction(m * (m * m - 1) * (m * m - 4), 360))
            if cc:
                yield cc, base
        if m != n:
            yield B_SQUARED * scalar(m - n), apply_lambda(s, base)
            lc = Fraction(m - n) * (2 * m * m - m * n + 2 * n * n - 8) * _L_COEFF_WW
            if lc:
                yield scalar(lc), _apply_word("L", s, word)


def apply_lambda(s: int, vec: VermaVector) -> VermaVector:
    """Action of Lambda_s; the infinite sums collapse to finite ranges.

    On a vector of maximal level l, L_k kills everything for k > l, so the
    first sum runs over k in [-1, l] and the second over k in [s-l, -2].
    """
    out: VermaVector = {}
    for word, coef in vec.items():
        lev = word.level
        base = {word: ONE}
        for k in range(-1, lev + 1):
            step = apply_mode("L", k, base)
            _combine(out, apply_mode("L", s - k, step), coef)
        for k in range(s - lev, -1):
            if k > -2:
                break
            step = apply_mode("L", s - k, base)
            _combine(out, apply_mode("L", k, step), coef)
        lam = scalar(Fraction(-3 * (s + 2) * (s + 3), 10))
        if lam:
            _combine(out, apply_mode("L", s, base), coef * lam)
    return out


def apply_mode(gen: str, n: int, vec: VermaVector) -> VermaVector:
    """Exact action of L_n or W_n on a vector, in the ordered basis."""
    if gen not in ("L", "W"):
        raise ValueError(f"unknown generator {gen!r}")
    out: VermaVector = {}
    for word, coef in vec.items():
        _combine(out, _apply_word(gen, n, word), coef)
    return out


def apply(mode: Mode, vec: VermaVector) -> VermaVector:
    """apply_mode with the mode packed as a Mode value."""
    return apply_mode(mode.gen, mode.n, vec)


def clear_cache() -> None:
    _apply_cache.clear()


# ---------------------------------------------------------------------------
# canonical invariant form
# ---------------------------------------------------------------------------

def inner_product(u: ModeWord, v: ModeWord) -> ExactScalar:
    """<u Omega, v Omega> for the canonical form with <Omega, Omega> = 1.

    The left word is adjoined onto the right: its modes act with reversed
    order and negated indices, and the Omega-coefficient of the fully reduced
    vector is the value of the form.
    """
    vec: VermaVector = {v: ONE}
    for m in u.lpart:
        vec = apply_mode("L", m, vec)
        if not vec:
            return ZERO
    for n in u.wpart:
        vec = apply_mode("W", n, vec)
        if not vec:
            return ZERO
    return vec.get(OMEGA, ZERO)


def enumerate_basis(level: int) -> List[ModeWord]:
    """All ordered words of the given level, in a fixed deterministic order.

    The order is descending lexicographic on (lpart, wpart), which puts the
    all-L words first and the all-W words last.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    words = []
    for lpart in _partitions(level):
        rem = level - sum(lpart)
        for wpart in _partitions(rem):
            if sum(wpart) == rem:
                words.append(ModeWord(lpart, wpart))
    words.sort(key=lambda w: (w.lpart, w.wpart), reverse=True)
    return words


def _partitions(n: int) -> List[Tuple[int, ...]]:
    """Weakly increasing tuples of positive integers summing to <= n."""
    out: List[Tuple[int, ...]] = [()]
    def rec(prefix, smallest, remaining):
        for p in range(smallest, remaining + 1):
            out.append(prefix + (p,))
            rec(prefix + (p,), p, remaining - p)
    rec((), 1, n)
    return out


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------

@dataclass
class GramMatrix:
    level: int
    basis: List[ModeWord]
    entries: List[List[ExactScalar]]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def evaluate(self, c_val, h_val, w_val) -> List[List[Fraction]]:
        return [[e.evaluate(c_val, h_val, w_val) for e in row]
                for row in self.entries]

    def evaluate_float(self, c_val, h_val, w_val) -> List[List[float]]:
        return [[e.evaluate_float(c_val, h_val, w_val) for e in row]
                for row in self.entries]

    def to_json(self) -> str:
        payload = {
            "level": self.level,
            "basis": [w.label() for w in self.basis],
            "entries": [[str(e) for e in row] for row in self.entries],
        }
        return json.dumps(payload, indent=2, sort_keys=False)

    @staticmethod
    def from_json(text: str) -> "GramMatrix":
        payload = json.loads(text)
        return GramMatrix(
            level=payload["level"],
            basis=[ModeWord.from_label(s) for s in payload["basis"]],
            entries=[[parse_scalar(s) for s in row]
                     for row in payload["entries"]],
        )


def gram_matrix(level: int, level_cap: int = DEFAULT_LEVEL_CAP) -> GramMatrix:
    """Symbolic Gram matrix of the canonical form at the given level.

    Entries are computed for j <= i and mirrored; the reduction memo makes
    repeated subwords cheap.
    """
    if level > level_cap:
        raise LevelTooLarge(
            f"level {level} exceeds cap {level_cap}; raise level_cap if the "
            f"P2(level)^2 symbolic reductions are genuinely wanted")
    basis = enumerate_basis(level)
    d = len(basis)
    entries = [[ZERO] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1):
            val = inner_product(basis[i], basis[j])
            entries[i][j] = val
            entries[j][i] = val
    return GramMatrix(level, basis, entries)


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def determinant(gram: GramMatrix) -> ExactScalar:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = gram.dimension
    m = [row[:] for row in gram.entries]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
            m[i][k] = ZERO
        prev = m[k][k]
    det = m[n - 1][n - 1] if n else ONE
    return det if sign > 0 else -det


def determinant_at(gram: GramMatrix, c_val, h_val, w_val) -> Fraction:
    """Exact rational determinant of the Gram matrix evaluated at a point.

    This is the evaluation mode for levels where the full symbolic
    determinant would blow up.
    """
    n = gram.dimension
    m = gram.evaluate(c_val, h_val, w_val)
    det = Fraction(1)
    for k in range(n):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    det = -det
                    break
            else:
                return Fraction(0)
        piv = m[k][k]
        det *= piv
        for i in range(k + 1, n):
            f = m[i][k] / piv
            if f == 0:
                continue
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return det
