"""Truncated two-current Fock space and the free-field realizations.

Everything here is numeric (complex doubles): b and sqrt(2) are irrational,
so exactness lives on the symbolic side and agreement between the two sides
is the correctness argument.  The computations themselves are still exact in
structure: mode sums collapse to finite ranges because annihilation above the
level kills a state and the twist coefficients vanish for positive indices,
so no operator ever silently truncates.  The configured cutoff is a contract
guard: applying a mode whose image would exceed it raises CutoffExceeded.

Conventions: shifted fields everywhere, i.e. mode n of a field multiplies
z^{-n}; the circle derivative carries -i*n per mode; the two currents commute
and their common lowest weight vector has a_{[j],0} eigenvalue q_j.

The twist function rho(z) = -i(z-1)/(z+1), expanded around z = 0, has modes
rho_0 = i, rho_n = 2i(-1)^n for n < 0 and 0 for n > 0, and satisfies
rho^2/2 + 1/2 - rho' = 0; that identity is what makes the twisted stress
tensor close the Virasoro relations with c shifted upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .verma import ModeWord, enumerate_basis

PRUNE_TOL = 1e-14

VARIANTS = ("raw", "vacuumModified", "unitaryFamily")

BiKey = Tuple[Tuple[int, ...], Tuple[int, ...]]
State = Dict[BiKey, complex]

VACUUM_KEY: BiKey = ((), ())


class CutoffExceeded(RuntimeError):
    """An operator image would land above the configured level cutoff."""


# ---------------------------------------------------------------------------
# rho expansion
# ---------------------------------------------------------------------------

def rho_coefficient(n: int) -> complex:
    if n > 0:
        return 0j
    if n == 0:
        return 1j
    return -2j if n % 2 else 2j


def rho_prime_coefficient(n: int) -> complex:
    # circle derivative: mode n picks up -i*n
    return -1j * n * rho_coefficient(n)


def rho_coefficients(max_order: int) -> Dict[int, complex]:
    """Expansion coefficients rho_n for |n| <= max_order."""
    return {n: rho_coefficient(n) for n in range(-max_order, max_order + 1)}


def verify_rho_ode(max_order: int) -> Dict[int, Fraction]:
    """Residuals of rho^2/2 + 1/2 - rho' per mode, in exact arithmetic.

    rho_n = i * r_n with integer r_n, so the mode-n residual is
    -S_n/2 + delta_{n,0}/2 - n*r_n with S_n = sum_k r_k r_{n-k}; everything
    stays in Q.
    """
    if max_order < 2:
        raise ValueError("max_order must be at least 2")
    def r(k: int) -> int:
        if k > 0:
            return 0
        return 1 if k == 0 else (-2 if k % 2 else 2)
    out: Dict[int, Fraction] = {}
    for n in range(-max_order, max_order + 1):
        s = sum(r(k) * r(n - k) for k in range(n, 1))
        out[n] = Fraction(-s, 2) + (Fraction(1, 2) if n == 0 else 0) - n * r(n)
    return out


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def key_levels(key: BiKey) -> Tuple[int, int]:
    return sum(key[0]), sum(key[1])


def key_level(key: BiKey) -> int:
    return sum(key[0]) + sum(key[1])


def key_norm_sq(key: BiKey) -> float:
    """Norm squared of a bicolored-partition basis vector.

    Each sector contributes prod over distinct parts p: p^mult * mult!.
    """
    out = 1.0
    for part in key:
        i = 0
        while i < len(part):
            j = i
            while j < len(part) and part[j] == part[i]:
                j += 1
            mult = j - i
            out *= float(part[i]) ** mult * math.factorial(mult)
            i = j
    return out


def state_inner(u: State, v: State) -> complex:
    """Hermitian Fock form, conjugate-linear in the first argument."""
    return sum((u[k].conjugate() * v[k] * key_norm_sq(k)
                for k in u.keys() & v.keys()), start=0j)


def state_norm(u: State) -> float:
    return math.sqrt(max(state_inner(u, u).real, 0.0))


def state_prune(u: State) -> State:
    return {k: c for k, c in u.items() if abs(c) >= PRUNE_TOL}


def max_state_level(u: State) -> int:
    return max((key_level(k) for k in u), default=0)


def vacuum_state() -> State:
    return {VACUUM_KEY: 1.0 + 0j}


def basis_keys(max_level: int) -> List[BiKey]:
    """All bicolored-partition keys of level <= max_level, ordered."""
    def partitions_desc(n: int) -> List[Tuple[int, ...]]:
        out: List[Tuple[int, ...]] = []
        def rec(prefix, largest, remaining):
            if remaining == 0:
                out.append(prefix)
                return
            for p in range(min(largest, remaining), 0, -1):
                rec(prefix + (p,), p, remaining - p)
        rec((), n, n)
        return out
    keys: List[BiKey] = []
    for lev in range(max_level + 1):
        for l1 in range(lev + 1):
            for p1 in partitions_desc(l1):
                for p2 in partitions_desc(lev - l1):
                    keys.append((p1, p2))
    return keys


# ---------------------------------------------------------------------------
# realization parameters
# ---------------------------------------------------------------------------

@dataclass
class RealizationParams:
    kappa: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    eta: complex = 0j
    cutoff: int = 12
    b_sign: int = 1

    @property
    def central_charge(self) -> float:
        return 2.0 + 12.0 * self.kappa ** 2

    @property
    def b(self) -> float:
        return self.b_sign * 4.0 / math.sqrt(22.0 + 5.0 * self.central_charge)

    def lowest_weights(self, variant: str) -> Tuple[complex, complex]:
        """(h, w) of the common lowest weight vector for the chosen variant."""
        q1, q2, k = self.q1, self.q2, self.kappa
        b = self.b
        if variant == "unitaryFamily":
            h = (q1 * q1 + q2 * q2 + k * k) / 2.0
            w = b * (q2 ** 3 - 3.0 * q1 * q1 * q2) / (3.0 * math.sqrt(2.0))
            return complex(h), complex(w)
        # raw and vacuumModified share the untwisted weight formulas
        h = 0.5 * q1 * q1 + 0.5 * q2 * q2 - 1j * k * q1
        w = (b / math.sqrt(2.0)) * (q2 ** 3 / 3.0
                                    - (q1 * q1 - 2j * k * q1) * q2
                                    + k * k * q2)
        return h, w


# ---------------------------------------------------------------------------
# the realization engine
# ---------------------------------------------------------------------------

class ModeOperator:
    """A single Fourier mode acting on truncated states.

    Mode index n bounds the image level by (input level - n); applying the
    operator to a state whose image would exceed the cutoff raises
    CutoffExceeded rather than truncating.
    """

    def __init__(self, realization: "Realization", spec: Tuple, index: int):
        self._real = realization
        self.spec = spec
        self.index = index

    def __call__(self, state: State) -> State:
        cut = self._real.params.cutoff
        top = max_state_level(state)
        if top - self.index > cut:
            raise CutoffExceeded(
                f"mode {self.spec} on level-{top} state exceeds cutoff {cut}")
        return self._real._state_apply(self.spec, state)

    apply = __call__


class Realization:
    """One of the two-current field assemblies acting on the Fock module.

    variant:
      raw            -- the plain free-field pair of fields
      vacuumModified -- the rho-twisted pair (weakly symmetric)
      unitaryFamily  -- the manifestly symmetric family
    shift1 optionally adds scalar mode shifts to current 1 (used to realize
    the current-algebra automorphisms); it must vanish for positive indices.
    """

    def __init__(self, params: RealizationParams, variant: str = "raw",
                 shift1: Optional[Callable[[int], complex]] = None):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.params = params
        self.variant = variant
        self._shift1 = shift1
        self._kcache: Dict[Tuple, State] = {}

    # -- public mode factories ------------------------------------------

    def current_mode(self, which: int, n: int) -> ModeOperator:
        return ModeOperator(self, ("a", which, n), n)

    def normal_power_mode(self, which: int, power: int, n: int) -> ModeOperator:
        if power == 2:
            return ModeOperator(self, ("j2", which, n), n)
        if power == 3:
            return ModeOperator(self, ("j3", which, n), n)
        raise ValueError("power must be 2 or 3")

    def L(self, n: int) -> ModeOperator:
        return ModeOperator(self, ("L", n), n)

    def W(self, n: int) -> ModeOperator:
        return ModeOperator(self, ("W", n), n)

    # -- internal application (exact, unrestricted) -----------------------

    def _state_apply(self, spec: Tuple, state: State) -> State:
        out: State = {}
        for key, coef in state.items():
            if abs(coef) < PRUNE_TOL:
                continue
            for k2, c2 in self._key_apply(spec, key).items():
                val = out.get(k2, 0j) + coef * c2
                out[k2] = val
        return state_prune(out)

    def _key_apply(self, spec: Tuple, key: BiKey) -> State:
        hit = self._kcache.get((spec, key))
        if hit is not None:
            return hit
        kind = spec[0]
        if kind == "a":
            out = self._a_key(spec[1], spec[2], key)
        elif kind == "j2":
            out = self._j2_key(spec[1], spec[2], key)
        elif kind == "j3":
            out = self._j3_key(spec[1], spec[2], key)
        elif kind == "L":
            out = self._L_key(spec[1], key)
        elif kind == "W":
            out = self._W_key(spec[1], key)
        elif kind == "T1k":
            out = self._T1k_key(spec[1], key)
        else:
            raise ValueError(f"unknown spec {spec!r}")
        self._kcache[(spec, key)] = out
        return out

    # current modes ------------------------------------------------------

    def _shift_value(self, which: int, n: int) -> complex:
        if which == 1 and self._shift1 is not None:
            return complex(self._shift1(n))
        return 0j

    def _a_key(self, which: int, n: int, key: BiKey) -> State:
        part = key[which - 1]
        out: State = {}
        if n < 0:
            new = tuple(sorted(part + (-n,), reverse=True))
            out[_with_part(key, which, new)] = 1.0 + 0j
        elif n == 0:
            q = self.params.q1 if which == 1 else self.params.q2
            if q:
                out[key] = complex(q)
        else:
            mult = part.count(n)
            if mult:
                lst = list(part)
                lst.remove(n)
                out[_with_part(key, which, tuple(lst))] = complex(mult * n)
        s = self._shift_value(which, n)
        if s:
            out[key] = out.get(key, 0j) + s
        return state_prune(out)

    def _a_state(self, which: int, n: int, state: State) -> State:
        return self._state_apply(("a", which, n), state)

    # normal powers --------------------------------------------------------

    def _j2_key(self, which: int, N: int, key: BiKey) -> State:
        lev = key_levels(key)[which - 1]
        base = {key: 1.0 + 0j}
        out: State = {}
        for k in range(N - lev, 0):
            d = self._a_state(which, N - k, base)
            d = self._a_state(which, k, d)
            _acc(out, d, 1.0)
        for k in range(0, lev + 1):
            d = self._a_state(which, k, base)
            d = self._a_state(which, N - k, d)
            _acc(out, d, 1.0)
        return state_prune(out)

    def _j3_key(self, which: int, N: int, key: BiKey) -> State:
        lev = key_levels(key)[which - 1]
        base = {key: 1.0 + 0j}
        out: State = {}
        for k in range(N - lev, 0):
            d = self._state_apply(("j2", which, N - k), base)
            d = self._a_state(which, k, d)
            _acc(out, d, 1.0)
        for k in range(0, lev + 1):
            d = self._a_state(which, k, base)
            d = self._state_apply(("j2", which, N - k), d)
            _acc(out, d, 1.0)
        return state_prune(out)

    # scalar-series convolutions ------------------------------------------

    def _rho_conv(self, fam: str, which: int, N: int, state: State,
                  prime: bool = False) -> State:
        """(rho * F)_N or (rho' * F)_N with F the current or its derivative."""
        out: State = {}
        lev = max((key_levels(k)[which - 1] for k in state), default=0)
        coeff = rho_prime_coefficient if prime else rho_coefficient
        for k in range(N - lev, 1):
            rc = coeff(k)
            if not rc:
                continue
            d = self._fam_apply(fam, which, N - k, state)
            _acc(out, d, rc)
        return state_prune(out)

    def _fam_apply(self, fam: str, which: int, k: int, state: State) -> State:
        if fam == "a":
            return self._a_state(which, k, state)
        if fam == "jp":
            d = self._a_state(which, k, state)
            return {kk: (-1j * k) * cc for kk, cc in d.items()} if k else {}
        raise ValueError(fam)

    # twisted single-current stress tensor ---------------------------------

    def _T1k_key(self, n: int, key: BiKey) -> State:
        kap = self.params.kappa
        base = {key: 1.0 + 0j}
        out = dict(self._state_apply(("j2", 1, n), base))
        out = {k: 0.5 * c for k, c in out.items()}
        if kap:
            d = self._fam_apply("jp", 1, n, base)
            _acc(out, d, kap)
            d = self._rho_conv("a", 1, n, base)
            _acc(out, d, -kap)
        return state_prune(out)

    # sector-1 mode families used in the W assembly -------------------------

    def _w_family_apply(self, fam: str, k: int, state: State) -> State:
        kap = self.params.kappa
        if fam == "T1k":
            return self._state_apply(("T1k", k), state)
        if fam == "ufT1":
            # T_1 + kappa*J_1' + kappa^2/2
            d = self._state_apply(("j2", 1, k), state)
            out = {kk: 0.5 * cc for kk, cc in d.items()}
            if kap:
                _acc(out, self._fam_apply("jp", 1, k, state), kap)
                if k == 0:
                    _acc(out, state, 0.5 * kap * kap)
            return state_prune(out)
        if fam == "rawT1br":
            # :J_1^2: - 2i*kappa*(J_1 + i*J_1'), modes (J+iJ')_k = (1+k) a_k
            out = dict(self._state_apply(("j2", 1, k), state))
            if kap:
                d = self._a_state(1, k, state)
                _acc(out, d, -2j * kap * (1 + k))
            return state_prune(out)
        if fam == "jp_m_krhop":
            # J_1' - kappa*rho'
            out = dict(self._fam_apply("jp", 1, k, state))
            rc = rho_prime_coefficient(k)
            if kap and rc:
                _acc(out, state, -kap * rc)
            return state_prune(out)
        if fam == "a_m_krho":
            # J_1 - kappa*rho
            out = dict(self._a_state(1, k, state))
            rc = rho_coefficient(k)
            if kap and rc:
                _acc(out, state, -kap * rc)
            return state_prune(out)
        if fam == "jp1":
            return self._fam_apply("jp", 1, k, state)
        if fam == "a1":
            return self._a_state(1, k, state)
        raise ValueError(fam)

    def _cross_product(self, fam1: str, fam2: str, N: int, key: BiKey) -> State:
        """Mode N of (sector-1 family) * (sector-2 family); currents commute."""
        l1, l2 = key_levels(key)
        base = {key: 1.0 + 0j}
        out: State = {}
        for k in range(N - l2, l1 + 1):
            d = self._fam_apply(fam2, 2, N - k, base)
            if not d:
                continue
            d = self._w_family_apply(fam1, k, d)
            _acc(out, d, 1.0)
        return state_prune(out)

    # the realized W3 fields ------------------------------------------------

    def _L_key(self, n: int, key: BiKey) -> State:
        kap = self.params.kappa
        base = {key: 1.0 + 0j}
        if self.variant == "vacuumModified":
            out = dict(self._state_apply(("T1k", n), base))
            d = self._state_apply(("j2", 2, n), base)
            _acc(out, d, 0.5)
            return state_prune(out)
        d1 = self._state_apply(("j2", 1, n), base)
        out = {k: 0.5 * c for k, c in d1.items()}
        d2 = self._state_apply(("j2", 2, n), base)
        _acc(out, d2, 0.5)
        if self.variant == "raw":
            if kap:
                d = self._a_state(1, n, base)
                _acc(out, d, -1j * kap * (1 + n))
        else:  # unitaryFamily
            if kap:
                _acc(out, self._fam_apply("jp", 1, n, base), kap)
                if n == 0:
                    _acc(out, base, 0.5 * kap * kap)
        return state_prune(out)

    def _W_key(self, n: int, key: BiKey) -> State:
        p = self.params
        kap, b = p.kappa, p.b
        sq2 = math.sqrt(2.0)
        base = {key: 1.0 + 0j}
        out: State = {}
        # b/(3 sqrt2) :J_2^3:
        _acc(out, self._state_apply(("j3", 2, n), base), b / (3.0 * sq2))
        if self.variant == "raw":
            _acc(out, self._cross_product("rawT1br", "a", n, key), -b / sq2)
            if kap:
                _acc(out, self._cross_product("jp1", "a", n, key),
                     3.0 * b * kap / (2.0 * sq2))
                _acc(out, self._cross_product("a1", "jp", n, key),
                     -3.0 * b * kap / (2.0 * sq2))
                tail = b * kap * kap / (2.0 * sq2) * (n + 1) * (n + 2)
                if tail:
                    _acc(out, self._a_state(2, n, base), tail)
        elif self.variant == "vacuumModified":
            _acc(out, self._cross_product("T1k", "a", n, key), -sq2 * b)
            if kap:
                _acc(out, self._cross_product("jp_m_krhop", "a", n, key),
                     3.0 * b * kap / (2.0 * sq2))
                _acc(out, self._cross_product("a_m_krho", "jp", n, key),
                     -3.0 * b * kap / (2.0 * sq2))
                tail = b * kap * kap / (2.0 * sq2) * (2 + n * n)
                if tail:
                    _acc(out, self._a_state(2, n, base), tail)
        else:  # unitaryFamily
            _acc(out, self._cross_product("ufT1", "a", n, key), -sq2 * b)
            if kap:
                _acc(out, self._cross_product("jp1", "a", n, key),
                     3.0 * b * kap / (2.0 * sq2))
                _acc(out, self._cross_product("a1", "jp", n, key),
                     -3.0 * b * kap / (2.0 * sq2))
                tail = b * kap * kap / (2.0 * sq2) * (2 + n * n)
                if tail:
                    _acc(out, self._a_state(2, n, base), tail)
        return state_prune(out)

    # Lambda from the realized L modes --------------------------------------

    def lambda_state(self, s: int, state: State) -> State:
        """Lambda_s assembled from the realized Virasoro modes.

        Finite ranges: on a vector of maximal level l the first sum runs over
        k in [-1, l], the second over k in [s-l, -2].
        """
        lev = max_state_level(state)
        out: State = {}
        for k in range(-1, lev + 1):
            d = self._state_apply(("L", k), state)
            if d:
                d = self._state_apply(("L", s - k), d)
                _acc(out, d, 1.0)
        for k in range(s - lev, -1):
            if k > -2:
                break
            d = self._state_apply(("L", s - k), state)
            if d:
                d = self._state_apply(("L", k), d)
                _acc(out, d, 1.0)
        coef = -0.3 * (s + 2) * (s + 3)
        if coef:
            _acc(out, self._state_apply(("L", s), state), coef)
        return state_prune(out)


def _with_part(key: BiKey, which: int, part: Tuple[int, ...]) -> BiKey:
    return (part, key[1]) if which == 1 else (key[0], part)


def _acc(acc: State, d: State, scale: complex) -> None:
    if not scale:
        return
    for k, c in d.items():
        acc[k] = acc.get(k, 0j) + scale * c


# ---------------------------------------------------------------------------
# public factories mirroring the operation surface
# ---------------------------------------------------------------------------

def current_mode(params: RealizationParams, which: int, n: int) -> ModeOperator:
    return Realization(params, "raw").current_mode(which, n)


def normal_power_mode(params: RealizationParams, which: int, power: int,
                      n: int) -> ModeOperator:
    return Realization(params, "raw").normal_power_mode(which, power, n)


def fz_field_mode(fieldname: str, variant: str, n: int,
                  params: RealizationParams) -> ModeOperator:
    """Mode n of the realized stress tensor ('T') or spin-3 field ('M')."""
    real = Realization(params, variant)
    if fieldname in ("T", "L"):
        return real.L(n)
    if fieldname in ("M", "W"):
        return real.W(n)
    raise ValueError(f"unknown field {fieldname!r}")


# ---------------------------------------------------------------------------
# residual checks
# ---------------------------------------------------------------------------

def _residual_max(state: State) -> float:
    return max((abs(c) for c in state.values()), default=0.0)


def check_w3_relations(variant: str, params: RealizationParams,
                       max_mode_index: int, max_level: int) -> dict:
    """Commutator residuals of the realized modes against the algebra.

    For all |m|, |n| <= max_mode_index and all basis states of level
    <= max_level, computes ([X_m, Y_n] - RHS) state and reports the maximal
    coefficient magnitude.  Also extracts the central charge from the vacuum
    expectation of [L_2, L_-2].
    """
    if max_level + 2 * max_mode_index > params.cutoff:
        raise CutoffExceeded("max_level + 2*max_mode_index must be <= cutoff")
    real = Realization(params, variant)
    c_val = params.central_charge
    b2 = params.b ** 2
    keys = basis_keys(max_level)
    worst = {"residual": 0.0, "pair": None, "kind": None}

    def track(res: float, kind: str, m: int, n: int):
        if res > worst["residual"]:
            worst.update(residual=res, pair=(m, n), kind=kind)

    rng = range(-max_mode_index, max_mode_index + 1)
    for key in keys:
        v = {key: 1.0 + 0j}
        for m in rng:
            Lm_v = real._state_apply(("L", m), v)
            Wm_v = real._state_apply(("W", m), v)
            for n in rng:
                Ln_v = real._state_apply(("L", n), v)
                Wn_v = real._state_apply(("W", n), v)
                # [L_m, L_n]
                r: State = {}
                _acc(r, real._state_apply(("L", m), Ln_v), 1.0)
                _acc(r, real._state_apply(("L", n), Lm_v), -1.0)
                _acc(r, real._state_apply(("L", m + n), v), -(m - n))
                if m + n == 0:
                    _acc(r, v, -c_val / 12.0 * m * (m * m - 1))
                track(_residual_max(r), "LL", m, n)
                # [L_m, W_n]
                r = {}
                _acc(r, real._state_apply(("L", m), Wn_v), 1.0)
                _acc(r, real._state_apply(("W", n), Lm_v), -1.0)
                _acc(r, real._state_apply(("W", m + n), v), -(2 * m - n))
                track(_residual_max(r), "LW", m, n)
                # [W_m, W_n]
                if m < n:
                    continue  # antisymmetric; checking m >= n suffices
                r = {}
                _acc(r, real._state_apply(("W", m), Wn_v), 1.0)
                _acc(r, real._state_apply(("W", n), Wm_v), -1.0)
                if m + n == 0:
                    _acc(r, v, -c_val / 360.0 * m * (m * m - 1) * (m * m - 4))
                if m != n:
                    _acc(r, real.lambda_state(m + n, v), -b2 * (m - n))
                    lcoef = (m - n) * (2 * m * m - m * n + 2 * n * n - 8) / 30.0
                    _acc(r, real._state_apply(("L", m + n), v), -lcoef)
                track(_residual_max(r), "WW", m, n)

    # central charge extraction from <O, [L2, L-2] O> = 4h + c/2
    om = vacuum_state()
    comm = {}
    _acc(comm, real._state_apply(("L", 2), real._state_apply(("L", -2), om)), 1.0)
    _acc(comm, real._state_apply(("L", -2), real._state_apply(("L", 2), om)), -1.0)
    h_val = state_inner(om, real._state_apply(("L", 0), om))
    c_extracted = 2.0 * (state_inner(om, comm) - 4.0 * h_val)

    return {
        "check": "w3_relations",
        "variant": variant,
        "params": {"kappa": params.kappa, "q1": params.q1, "q2": params.q2},
        "maxModeIndex": max_mode_index,
        "maxLevel": max_level,
        "maxResidual": worst["residual"],
        "worstCase": {"pair": worst["pair"], "kind": worst["kind"]},
        "centralCharge": {"extracted": complex(c_extracted).real,
                          "expected": c_val,
                          "error": abs(complex(c_extracted) - c_val)},
    }


def check_automorphism_identity(kappa: float, eta: complex,
                                max_mode_index: int, max_level: int,
                                cutoff: int = 12) -> dict:
    """Mode-by-mode check that twisting T_kappa by the shift automorphism
    lands on the plainly shifted stress tensor T_0 + kappa J' + eta J +
    (kappa^2+eta^2)/2."""
    params = RealizationParams(kappa=kappa, cutoff=cutoff)

    def shift(n: int) -> complex:
        s = kappa * rho_coefficient(n)
        if n == 0:
            s += eta
        return s

    lhs_real = Realization(params, "raw", shift1=shift)
    rhs_real = Realization(params, "raw")
    keys = basis_keys(max_level)
    worst = 0.0
    worst_case = None
    for n in range(-max_mode_index, max_mode_index + 1):
        for key in keys:
            v = {key: 1.0 + 0j}
            lhs = lhs_real._state_apply(("T1k", n), v)
            r = dict(lhs)
            d = rhs_real._state_apply(("j2", 1, n), v)
            _acc(r, d, -0.5)
            _acc(r, rhs_real._fam_apply("jp", 1, n, v), -kappa)
            if eta:
                _acc(r, rhs_real._a_state(1, n, v), -eta)
            if n == 0:
                _acc(r, v, -(kappa ** 2 + eta ** 2) / 2.0)
            res = _residual_max(r)
            if res > worst:
                worst, worst_case = res, {"mode": n, "key": repr(key)}
    return {
        "check": "automorphism_identity",
        "params": {"kappa": kappa, "eta": repr(eta)},
        "maxResidual": worst,
        "worstCase": worst_case,
    }


def solve_w_triple(n1: int, n2: int, n3: int) -> Tuple[float, float]:
    """Coefficients (u, d) making W_{n1} + u W_{n2} + d W_{n3} weakly
    adjointable: the trigonometric polynomial and its derivative vanish at
    z = -1."""
    if len({n1, n2, n3}) != 3:
        raise ValueError("indices must be distinct")
    a11, a12 = (-1.0) ** n2, (-1.0) ** n3
    a21, a22 = (-1.0) ** n2 * n2, (-1.0) ** n3 * n3
    b1, b2 = -((-1.0) ** n1), -((-1.0) ** n1 * n1)
    det = a11 * a22 - a12 * a21
    u = (b1 * a22 - b2 * a12) / det
    d = (a11 * b2 - a21 * b1) / det
    return u, d


def check_weak_symmetry(params: RealizationParams, max_mode_index: int = 3,
                        test_level: int = 2) -> dict:
    """Adjointness of the constrained mode combinations (vacuumModified).

    Pairs (L_n - (-1)^{n-m} L_m) and the W-triples pass within float noise;
    an unpaired L_n at kappa != 0 is the negative control and must exhibit a
    visible defect.
    """
    real = Realization(params, "vacuumModified")
    keys = basis_keys(test_level)
    vecs = [{k: 1.0 / math.sqrt(key_norm_sq(k))} for k in keys]

    def defect(apply_A, apply_B) -> float:
        a_img = [apply_A(v) for v in vecs]
        b_img = [apply_B(v) for v in vecs]
        worst = 0.0
        for i, u in enumerate(vecs):
            for j in range(len(vecs)):
                lhs = state_inner(b_img[i], vecs[j])
                rhs = state_inner(u, a_img[j])
                worst = max(worst, abs(lhs - rhs))
        return worst

    def l_comb(ns_coefs):
        def go(v):
            out: State = {}
            for n, cf in ns_coefs:
                _acc(out, real._state_apply(("L", n), v), cf)
            return state_prune(out)
        return go

    def w_comb(ns_coefs):
        def go(v):
            out: State = {}
            for n, cf in ns_coefs:
                _acc(out, real._state_apply(("W", n), v), cf)
            return state_prune(out)
        return go

    worst_pair = 0.0
    pair_cases = []
    for n1 in range(-max_mode_index, max_mode_index + 1):
        for n2 in range(-max_mode_index, max_mode_index + 1):
            if n1 == n2:
                continue
            sgn = (-1.0) ** (n1 - n2)
            A = l_comb([(n1, 1.0), (n2, -sgn)])
            B = l_comb([(-n1, 1.0), (-n2, -sgn)])
            d = defect(A, B)
            pair_cases.append(((n1, n2), d))
            worst_pair = max(worst_pair, d)

    worst_triple = 0.0
    triples = [(1, 0, -1), (2, 1, 0), (2, 1, -1), (3, 2, 1), (2, 0, -2),
               (3, 1, -1), (3, 0, -3), (1, -1, -2)]
    for (n1, n2, n3) in triples:
        if max(abs(n1), abs(n2), abs(n3)) > max_mode_index:
            continue
        u, d_ = solve_w_triple(n1, n2, n3)
        A = w_comb([(n1, 1.0), (n2, u), (n3, d_)])
        B = w_comb([(-n1, 1.0), (-n2, u), (-n3, d_)])
        worst_triple = max(worst_triple, defect(A, B))

    # negative control: a bare L_n is not weakly adjointable once kappa != 0
    control = 0.0
    for n in range(1, max_mode_index + 1):
        A = l_comb([(n, 1.0)])
        B = l_comb([(-n, 1.0)])
        control = max(control, defect(A, B))

    return {
        "check": "weak_symmetry",
        "params": {"kappa": params.kappa, "q1": params.q1, "q2": params.q2},
        "maxPairDefect": worst_pair,
        "maxTripleDefect": worst_triple,
        "unpairedControlDefect": control,
    }


def zero_vector_norms(params: RealizationParams) -> Dict[str, float]:
    """Norms of L_{-1} O, W_{-1} O, W_{-2} O in the vacuumModified realization.

    All three vanish when q1 = q2 = 0.
    """
    real = Realization(params, "vacuumModified")
    om = vacuum_state()
    return {
        "L-1": state_norm(real._state_apply(("L", -1), om)),
        "W-1": state_norm(real._state_apply(("W", -1), om)),
        "W-2": state_norm(real._state_apply(("W", -2), om)),
    }


# ---------------------------------------------------------------------------
# cyclic Gram matrices
# ---------------------------------------------------------------------------

@dataclass
class CyclicGram:
    variant: str
    level: int
    words: List[ModeWord]
    gram: np.ndarray
    eigenvalues: np.ndarray

    def to_csv(self) -> str:
        def cell(x: complex) -> str:
            return repr(x.real) if abs(x.imag) < 1e-12 else repr(x)
        lines = ["," + ",".join(w.label() for w in self.words)]
        for w, row in zip(self.words, self.gram):
            lines.append(w.label() + "," + ",".join(cell(x) for x in row))
        return "\n".join(lines) + "\n"


def word_state(real: Realization, word: ModeWord) -> State:
    """The realized vector for an ordered mode word (rightmost mode first)."""
    v = vacuum_state()
    for n in reversed(word.wpart):
        v = real._state_apply(("W", -n), v)
    for m in reversed(word.lpart):
        v = real._state_apply(("L", -m), v)
    return v


def cyclic_gram(variant: str, params: RealizationParams, level: int,
                margin: int = 2) -> CyclicGram:
    """Gram matrix of the cyclic subspace words of level <= level.

    Eigenvalues are those of the Hermitian part.
    """
    if level > params.cutoff - margin:
        raise CutoffExceeded(
            f"cyclic level {level} needs cutoff >= {level + margin}")
    real = Realization(params, variant)
    words = [w for lev in range(level + 1) for w in enumerate_basis(lev)]
    vecs = [word_state(real, w) for w in words]
    d = len(words)
    gram = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            gram[i, j] = state_inner(vecs[i], vecs[j])
    herm = 0.5 * (gram + gram.conj().T)
    eigs = np.linalg.eigvalsh(herm)
    return CyclicGram(variant, level, words, gram, eigs)
