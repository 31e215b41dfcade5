"""Admissible constants for the maximal moment inequalities.

Every constant here is obtained by following a proof chain with explicit
numbers; none is fitted to data. The building block is the closure rule: if
``x >= 0`` satisfies ``x <= a + b x^(1-1/p) + c x^(1-2/p)`` then one of the three
terms is at least ``x/3``, whence ``x <= 3a + (3b)^p + (3c)^(p/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadExponent


def _closure3(p: float, a: float, b: float, c: float) -> float:
    return 3.0 * a + (3.0 * b) ** p + (3.0 * c) ** (p / 2.0)


def closure_constant(p: float, a: float, b: float = 0.0, c: float = 0.0) -> float:
    """Bound ``3a + (3b)^p + (3c)^(p/2)`` on every ``x >= 0`` with
    ``x <= a + b x^(1-1/p) + c x^(1-2/p)``."""
    if not p > 2:
        raise BadExponent(f"closure_constant needs p > 2, got {p}")
    if min(a, b, c) < 0:
        raise ValueError("closure coefficients must be nonnegative")
    return _closure3(p, a, b, c)


def closure_two_term(p: float, a: float, c: float) -> float:
    """Bound ``2a + (2c)^(p/2)`` for ``x <= a + c x^(1-2/p)``, ``p >= 2``."""
    if not p >= 2:
        raise BadExponent(f"two-term closure needs p >= 2, got {p}")
    return 2.0 * a + (2.0 * c) ** (p / 2.0)


def closure_residual(p: float, a: float, b: float, c: float, x) -> np.ndarray:
    """``a + b x^(1-1/p) + c x^(1-2/p) - x``; nonnegative exactly where x satisfies
    the recursion inequality."""
    x = np.asarray(x, dtype=float)
    return a + b * x ** (1 - 1 / p) + c * x ** (1 - 2 / p) - x


def closure_violations(p: float, a: float, b: float, c: float, points: int = 2001) -> int:
    """Grid points of ``[0, 2B]`` that satisfy the recursion yet exceed ``B``."""
    bound = closure_constant(p, a, b, c)
    xs = np.linspace(0.0, 2.0 * bound, points)
    bad = (closure_residual(p, a, b, c, xs) >= 0) & (xs > bound * (1 + 1e-12))
    return int(bad.sum())


@dataclass(frozen=True)
class ConstantPolicy:
    """Closure inputs of one verification and the theorem-form constant they imply."""

    p: float
    a_coeff: float
    b_coeff: float
    c_coeff: float
    derived_constant: float
    provenance: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.derived_constant) and self.derived_constant >= 1):
            raise ValueError(f"derived constant must be finite and >= 1, got {self.derived_constant}")


def high_moment_factor(p: float) -> float:
    """``2^p p^2``: coefficient of the elementary inequality for ``p >= 2``."""
    return 2.0**p * p * p


def nd_constant(p: float) -> float:
    """C_p for ``E|max S_k|^p <= C_p n^(p/2-1) sum E|X_k|^p`` (negative dependence).

    From ``A <= 2a + (2c)^(p/2)`` with ``a = 2^p p^2 sum E|X_k|^p`` and
    ``c = 2^p p^2 sum (E|X_k|^p)^(2/p)`` plus the power-mean step
    ``(sum t_k^(2/p))^(p/2) <= n^(p/2-1) sum t_k``.
    """
    k = 2.0 * high_moment_factor(p)
    return k + k ** (p / 2.0)


def indep_constant(p: float) -> float:
    """C_p for ``E|max S_k|^p <= C_p {sum E|X_k|^p + (sum E X_k^2)^(p/2)}``."""
    k = 2.0 * high_moment_factor(p)
    return max(k, k ** (p / 2.0))


def mz_coefficients(p: float) -> tuple[float, float, float]:
    """Multipliers turning ``(sum E|X|^p, M, E2)`` into closure inputs ``(a, b, c^(p/2))``:
    ``a = 2^(p+1) p^2 E[sum |X_k|^p]``, ``b = 2^(p-1) p M``,
    ``c = 2^(2p-1) p^2 E2^(2/p)`` where ``E2 = E[(sum X_k^2)^(p/2)]``."""
    return 2.0 ** (p + 1) * p * p, 2.0 ** (p - 1) * p, 2.0 ** (2 * p - 1) * p * p


def mz_bound(p: float, sum_abs_p: float, mean_term: float, e2: float) -> float:
    """Proof-exact bound on ``E[max_k |S_k|^p]`` from the closure rule."""
    ka, kb, kc = mz_coefficients(p)
    return _closure3(p, ka * sum_abs_p, kb * mean_term, kc * e2 ** (2.0 / p))


def mz_constant(p: float) -> float:
    """C_p for ``E[max |S_k|^p] <= C_p {M^p + E[(sum X_k^2)^(p/2)]}``, using
    ``sum |x_k|^p <= (sum x_k^2)^(p/2)`` for the first closure term."""
    ka, kb, kc = mz_coefficients(p)
    return max(3.0 * ka + (3.0 * kc) ** (p / 2.0), (3.0 * kb) ** p)


@lru_cache(maxsize=None)
def sum_squares_coefficients(p: float) -> tuple[float, float]:
    """``(kappa, lam)`` with ``E[(sum X_k^2)^(p/2)] <= kappa S_p + lam S_2^(p/2)``,
    ``S_p = sum E|X_k|^p`` and ``S_2 = sum E X_k^2``, for negatively dependent X.

    2 <= p <= 4: with q = p/2, apply the low-moment bound (exponent q, constant
    2^(2-q)) to the centred squares of positive and negative parts; gives
    ``kappa = 2^(q+2)``, ``lam = 2^(2q-1)``.

    p > 4: apply the general bound at q = p/2 to the nonnegative squares, using
    ``(sum E X_k^4)^(p/4) <= S_p + S_2^(p/2)`` (Holder); gives
    ``kappa = 2^q (alpha_q + beta_q)``, ``lam = 2^q (beta_q + gamma_q)``.
    """
    if p < 2:
        raise BadExponent(f"p must be >= 2, got {p}")
    q = p / 2.0
    if p <= 4:
        return 2.0 ** (q + 2), 2.0 ** (2 * q - 1)
    alpha, beta, gamma = general_coefficients(q)
    return 2.0**q * (alpha + beta), 2.0**q * (beta + gamma)


@lru_cache(maxsize=None)
def general_coefficients(p: float) -> tuple[float, float, float]:
    """``(alpha, beta, gamma)`` with
    ``E[max |S_k|^p] <= alpha S_p + beta S_2^(p/2) + gamma M^p``,
    ``M = sum [(lower E X_k)^- + (upper E X_k)^+]``, when X_k is negatively
    dependent to (X_{k+1}, ..., X_n)."""
    if p < 2:
        raise BadExponent(f"p must be >= 2, got {p}")
    ka, kb, kc = mz_coefficients(p)
    kappa, lam = sum_squares_coefficients(p)
    c_mult = (3.0 * kc) ** (p / 2.0)
    return 3.0 * ka + c_mult * kappa, c_mult * lam, (3.0 * kb) ** p


def general_constant(p: float) -> float:
    return max(general_coefficients(p))


def reversal_factor(p: float) -> float:
    """``max |S_k| <= 2 max_m |S_n - S_m|``, so bounds for the reversed sequence
    transfer with a factor ``2^p``."""
    return 2.0**p
