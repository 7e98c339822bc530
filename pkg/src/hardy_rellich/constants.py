"""Exact arithmetic for the closed-form constants of the inequality family.

Everything here is computed with arbitrary-precision integer rationals
(`fractions.Fraction`); conversion to floating point is left to callers.
The central objects are

* the sharp constant  c_n = [(2n-1)!!]^2 / 2^(2n)  of the n-th
  Hardy--Rellich-type inequality (n = 1 is Hardy, n = 2 is Rellich),
* its reciprocal square root  b_n = 2^n / (2n-1)!!, which is the operator
  norm of the n-th generalized Cesaro average,
* the weighted (Glazman) constant  [prod_{j=1..n} (2n+1-2j-alpha)]^2 / 2^(2n),
* the coefficients a_j(n,k) in the Leibniz expansion of (x^n f)^(k),
* the tail coefficients b_k of the optimality probe family, and
* the polynomial p_n(z) = prod_{k=0..n-1} (z+k) together with the rational
  function r_n(z) = z^n / prod_{k=1..n-1} (1+kz) that maps the spectrum of
  the Cesaro average T_1 onto the spectrum of T_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence, Union

from .errors import PoleError

Scalar = Union[int, float, complex, Fraction]

__all__ = [
    "SharpConstant",
    "LeibnizTable",
    "SpectralPolynomials",
    "double_factorial_odd",
    "birman_constant",
    "cesaro_norm",
    "glazman_constant",
    "leibniz_coeffs",
    "probe_tail_coeffs",
    "spectral_polynomials",
    "eval_p_n",
    "eval_r_n",
]


def double_factorial_odd(n: int) -> int:
    """(2n-1)!! = (2n-1)(2n-3)...3*1, with the empty product equal to 1."""
    out = 1
    for k in range(1, 2 * n, 2):
        out *= k
    return out


@dataclass(frozen=True)
class SharpConstant:
    """Sharp constant c_n and reciprocal-root norm b_n for index n.

    Invariant: c * b**2 == 1 exactly.
    """

    n: int
    c: Fraction
    b: Fraction


@dataclass(frozen=True)
class LeibnizTable:
    """Integer coefficients a_j(n,k) of (x^n f)^(k) = sum_j a_j x^(n-k+j) f^(j)."""

    n: int
    k: int
    a: tuple  # a[j] multiplies x^(n-k+j) f^(j), 0 <= j <= k


@dataclass(frozen=True)
class SpectralPolynomials:
    """Dense coefficient data for p_n and r_n (ascending powers, exact ints).

    ``p`` holds the coefficients of p_n(z) = prod_{k=0..n-1}(z+k); ``r_den``
    holds those of the denominator prod_{k=1..n-1}(1+kz) of r_n, whose
    numerator is z^n.
    """

    n: int
    p: tuple
    r_den: tuple


def _check_index(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"index n must be a positive integer, got {n!r}")


def birman_constant(n: int) -> SharpConstant:
    """Exact sharp constant of the n-th inequality and its reciprocal root.

    c_n = [(2n-1)!!]^2 / 2^(2n) and b_n = 2^n / (2n-1)!!.  Arbitrary-precision
    integers keep this overflow-free for any n (the numerator exceeds 64-bit
    range already near n = 17).
    """
    _check_index(n)
    dfac = double_factorial_odd(n)
    c = Fraction(dfac * dfac, 4**n)
    b = Fraction(2**n, dfac)
    return SharpConstant(n=n, c=c, b=b)


def cesaro_norm(n: int) -> Fraction:
    """Operator norm 2^n / (2n-1)!! of the n-th generalized Cesaro average."""
    _check_index(n)
    return Fraction(2**n, double_factorial_odd(n))


def glazman_constant(n: int, alpha) -> Fraction:
    """Sharp constant of the power-weighted inequality with weight x^alpha.

    Returns [prod_{j=1..n} (2n+1-2j-alpha)]^2 / 2^(2n) as an exact rational
    (float alpha is converted exactly in binary).  Reduces to the unweighted
    sharp constant at alpha = 0.  A zero value (alpha hitting 2n+1-2j) is a
    valid degenerate constant, not an error.
    """
    _check_index(n)
    a = Fraction(alpha)
    prod = Fraction(1)
    for j in range(1, n + 1):
        prod *= 2 * n + 1 - 2 * j - a
    return prod * prod / 4**n


def leibniz_coeffs(n: int, k: int) -> LeibnizTable:
    """Coefficients of the k-th derivative of x^n f by the product rule.

    a_j(n,k) = binom(k,j) * prod_{l=0..k-j-1} (n-l); the top coefficient
    a_k is always 1 (empty product) and a_0(n,n) = n!.
    """
    if not isinstance(n, int) or not isinstance(k, int) or k < 0 or n < 0:
        raise ValueError("n and k must be nonnegative integers")
    if k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k} > n={n}")
    coeffs = []
    for j in range(k + 1):
        prod = 1
        for ell in range(k - j):
            prod *= n - ell
        coeffs.append(math.comb(k, j) * prod)
    return LeibnizTable(n=n, k=k, a=tuple(coeffs))


def probe_tail_coeffs(n: int, sigma: float, a: float) -> list:
    """Polynomial tail coefficients of the n-fold antiderivative of the probe.

    The probe x^sigma truncated at x = a has an n-fold antiderivative that is
    a polynomial sum_{k<n} b_k x^k beyond the cutoff, with

        b_k = (-1)^(n-k+1) a^(n-k+sigma) / (k! (n-k-1)! (n-k+sigma)).

    Values are returned as floats (sigma is generically irrational); exact
    checks should use rational sigma and recompute independently.
    """
    _check_index(n)
    if not sigma > -0.5:
        raise ValueError(f"probe requires sigma > -1/2 for square-integrability, got {sigma}")
    if not a > 0:
        raise ValueError(f"cutoff a must be positive, got {a}")
    out = []
    for k in range(n):
        sign = -1.0 if (n - k + 1) % 2 else 1.0
        out.append(
            sign
            * float(a) ** (n - k + sigma)
            / (math.factorial(k) * math.factorial(n - k - 1) * (n - k + sigma))
        )
    return out


def spectral_polynomials(n: int) -> SpectralPolynomials:
    """Exact coefficient lists for p_n and the denominator of r_n."""
    _check_index(n)
    p = [1]
    for k in range(n):
        # multiply by (z + k)
        nxt = [0] * (len(p) + 1)
        for i, c in enumerate(p):
            nxt[i] += k * c
            nxt[i + 1] += c
        p = nxt
    den = [1]
    for k in range(1, n):
        # multiply by (1 + k z)
        nxt = [0] * (len(den) + 1)
        for i, c in enumerate(den):
            nxt[i] += c
            nxt[i + 1] += k * c
        den = nxt
    return SpectralPolynomials(n=n, p=tuple(p), r_den=tuple(den))


def eval_p_n(n: int, z: Scalar) -> Scalar:
    """Evaluate p_n(z) = prod_{k=0..n-1} (z+k) in the arithmetic of z."""
    _check_index(n)
    out = z - z + 1  # one, in z's type
    for k in range(n):
        out = out * (z + k)
    return out


def eval_r_n(n: int, z: Scalar) -> Scalar:
    """Evaluate r_n(z) = z^n / prod_{k=1..n-1} (1+kz) in the arithmetic of z.

    Raises PoleError at (or within ~1e-12 of) the poles z = -1/k.
    Satisfies r_n(z) * p_n(1/z) = 1 away from 0 and the poles, and
    r_n(2) = 2^n/(2n-1)!! -- the spectral-radius anchor.
    """
    _check_index(n)
    num = z - z + 1
    for _ in range(n):
        num = num * z
    den = z - z + 1
    for k in range(1, n):
        factor = 1 + k * z
        if isinstance(factor, (int, Fraction)):
            if factor == 0:
                raise PoleError(f"r_{n} has a pole at z = -1/{k}")
        elif abs(complex(factor)) < 1e-12 * k:
            raise PoleError(f"r_{n} evaluated too close to its pole at z = -1/{k}")
        den = den * factor
    return num / den
