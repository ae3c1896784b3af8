"""Special functions and log-space combinatorics used by the closed forms."""

import math

import numpy as np

#: Terms below exp(LOG_FLOOR) contribute nothing at double precision.
LOG_FLOOR = math.log(1e-300)

_CLAMP_EPS = 1e-12
_GAMMA_TOL = 1e-15
_GAMMA_MAX_ITER = 10_000
_TINY = 1e-300


def clamp_probability(value):
    """Clip floating-point residue just outside [0, 1].

    Values more than 1e-12 outside the unit interval indicate a real bug and
    raise instead of being silently clipped.
    """
    arr = np.asarray(value, dtype=float)
    if np.any(arr < -_CLAMP_EPS) or np.any(arr > 1 + _CLAMP_EPS) or np.any(np.isnan(arr)):
        raise ValueError(f"value outside [0, 1] beyond rounding residue: {value!r}")
    out = np.clip(arr, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def gaussian_q(x):
    """Upper tail probability of the standard normal, Q(x) = P(Z > x).

    Accepts scalars or arrays. Uses erfc so both tails keep full relative
    precision.
    """
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(float(x) / math.sqrt(2.0))
    from scipy.special import erfc

    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def _lower_series(a, x):
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    term = 1.0 / a
    total = term
    for k in range(1, _GAMMA_MAX_ITER):
        term *= x / (a + k)
        total += term
        if abs(term) < abs(total) * _GAMMA_TOL:
            break
    else:
        raise ArithmeticError(f"series for P({a}, {x}) did not converge")
    return math.exp(a * math.log(x) - x - math.lgamma(a)) * total


def _upper_continued_fraction(a, x):
    # Q(a, x) by the modified Lentz algorithm.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_TOL:
            break
    else:
        raise ArithmeticError(f"continued fraction for Q({a}, {x}) did not converge")
    return math.exp(a * math.log(x) - x - math.lgamma(a)) * h


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x) = gamma(a, x) / Gamma(a).

    Series expansion for ``x < a + 1``, continued fraction for the upper
    function otherwise. The series branch keeps relative accuracy for small
    ``x``, which the Rayleigh-averaged detection formula relies on.
    """
    if not a > 0:
        raise ValueError(f"shape must be positive, got a={a}")
    if not x >= 0:
        raise ValueError(f"argument must be nonnegative, got x={x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return clamp_probability(_lower_series(a, x))
    return clamp_probability(1.0 - _upper_continued_fraction(a, x))


def reg_upper_gamma(a: float, x: float) -> float:
    """Complement 1 - P(a, x), computed without cancellation in the far tail."""
    if not a > 0:
        raise ValueError(f"shape must be positive, got a={a}")
    if not x >= 0:
        raise ValueError(f"argument must be nonnegative, got x={x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return clamp_probability(1.0 - _lower_series(a, x))
    return clamp_probability(_upper_continued_fraction(a, x))


def log_multinomial(m: int, n: int, c: int) -> float:
    """ln(m! / (n! c! (m-n-c)!)).

    Exact integer arithmetic for m <= 1000, log-gamma above that.
    """
    if min(m, n, c) < 0 or n + c > m:
        raise ValueError(f"invalid multinomial counts m={m}, n={n}, c={c}")
    if m <= 1000:
        coeff = math.comb(m, n) * math.comb(m - n, c)
        return math.log(coeff)
    return math.lgamma(m + 1) - math.lgamma(n + 1) - math.lgamma(c + 1) - math.lgamma(m - n - c + 1)


def log_multinomial_table(m: int) -> np.ndarray:
    """Table ``T[c, n] = log_multinomial(m, n, c)``; entries with n + c > m are -inf."""
    table = np.full((m + 1, m + 1), -np.inf)
    for c in range(m + 1):
        for n in range(m - c + 1):
            table[c, n] = log_multinomial(m, n, c)
    return table
