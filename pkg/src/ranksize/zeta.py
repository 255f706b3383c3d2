"""Riemann zeta for real s > 1 and the discrete Pareto (zeta) distribution.

zeta(s) is a direct partial sum over k < M plus the Euler-Maclaurin tail

    M^(1-s)/(s-1) + M^(-s)/2 + sum_j B_2j/(2j)! * s(s+1)...(s+2j-2) * M^(-s-2j+1)

with M and the number of correction terms chosen so the first omitted
correction is below ``tol``.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ModelDomainError

# B_2, B_4, ..., B_24
_BERNOULLI_EVEN = [float(Fraction(p, q)) for p, q in [
    (1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730), (7, 6),
    (-3617, 510), (43867, 798), (-174611, 330), (854513, 138), (-236364091, 2730),
]]
_EM_COEFFS = [b / math.factorial(2 * (j + 1)) for j, b in enumerate(_BERNOULLI_EVEN)]

_M_START = 8
_M_MAX = 1 << 20


def _check_s(s: float) -> float:
    s = float(s)
    if not s > 1:
        raise ModelDomainError(f"zeta requires s > 1, got {s}")
    return s


def _correction_terms(s: float, m: int):
    """Yield (T_j, d T_j/ds) for j = 1, 2, ... at cut-off ``m``."""
    log_m = math.log(m)
    rising = 1.0   # s(s+1)...(s+2j-2)
    dlog_rising = 0.0
    for j, coeff in enumerate(_EM_COEFFS, start=1):
        for i in ((0,) if j == 1 else (2 * j - 3, 2 * j - 2)):
            rising *= s + i
            dlog_rising += 1.0 / (s + i)
        t = coeff * rising * m ** (-s - 2 * j + 1)
        yield t, t * (dlog_rising - log_m)


def _euler_maclaurin(s: float, tol: float, want_derivative: bool):
    m = _M_START
    while True:
        terms = []
        ok = False
        prev = math.inf
        for t, dt in _correction_terms(s, m):
            size = max(abs(t), abs(dt)) if want_derivative else abs(t)
            if size < tol:
                ok = True
                break
            if terms and size > prev:
                break  # asymptotic series started diverging
            terms.append((t, dt))
            prev = size
        if ok or m >= _M_MAX:
            break
        m *= 2

    # sum the small terms first
    head = 0.0
    dhead = 0.0
    for k in range(m - 1, 0, -1):
        p = k ** -s
        head += p
        if want_derivative:
            dhead -= math.log(k) * p
    log_m = math.log(m)
    tail = m ** (1 - s) / (s - 1) + 0.5 * m ** -s
    dtail = (-log_m * m ** (1 - s) / (s - 1) - m ** (1 - s) / (s - 1) ** 2
             - 0.5 * log_m * m ** -s)
    corr = sum(t for t, _ in reversed(terms))
    dcorr = sum(dt for _, dt in reversed(terms))
    return head + tail + corr, dhead + dtail + dcorr


def zeta(s: float, tol: float = 1e-13) -> float:
    """Riemann zeta(s) for real s > 1 to absolute accuracy ``tol``.

    The attainable accuracy is limited by double precision, about 1e-16
    times the result (which grows like 1/(s-1) as s approaches 1).
    """
    s = _check_s(s)
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _euler_maclaurin(s, tol, want_derivative=False)[0]


def zeta_with_derivative(s: float, tol: float = 1e-13) -> tuple[float, float]:
    """Return (zeta(s), d zeta/ds) for real s > 1."""
    s = _check_s(s)
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _euler_maclaurin(s, tol, want_derivative=True)


def zeta_pareto_pmf(k: int, gamma: float) -> float:
    """P(K = k) = k^-gamma / zeta(gamma) for the discrete Pareto law."""
    if int(k) != k or k < 1:
        raise ModelDomainError(f"k must be a positive integer, got {k}")
    return float(k) ** -_check_s(gamma) / zeta(gamma)


def zipf_amplitude_estimate(k_max: float, gamma: float) -> float:
    """Amplitude of a discrete power law from its largest value: k_max / zeta(gamma)."""
    return float(k_max) / zeta(_check_s(gamma))
