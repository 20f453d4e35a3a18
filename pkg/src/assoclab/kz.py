"""Numerical construction of the KZ associator and multiple zeta values.

The associator comes from the ODE  f' = (1/2pi i)(X/z + Y/(z-1)) f  (the
three-point reduction with the generators substituted) by Frobenius
expansion at both singular points and matching at z = 1/2.  The local
exponents are X/(2pi i) at 0 and Y/(2pi i) at 1; the tame-part recurrences
are then mirror images of each other under X <-> Y, z <-> 1-z, which is
what the duality equation requires.  Multiple zeta values enter only as
independent numeric spot checks, summed directly with Euler-Maclaurin tail
corrections.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
import numpy as np

from .associator import Associator
from .ncalg import NCSeries

TWO_PI_I = 2j * math.pi
ALPHA = 1.0 / TWO_PI_I

EULER_GAMMA = 0.5772156649015328606065120900824024


class KZError(ValueError):
    pass


class MzvError(ValueError):
    pass


# -- multiple zeta values -------------------------------------------------------

def _tail_power(s: float, n: int) -> tuple[float, float]:
    """(sum_{m >= n} m^-s, rigorous-ish error bound), Euler-Maclaurin."""
    f = n ** (-s)
    val = n ** (1 - s) / (s - 1) + 0.5 * f + (s / 12.0) * n ** (-s - 1)
    err = 2.0 * (s * (s + 1) * (s + 2) / 720.0) * n ** (-s - 3)
    return val, err


def _tail_power_log(s: float, n: int) -> tuple[float, float]:
    """(sum_{m >= n} m^-s ln m, error bound)."""
    ln = math.log(n)
    integral = n ** (1 - s) * (ln / (s - 1) + 1.0 / (s - 1) ** 2)
    f = n ** (-s) * ln
    fprime = n ** (-s - 1) * (1.0 - s * ln)
    val = integral + 0.5 * f - fprime / 12.0
    err = 2.0 * ((s + 2) ** 3 / 720.0) * n ** (-s - 3) * (1.0 + ln)
    return val, err


def mzv(index: tuple[int, ...], tol: float = 1e-12) -> float:
    """zeta(s1, ..., sk) = sum over n1 > ... > nk >= 1 of prod nj^-sj.

    Truncated nested summation; the outer tail is corrected by
    Euler-Maclaurin using the exact asymptotics of the inner partial sums
    (available at depth <= 2).  Raises MzvError when the rigorous bound
    cannot meet ``tol``.
    """
    index = tuple(int(s) for s in index)
    if not index or index[0] < 2 or any(s < 1 for s in index):
        raise MzvError(f"non-admissible index {index}")
    depth = len(index)
    if depth == 1:
        s = index[0]
        for n0 in (200, 2_000, 20_000, 200_000):
            tail, err = _tail_power(float(s), n0)
            if err + 1e-15 <= tol:
                direct = math.fsum((m ** (-float(s)) for m in range(1, n0)))
                return direct + tail
        raise MzvError(f"cannot reach tolerance {tol} for {index}")
    if depth == 2:
        return _mzv_depth2(index[0], index[1], tol)
    return _mzv_deep(index, tol)


def _mzv_depth2(s1: int, s2: int, tol: float) -> float:
    n0 = 200_000
    m = np.arange(1, n0 + 1, dtype=np.float64)
    inner = np.cumsum(m ** (-float(s2)))  # inner[n-1] = sum_{j <= n} j^-s2
    outer_terms = m[1:] ** (-float(s1)) * inner[:-1]  # n from 2 to n0
    direct = math.fsum(outer_terms)
    # tail over n > n0 with A(n) = sum_{j < n} j^-s2
    if s2 == 1:
        # A(n) = ln n + gamma - 1/(2n) - 1/(12 n^2) + O(n^-4)
        t_log, e1 = _tail_power_log(float(s1), n0 + 1)
        t_0, e2 = _tail_power(float(s1), n0 + 1)
        t_1, e3 = _tail_power(float(s1) + 1, n0 + 1)
        t_2, e4 = _tail_power(float(s1) + 2, n0 + 1)
        tail = t_log + EULER_GAMMA * t_0 - 0.5 * t_1 - t_2 / 12.0
        err = e1 + EULER_GAMMA * e2 + 0.5 * e3 + e4 / 12.0 + _tail_power(float(s1) + 4, n0 + 1)[0] / 120.0
    else:
        z2 = mzv((s2,), tol / 10)
        # A(n) = z2 - sum_{j >= n} j^-s2; expand the inner tail at j >= n
        t_0, e2 = _tail_power(float(s1), n0 + 1)
        t_a, ea = _tail_power(float(s1 + s2) - 1.0, n0 + 1)
        t_b, eb = _tail_power(float(s1 + s2), n0 + 1)
        t_c, ec = _tail_power(float(s1 + s2) + 1.0, n0 + 1)
        tail = z2 * t_0 - t_a / (s2 - 1.0) - 0.5 * t_b - (s2 / 12.0) * t_c
        err = z2 * e2 + ea / (s2 - 1.0) + 0.5 * eb + (s2 / 12.0) * ec \
            + 2.0 * (s2 * (s2 + 1) * (s2 + 2) / 720.0) * _tail_power(float(s1 + s2) + 3.0, n0 + 1)[0]
    # fsum is exactly rounded; cumsum rounding enters weighted by the outer
    # decay, bounded by eps * sum_n n^{1-s1} A(n) <= eps * (1 + ln n0)^2
    err += 2.3e-16 * (4.0 * abs(direct) + (1.0 + math.log(n0)) ** 2)
    if err > tol:
        raise MzvError(f"cannot reach tolerance {tol} for ({s1},{s2})")
    return direct + tail


def _mzv_deep(index: tuple[int, ...], tol: float) -> float:
    n0 = 200_000
    m = np.arange(1, n0 + 1, dtype=np.float64)
    partial = np.ones(n0)
    for s in reversed(index[1:]):
        terms = m ** (-float(s)) * partial
        partial = np.concatenate(([0.0], np.cumsum(terms)[:-1]))  # strict <
    outer = m ** (-float(index[0])) * partial
    value = math.fsum(outer)
    k = len(index)
    bound = (1.0 + math.log(n0)) ** (k - 1) * (n0 ** (1 - index[0])) / (index[0] - 1)
    if bound > tol:
        raise MzvError(
            f"depth-{k} index {index}: rigorous tail bound {bound:.2e} exceeds tol {tol}")
    return value


# -- Frobenius series for the KZ equation ---------------------------------------

@dataclass
class FuchsSeries:
    """Series-coefficient solution of the regularized KZ equation at 0 or 1."""

    point: int            # 0 or 1
    m_order: int          # number of computed powers
    order: int            # word truncation
    coeffs: list[NCSeries] = field(default_factory=list)

    def evaluate(self, z: complex) -> NCSeries:
        """Value of the tame factor at z (series in z or in 1-z)."""
        x = z if self.point == 0 else 1.0 - z
        acc = NCSeries.zero(2, self.order)
        p = 1.0
        for c in self.coeffs:
            acc = acc + c.scale(p)
            p *= x
        return acc

    def derivative_at(self, z: complex) -> NCSeries:
        """d/dz of the tame factor: sum_m m c_m x^{m-1} dx/dz."""
        x = z if self.point == 0 else 1.0 - z
        sign = 1.0 if self.point == 0 else -1.0
        acc = NCSeries.zero(2, self.order)
        for mth, c in enumerate(self.coeffs):
            if mth >= 1:
                acc = acc + c.scale(sign * mth * x ** (mth - 1))
        return acc


def _ad_series(gen: int, order: int) -> NCSeries:
    return NCSeries.generator(2, order, gen, 1.0 + 0.0j)


def kz_regularized_solution(point: int, m_order: int, order: int) -> FuchsSeries:
    """Tame factor of the solution normalized to 1 at the chosen singular point.

    At 0:  (m - alpha ad_X) c_m = -alpha Y (c_0 + ... + c_{m-1})
    At 1:  (m - alpha ad_Y) d_m = -alpha X (d_0 + ... + d_{m-1})
    Both operators are invertible for m >= 1 because ad raises word length.
    """
    if point not in (0, 1):
        raise KZError("expansion point must be 0 or 1")
    if m_order < 1 or order < 1:
        raise KZError("need m_order >= 1 and order >= 1")
    X = _ad_series(1, order)
    Y = _ad_series(2, order)
    lead, other = (X, Y) if point == 0 else (Y, X)

    coeffs = [NCSeries.unit(2, order, 1.0 + 0.0j)]
    running = coeffs[0]
    for mth in range(1, m_order + 1):
        rhs = (other * running).scale(-ALPHA)
        # invert (m - alpha ad_lead): geometric series in the nilpotent part
        c = rhs.scale(1.0 / mth)
        term = c
        for _ in range(order):
            term = lead.bracket(term).scale(ALPHA / mth)
            if term.is_zero():
                break
            c = c + term
        if c.max_abs() == 0.0:
            coeffs.append(NCSeries.zero(2, order))
        else:
            coeffs.append(c)
        running = running + c
    return FuchsSeries(point, m_order, order, coeffs)


def ode_residual(fuchs: FuchsSeries, z: complex) -> float:
    """Self-consistency of the assembled solution against the equation at z."""
    order = fuchs.order
    X = _ad_series(1, order)
    Y = _ad_series(2, order)
    tame = fuchs.evaluate(z)
    dtame = fuchs.derivative_at(z)
    if fuchs.point == 0:
        exponent = X.scale(ALPHA * cmath.log(z))
        dexp_factor = X.scale(ALPHA / z)
    else:
        exponent = Y.scale(ALPHA * cmath.log(1.0 - z))
        dexp_factor = Y.scale(-ALPHA / (1.0 - z))
    w = exponent.exp()
    f = tame * w
    df = dtame * w + tame * dexp_factor * w
    rhs = (X.scale(ALPHA / z) + Y.scale(ALPHA / (z - 1.0))) * f
    return df.distance(rhs)


def _assemble_phi(f0: FuchsSeries, f1: FuchsSeries, z: complex) -> NCSeries:
    """f1(z)^{-1} f0(z) with f0 = tame0 * z^{aX}, f1 = tame1 * (1-z)^{aY}."""
    order = f0.order
    X = _ad_series(1, order)
    Y = _ad_series(2, order)
    left = Y.scale(-ALPHA * cmath.log(1.0 - z)).exp() * f1.evaluate(z).inverse()
    right = f0.evaluate(z) * X.scale(ALPHA * cmath.log(z)).exp()
    return left * right


def build_phi_kz(order: int = 5, m_order: int = 64, tol: float = 1e-10):
    """KZ associator plus a report of the construction residuals."""
    if 2.0 ** (-m_order) > tol:
        raise KZError("series order too small for the requested tolerance")
    f0 = kz_regularized_solution(0, m_order, order)
    f1 = kz_regularized_solution(1, m_order, order)
    phi_half = _assemble_phi(f0, f1, 0.5 + 0.0j)
    phi_alt = _assemble_phi(f0, f1, 0.4 + 0.0j)
    constancy = phi_half.distance(phi_alt)
    if constancy > tol:
        raise KZError(f"constancy check failed: {constancy:.3e} > {tol:.1e}")
    # clean the tiny imaginary dust on the constant term
    terms = dict(phi_half.terms)
    terms[()] = 1
    phi = Associator(phi_half.copy_with(terms), origin="kz")
    report = {
        "constancy": constancy,
        "ode-residual-at-0.3": ode_residual(f0, 0.3 + 0.0j),
        "grouplike": phi.grouplike_residual(),
        "lie-log": phi.lie_log_residual(),
        "duality": phi.duality_residual(),
    }
    return phi, report


def phi_kz(order: int = 5, m_order: int = 64, tol: float = 1e-10) -> Associator:
    phi, _ = build_phi_kz(order, m_order, tol)
    return phi


def anti_kz(phi: Associator) -> Associator:
    """The sign-flip associator Phi(-X, -Y); involutive."""
    out = phi.flip_signs()
    out.origin = f"anti({phi.origin})"
    return out
