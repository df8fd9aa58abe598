"""Closed-form scaling laws: volume coefficients and logarithmic terms.

Special functions
-----------------
Every logarithmic coefficient is built from four functions of the
transmission probability.  With R = 1 - p (or 1 - T):

    Q_n(p)  = -n/12 + int_0^1 dx/(2 pi^2 x) { ln[(1+px)^n + ((1-p)x)^n]
              + ln[((x+p)^n + (1-p)^n) / (p^n + (1-p)^n)] },

    Qt_n(T) = -n/12 + int_0^1 dx/(2 pi^2 x) { ln[(1+Tx)^n + (Rx)^n]
              + ln[(1+Rx)^n + (Tx)^n]
              + ln[((x+T)^n + R^n) / ((T+Rx)^n + (R+Tx)^n)]
              + ln[((x+R)^n + T^n) / ((T+Rx)^n + (R+Tx)^n)] },

    q(T)  = 1/24 - int_0^1 dx/(2 pi^2 x) [(1+Rx)ln(1+Rx) + (1+Tx)ln(1+Tx)]/(1+x)
            + int_0^1 dx/(2 pi^2 x) [T ln T + R ln R
              - ((R+x)ln(R+x) + (T+x)ln(T+x))/(1+x)],

    qt(T) = q(T) + 1/12 + int_0^1 dx/(pi^2 x)
            [((R+Tx)ln(R+Tx) + (T+Rx)ln(T+Rx))/(1+x) - T ln T - R ln R].

These are the smooth representations used in production; each function
also has an equivalent representation with integrable endpoint
singularities, kept here purely as a cross-check oracle for the tests
(``q_n_singular_form``, ``q_tilde_n_singular_form``).

Structure of a prediction
-------------------------
An :class:`AsymptoticPrediction` is a volume term (coefficient times a
stored length), a list of (coefficient, argument) logarithmic terms, and
an optional additive constant fitted downstream.  Logarithm arguments are
ratios of differences of the four interval edges {d_l, d_l + ell_l, d_r,
d_r + ell_r}; a difference that is exactly zero is omitted from its
ratio.  All formulas assume a finite bias; the zero-bias limit does not
commute with them and is refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BiasError, DomainError, ScopeError
from .model import BiasConfig, Geometry, ImpurityModel, mirror_overlap
from .quadrature import adaptive_gauss_legendre, tanh_sinh

Q_TOL = 1e-10


def _xlx(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    mask = y > 0
    out[mask] = y[mask] * np.log(y[mask])
    return out


def _unit_integral(f, n: float) -> float:
    """int_0^1 f(x) dx through the substitution x = u^2.

    The Q-integrands develop x^(n-1)-type endpoint behavior at x = 0
    whenever n is not an integer (harshest for n <= 1, but present as a
    derivative cusp for any fractional n); the substitution turns it into
    u^(2n-1), smooth for every index used here (n >= 1/2).
    """
    return adaptive_gauss_legendre(
        lambda u: 2.0 * u * f(u * u), 0.0, 1.0, tol=Q_TOL)


@lru_cache(maxsize=4096)
def q_n(p: float, n: float) -> float:
    """Q_n(p): single-jump logarithmic kernel.

    Satisfies Q_n(1) = 0 and Q_n(0) = (1/n - n)/12.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"argument p={p} outside [0, 1]")
    if n <= 0:
        raise DomainError(f"index n={n} must be positive")
    c = 1.0 - p
    norm = p ** n + c ** n

    def f(x):
        t1 = np.log((1.0 + p * x) ** n + (c * x) ** n)
        t2 = np.log(((x + p) ** n + c ** n) / norm)
        return (t1 + t2) / (2.0 * np.pi ** 2 * x)

    return -n / 12.0 + _unit_integral(f, n)


@lru_cache(maxsize=4096)
def q_tilde_n(t: float, n: float) -> float:
    """Qt_n(T): double-jump kernel, symmetric under T <-> 1 - T."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmission T={t} outside [0, 1]")
    if n <= 0:
        raise DomainError(f"index n={n} must be positive")
    r = 1.0 - t

    def f(x):
        den = (t + r * x) ** n + (r + t * x) ** n
        t1 = np.log((1.0 + t * x) ** n + (r * x) ** n)
        t2 = np.log((1.0 + r * x) ** n + (t * x) ** n)
        t3 = np.log(((x + t) ** n + r ** n) / den)
        t4 = np.log(((x + r) ** n + t ** n) / den)
        return (t1 + t2 + t3 + t4) / (2.0 * np.pi ** 2 * x)

    return -n / 12.0 + _unit_integral(f, n)


@lru_cache(maxsize=1024)
def q_fun(t: float) -> float:
    """q(T): von Neumann MI log coefficient; q < 0 on (0, 1), q(0)=q(1)=0."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmission T={t} outside [0, 1]")
    r = 1.0 - t
    edge = float(_xlx(np.array([t]))[0] + _xlx(np.array([r]))[0])

    def f1(x):
        num = (1.0 + r * x) * np.log1p(r * x) + (1.0 + t * x) * np.log1p(t * x)
        return num / ((1.0 + x) * x) / (2.0 * np.pi ** 2)

    def f2(x):
        num = edge - (_xlx(r + x) + _xlx(t + x)) / (1.0 + x)
        return num / x / (2.0 * np.pi ** 2)

    i1 = adaptive_gauss_legendre(f1, 0.0, 1.0, tol=Q_TOL)
    i2 = adaptive_gauss_legendre(f2, 0.0, 1.0, tol=Q_TOL)
    return 1.0 / 24.0 - i1 + i2


@lru_cache(maxsize=1024)
def q_tilde_fun(t: float) -> float:
    """qt(T): the companion coefficient; qt > 0 on (0, 1), qt(0)=qt(1)=0."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmission T={t} outside [0, 1]")
    r = 1.0 - t
    edge = float(_xlx(np.array([t]))[0] + _xlx(np.array([r]))[0])

    def f(x):
        num = (_xlx(r + t * x) + _xlx(t + r * x)) / (1.0 + x) - edge
        return num / x / np.pi ** 2

    return q_fun(t) + 1.0 / 12.0 + adaptive_gauss_legendre(f, 0.0, 1.0, tol=Q_TOL)


def _log_ratio_integral(lo: float, hi: float, n: float) -> float:
    """int_lo^hi [x^(n-1) - (1-x)^(n-1)] / [x^n + (1-x)^n] * ln|(hi-x)/(x-lo)| dx.

    The substitution x = lo + (hi - lo) sin^2(pi s / 2) turns both endpoint
    logarithms (and, at lo = 0 with n < 1, the algebraic singularity) into
    regular factors:  ln|(hi-x)/(x-lo)| = 2 [ln cos(pi s/2) - ln sin(pi s/2)].
    """
    if lo == hi:
        return 0.0
    width = hi - lo

    def g(s):
        sn = np.sin(0.5 * np.pi * s)
        cs = np.cos(0.5 * np.pi * s)
        x = lo + width * sn ** 2
        # complement formed without cancellation so x**(n-1) and
        # (1-x)**(n-1) stay finite arbitrarily close to the endpoints
        comp = (1.0 - hi) + width * cs ** 2
        num = x ** (n - 1.0) - comp ** (n - 1.0)
        den = x ** n + comp ** n
        logs = 2.0 * (np.log(cs) - np.log(sn))
        return num / den * logs * width * 0.5 * np.pi * np.sin(np.pi * s)

    return tanh_sinh(g, 0.0, 1.0, tol=1e-13, max_level=14)


def q_n_singular_form(p: float, n: float) -> float:
    """Q_n(p) from its other integral representation (test oracle).

    Evaluated with tanh-sinh quadrature after a sine regularization of the
    endpoints, both deliberately disjoint from the production path.
    """
    if n == 1.0:
        return 0.0
    return n / (2.0 * np.pi ** 2) * _log_ratio_integral(p, 1.0, n)


def q_tilde_n_singular_form(t: float, n: float) -> float:
    """Qt_n(T) via Q_n plus the signed two-endpoint-log integral (oracle)."""
    r = 1.0 - t
    base = q_n_singular_form(t, n) + q_n_singular_form(r, n)
    if n == 1.0 or t == r:
        return base
    # the oriented integral from r to t of f ln|(r-x)/(t-x)| equals
    # -H(min, max) in the ascending-endpoint convention of the helper
    lo, hi = (r, t) if t > r else (t, r)
    return base - n / (2.0 * np.pi ** 2) * _log_ratio_integral(lo, hi, n)


# ---------------------------------------------------------------------------
# volume-law coefficients


def _window_average(model: ImpurityModel, bias: BiasConfig, integrand) -> float:
    """int_{k-}^{k+} integrand(T(k)) dk, via quadrature for k-dependent T."""
    if bias.delta_k == 0.0:
        return 0.0
    return adaptive_gauss_legendre(
        lambda k: integrand(model.transmission(k)),
        bias.k_minus, bias.k_plus, tol=Q_TOL)


def volume_coeff(model: ImpurityModel, bias: BiasConfig, kind: str,
                 n: float | None = None) -> float:
    """Per-site coefficient of the extensive term for the given measure.

    kinds: entropy_n, mi_n (Renyi index n), mi_vn, neg_n (even n), neg_vn.
    """
    pi = np.pi
    if kind == "entropy_n":
        if n is None or n <= 0 or n == 1:
            raise DomainError("entropy_n requires n > 0, n != 1")
        return _window_average(
            model, bias,
            lambda t: np.log(t ** n + (1 - t) ** n)) / (2 * pi * (1 - n))
    if kind == "mi_n":
        if n is None or n <= 0 or n == 1:
            raise DomainError("mi_n requires n > 0, n != 1")
        return _window_average(
            model, bias,
            lambda t: np.log(t ** n + (1 - t) ** n)) / (pi * (1 - n))
    if kind == "mi_vn":
        return _window_average(
            model, bias,
            lambda t: -_xlx(t) - _xlx(1 - t)) / pi
    if kind == "neg_n":
        if n is None or n < 2 or n % 2:
            raise DomainError("neg_n requires an even integer n >= 2")
        return _window_average(
            model, bias,
            lambda t: np.log(t ** (n / 2) + (1 - t) ** (n / 2))) / pi
    if kind == "neg_vn":
        return _window_average(
            model, bias,
            lambda t: np.log(np.sqrt(t) + np.sqrt(1 - t))) / pi
    raise DomainError(f"unknown volume coefficient kind {kind!r}")


# ---------------------------------------------------------------------------
# predictions


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Volume term + logarithmic terms + optional fitted constant."""

    linear_coeff: float
    linear_length: float
    log_terms: tuple[tuple[float, float], ...]
    constant: float | None = None

    def __post_init__(self):
        for coeff, arg in self.log_terms:
            if arg <= 0.0:
                raise DomainError(f"log argument {arg} must be positive")

    @property
    def linear_part(self) -> float:
        return self.linear_coeff * self.linear_length

    @property
    def log_part(self) -> float:
        return float(sum(c * math.log(a) for c, a in self.log_terms))

    def total(self) -> float:
        return self.linear_part + self.log_part + (self.constant or 0.0)


@dataclass(frozen=True)
class SortedLengths:
    """The four interval edges sorted ascending: m1 <= m2 <= m3 <= m4."""

    m1: int
    m2: int
    m3: int
    m4: int

    @classmethod
    def from_geometry(cls, g: Geometry) -> "SortedLengths":
        values = sorted([g.d_l, g.ell_l + g.d_l, g.d_r, g.ell_r + g.d_r])
        return cls(*values)


def _omitting_ratio(numerators, denominators) -> float:
    """Product of |numerators| over |denominators|, omitting exact zeros.

    The omission rule for degenerate configurations: any difference whose
    value is exactly zero (lengths are integers) simply drops out of its
    ratio.
    """
    num = 1.0
    for x in numerators:
        if x != 0:
            num *= abs(x)
    den = 1.0
    for x in denominators:
        if x != 0:
            den *= abs(x)
    return num / den


def _four_point_ratios(g: Geometry) -> tuple[float, float]:
    s = SortedLengths.from_geometry(g)
    numerators = (s.m3 - s.m1, s.m4 - s.m2)
    ratio1 = _omitting_ratio(
        numerators, (g.ell_l + g.d_l - g.ell_r - g.d_r, g.d_l - g.d_r))
    ratio2 = _omitting_ratio(
        numerators, (g.ell_r + g.d_r - g.d_l, g.ell_l + g.d_l - g.d_r))
    return ratio1, ratio2


def _require_bias(bias: BiasConfig):
    if bias.delta_k == 0.0:
        raise BiasError(
            "zero bias: the logarithmic terms are not the naive limit of "
            "the finite-bias formulas; refusing to extrapolate")


def single_interval_entropy_asym(model: ImpurityModel, bias: BiasConfig,
                                 g: Geometry, side: str,
                                 n: float) -> AsymptoticPrediction:
    """Renyi entropy asymptotics of a single interval (d/ell >> 1).

    The log coefficient mixes the interval's own Fermi momentum through
    T and the opposite one through R:

        (1+n)/(12n) + [Q_n(T(k_F,side)) + Q_n(R(k_F,other))] / (1-n).
    """
    _require_bias(bias)
    if side not in ("L", "R"):
        raise DomainError(f"side must be 'L' or 'R', got {side!r}")
    kf_own = bias.kf_l if side == "L" else bias.kf_r
    kf_other = bias.kf_r if side == "L" else bias.kf_l
    ell = g.ell_l if side == "L" else g.ell_r
    t_own = float(model.transmission(kf_own))
    t_other = float(model.transmission(kf_other))
    coeff = (1 + n) / (12 * n) + (q_n(t_own, n) + q_n(1 - t_other, n)) / (1 - n)
    return AsymptoticPrediction(
        linear_coeff=volume_coeff(model, bias, "entropy_n", n),
        linear_length=float(ell),
        log_terms=((coeff, float(ell)),))


def _mi_log_terms(model, bias, g, coeff_fn) -> tuple[tuple[float, float], ...]:
    ratio1, ratio2 = _four_point_ratios(g)
    terms = []
    for kf in (bias.kf_l, bias.kf_r):
        t = float(model.transmission(kf))
        c1, c2 = coeff_fn(t)
        terms.append((c1, ratio1))
        terms.append((c2, ratio2))
    return tuple(terms)


def renyi_mi_asym(model: ImpurityModel, bias: BiasConfig, g: Geometry,
                  n: float) -> AsymptoticPrediction:
    """Full Renyi MI asymptotics: volume law plus four-point log terms."""
    _require_bias(bias)
    if n <= 0 or n == 1:
        raise DomainError(f"Renyi index n={n} must be positive and != 1")
    ell_mirror, _, _ = mirror_overlap(g)
    q0 = (1.0 / n - n) / 12.0

    def coeffs(t):
        c1 = (q_n(t, n) + q_n(1 - t, n) - q0) / (2 * (1 - n))
        c2 = q_tilde_n(t, n) / (2 * (1 - n))
        return c1, c2

    return AsymptoticPrediction(
        linear_coeff=volume_coeff(model, bias, "mi_n", n),
        linear_length=float(ell_mirror),
        log_terms=_mi_log_terms(model, bias, g, coeffs))


def vn_mi_asym(model: ImpurityModel, bias: BiasConfig,
               g: Geometry) -> AsymptoticPrediction:
    """Von Neumann MI asymptotics (the n -> 1 limit of the Renyi result)."""
    _require_bias(bias)
    ell_mirror, _, _ = mirror_overlap(g)

    def coeffs(t):
        return 0.5 * q_fun(t), 0.5 * q_tilde_fun(t)

    return AsymptoticPrediction(
        linear_coeff=volume_coeff(model, bias, "mi_vn"),
        linear_length=float(ell_mirror),
        log_terms=_mi_log_terms(model, bias, g, coeffs))


def negativity_asym_symmetric(model: ImpurityModel, bias: BiasConfig,
                              geometry_or_length, n=None) -> AsymptoticPrediction:
    """Negativity asymptotics for the symmetric configuration only.

    ``n`` even selects the Renyi negativity E_n; ``n=None`` the fermionic
    negativity E (exponent 1/2 and log offset -1/4).  Asymmetric
    geometries are out of scope: the general negativity log term has no
    closed form here.
    """
    _require_bias(bias)
    if isinstance(geometry_or_length, Geometry):
        g = geometry_or_length
        if g.ell_l != g.ell_r or g.d_l != g.d_r:
            raise ScopeError(
                "negativity asymptotics available only for ell_l == ell_r "
                "and d_l == d_r")
        ell = g.ell_l
    else:
        ell = int(geometry_or_length)
        if ell < 1:
            raise DomainError(f"length {ell} must be >= 1")
    if n is None:
        n_eff, kind = 1.0, "neg_vn"
    else:
        if n < 2 or n % 2:
            raise DomainError(f"Renyi negativity index n={n} must be even, >= 2")
        n_eff, kind = float(n), "neg_n"
    coeff = -n_eff / 4.0
    for kf in (bias.kf_l, bias.kf_r):
        t = float(model.transmission(kf))
        coeff += q_n(t, n_eff / 2.0) + q_n(1.0 - t, n_eff / 2.0)
    return AsymptoticPrediction(
        linear_coeff=volume_coeff(model, bias, kind, n),
        linear_length=float(ell),
        log_terms=((coeff, float(ell)),))
