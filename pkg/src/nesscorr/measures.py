"""Spectral evaluation of entropies, mutual information and negativities.

For a Gaussian state every measure is a function of the restricted
correlation matrix C.  Renyi and von Neumann entropies use the occupation
spectrum directly:

    S^(n) = 1/(1-n) sum_lam ln(lam^n + (1-lam)^n),
    S     = sum_lam [-lam ln lam - (1-lam) ln(1-lam)].

The fermionic negativity of a bipartition (first ``size_left`` indices
versus the rest) is built from the partial-time-reversal transform

    Gamma_pm = D_pm (I - 2C) D_pm,   D_pm = diag(pm i, ..., 1, ...),
    C_Xi = [I - (I + Gamma_+ Gamma_-)^(-1) (Gamma_+ + Gamma_-)] / 2,

    E_n = Tr ln[(C_Xi)^(n/2) + (I - C_Xi)^(n/2)]
          + (n/2) Tr ln[C^2 + (I - C)^2]           (n even),

with the fermionic negativity E given by exponent 1/2 and prefactor 1/2.
An equivalent determinant route evaluates E_n as a product over the
angular index gamma = -(n-1)/2, ..., (n-1)/2:

    E_n = sum_gamma ln det(I - C_gamma),
    C_gamma = diag((1 - e^{2 pi i gamma / n}) I_left,
                   (1 + e^{-2 pi i gamma / n}) I_right) C.

Both routes are kept; their agreement is a package-level invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .correlation import CorrelationMatrix
from .densela import gen_eigvals, herm_eigvals, lu_logdet
from .errors import BranchError, DimensionError, DomainError, SingularMatrixError, SpectrumError

SPECTRUM_HARD = 1e-6
IMAG_BUDGET = 1e-6


@dataclass
class MeasureResult:
    """A real measure value plus numerical diagnostics."""

    value: float
    imag_residual: float = 0.0
    clamped_count: int = 0


def _occupation_spectrum(c: CorrelationMatrix) -> tuple[np.ndarray, int]:
    cached = c._spectra.get("occupation")
    if cached is not None:
        return cached
    lam = herm_eigvals(c.mat)
    if lam.min() < -SPECTRUM_HARD or lam.max() > 1.0 + SPECTRUM_HARD:
        raise SpectrumError(
            f"correlation spectrum [{lam.min():.3e}, {lam.max():.3e}] "
            f"strays outside [0, 1] beyond {SPECTRUM_HARD}")
    clamped = int(np.sum((lam < 0.0) | (lam > 1.0)))
    result = (np.clip(lam, 0.0, 1.0), clamped)
    c._spectra["occupation"] = result
    return result


def renyi_entropy(c: CorrelationMatrix, n: float) -> MeasureResult:
    """Renyi entropy S^(n) for real n > 0, n != 1."""
    if n <= 0 or n == 1:
        raise DomainError(f"Renyi index n={n} must be positive and != 1")
    lam, clamped = _occupation_spectrum(c)
    value = float(np.sum(np.log(lam ** n + (1.0 - lam) ** n))) / (1.0 - n)
    return MeasureResult(value=value, clamped_count=clamped)


def vn_entropy(c: CorrelationMatrix) -> MeasureResult:
    lam, clamped = _occupation_spectrum(c)
    value = float(np.sum(-xlogy(lam, lam) - xlogy(1.0 - lam, 1.0 - lam)))
    return MeasureResult(value=value, clamped_count=clamped)


def mutual_information(c_l: CorrelationMatrix, c_r: CorrelationMatrix,
                       c_a: CorrelationMatrix, n: float | None = None) -> MeasureResult:
    """Mutual information S(A_L) + S(A_R) - S(A); Renyi for n, vN for None."""
    if c_a.dim != c_l.dim + c_r.dim:
        raise DimensionError(
            f"dim(A) = {c_a.dim} != dim(A_L) + dim(A_R) = {c_l.dim + c_r.dim}")
    ent = (lambda c: vn_entropy(c)) if n is None else (lambda c: renyi_entropy(c, n))
    parts = [ent(c_l), ent(c_r), ent(c_a)]
    return MeasureResult(
        value=parts[0].value + parts[1].value - parts[2].value,
        clamped_count=sum(p.clamped_count for p in parts))


def build_c_xi(c_a: CorrelationMatrix, size_left: int) -> np.ndarray:
    """Partial-time-reversal transformed correlation matrix C_Xi.

    The first ``size_left`` indices of ``c_a`` must be the left subsystem.
    The result is non-Hermitian in general, but similar to a Hermitian
    matrix, so its spectrum is real and lies in [0, 1].
    """
    n = c_a.dim
    if not 0 <= size_left <= n:
        raise DimensionError(f"size_left={size_left} outside [0, {n}]")
    g = np.eye(n) - 2.0 * c_a.mat
    d = np.concatenate([1j * np.ones(size_left), np.ones(n - size_left)])
    gamma_p = (d[:, None] * g) * d[None, :]
    gamma_m = gamma_p.conj().T
    lhs = np.eye(n) + gamma_p @ gamma_m
    try:
        x = np.linalg.solve(lhs, gamma_p + gamma_m)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"I + Gamma_+ Gamma_- is singular: {exc}") from exc
    return 0.5 * (np.eye(n) - x)


def _occupation_log_sum(c_a: CorrelationMatrix, power: float) -> float:
    lam, _ = _occupation_spectrum(c_a)
    return float(power * np.sum(np.log(lam ** 2 + (1.0 - lam) ** 2)))


def _xi_spectrum(c_a: CorrelationMatrix, size_left: int) -> tuple[np.ndarray, int]:
    """C_Xi eigenvalues with numerically-real strays nudged into [0, 1].

    The exact spectrum is real in [0, 1]; rounding pushes edge eigenvalues
    out by O(eps), which the square roots would amplify into spurious
    imaginary parts.  Only eigenvalues that are real to within 1e-8 are
    clamped (and counted); genuinely complex ones pass through untouched.
    """
    cached = c_a._spectra.get(("xi", size_left))
    if cached is not None:
        return cached
    xi = gen_eigvals(build_c_xi(c_a, size_left))
    real_like = np.abs(xi.imag) <= 1e-8
    stray = real_like & ((xi.real < 0.0) | (xi.real > 1.0))
    if np.any(stray & ((xi.real < -SPECTRUM_HARD) | (xi.real > 1 + SPECTRUM_HARD))):
        raise SpectrumError("C_Xi spectrum strays outside [0, 1] beyond tolerance")
    out = xi.copy()
    out[real_like] = np.clip(xi.real[real_like], 0.0, 1.0)
    result = (out, int(np.sum(stray)))
    c_a._spectra[("xi", size_left)] = result
    return result


def fermionic_negativity(c_a: CorrelationMatrix, size_left: int) -> MeasureResult:
    """Fermionic negativity E (the n -> 1 continuation, exponent 1/2).

    C_Xi eigenvalues are taken to their principal square roots; proximity
    to the branch cut shows up as a nonzero imaginary residual rather
    than being silently absorbed.
    """
    xi, clamped = _xi_spectrum(c_a, size_left)
    terms = np.log(np.sqrt(xi) + np.sqrt(1.0 - xi))
    s1 = complex(np.sum(terms))
    total = s1 + _occupation_log_sum(c_a, 0.5)
    residual = abs(total.imag)
    if residual > IMAG_BUDGET:
        raise BranchError(
            f"negativity imaginary residual {residual:.3e} exceeds "
            f"{IMAG_BUDGET}; an eigenvalue crossed the square-root cut")
    return MeasureResult(value=float(total.real), imag_residual=residual,
                         clamped_count=clamped)


def _check_even(n) -> int:
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise DomainError(f"Renyi negativity index n={n} must be an even integer >= 2")
    return int(n)


def renyi_negativity_eig(c_a: CorrelationMatrix, size_left: int, n) -> MeasureResult:
    """Renyi negativity E_n from the spectra of C_Xi and C."""
    n = _check_even(n)
    xi, clamped = _xi_spectrum(c_a, size_left)
    half = n // 2
    s1 = complex(np.sum(np.log(xi ** half + (1.0 - xi) ** half)))
    total = s1 + _occupation_log_sum(c_a, 0.5 * n)
    residual = abs(total.imag)
    if residual > IMAG_BUDGET:
        raise BranchError(
            f"Renyi negativity imaginary residual {residual:.3e} exceeds {IMAG_BUDGET}")
    return MeasureResult(value=float(total.real), imag_residual=residual,
                         clamped_count=clamped)


def renyi_negativity_det(c_a: CorrelationMatrix, size_left: int, n) -> MeasureResult:
    """Renyi negativity E_n as a product of gamma-indexed determinants."""
    n = _check_even(n)
    dim = c_a.dim
    if not 0 <= size_left <= dim:
        raise DimensionError(f"size_left={size_left} outside [0, {dim}]")
    gammas = np.arange(n) - (n - 1) / 2.0
    total = 0j
    for gamma in gammas:
        phase = np.exp(2j * np.pi * gamma / n)
        scale = np.concatenate([
            (1.0 - phase) * np.ones(size_left),
            (1.0 + 1.0 / phase) * np.ones(dim - size_left)])
        try:
            total += lu_logdet(np.eye(dim) - scale[:, None] * c_a.mat)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                f"singular factor I - C_gamma at gamma={gamma}",
                pivot_index=exc.pivot_index) from exc
    residual = abs(total.imag)
    if residual > IMAG_BUDGET:
        raise BranchError(
            f"determinant-route imaginary residual {residual:.3e} exceeds {IMAG_BUDGET}")
    return MeasureResult(value=float(total.real), imag_residual=residual)
