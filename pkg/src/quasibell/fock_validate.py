"""Truncated Fock-space representations used to cross-check the coherent algebra.

Nothing in here is used on the teleportation hot path; the functions build
explicit photon-number amplitudes so that inner products, Schmidt spectra and
(for two components only) full measurement statistics can be recomputed by a
route that never touches the Gram expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .coherent_algebra import CoherentSum, ContractViolation

DEFAULT_EPS = 1e-12


@dataclass(frozen=True)
class FockVector:
    cutoff: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.cutoff + 1,):
            raise ContractViolation("FockVector needs cutoff + 1 coefficients")

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "FockVector") -> complex:
        m = min(self.cutoff, other.cutoff) + 1
        return complex(np.vdot(self.coeffs[:m], other.coeffs[:m]))


@dataclass(frozen=True)
class TwoModeFockMatrix:
    cutoff: int
    coeffs: np.ndarray  # [n_A, n_B]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def reduced_a(self) -> np.ndarray:
        """Partial trace over mode B: ``rho_A = M M^dag``."""
        return self.coeffs @ self.coeffs.conj().T


def _poisson_pmf(mean: float, upto: int) -> np.ndarray:
    n = np.arange(upto + 1)
    if mean == 0:
        return (n == 0).astype(float)
    return np.exp(-mean + n * math.log(mean) - gammaln(n + 1))


def poisson_tail(mean: float, m: int) -> float:
    """``P(X > m)`` for ``X ~ Poisson(mean)`` by direct summation of the tail terms."""
    hi = int(m + mean + 40 * math.sqrt(mean + 1) + 60)
    pmf = _poisson_pmf(mean, hi)
    return float(pmf[m + 1 :][::-1].sum())


def cutoff_for(alpha_abs: float, eps: float = DEFAULT_EPS) -> int:
    """Smallest cutoff ``M`` with Poisson(|alpha|^2) mass beyond ``M`` below ``eps``."""
    if not 0 < eps < 1:
        raise ContractViolation("eps must lie in (0, 1)")
    mean = float(alpha_abs) ** 2
    hi = int(mean + 40 * math.sqrt(mean + 1) + 60)
    pmf = _poisson_pmf(mean, hi)
    tails = np.cumsum(pmf[::-1])[::-1]  # tails[k] = P(X >= k)
    tails = np.append(tails[1:], 0.0)  # P(X > k)
    return int(np.argmax(tails < eps))


def coherent_fock(alpha, cutoff: int) -> np.ndarray:
    """``<n|alpha>`` for ``n = 0..cutoff``."""
    n = np.arange(cutoff + 1)
    alpha = complex(alpha)
    if alpha == 0:
        return (n == 0).astype(complex)
    r, phi = abs(alpha), np.angle(alpha)
    mag = np.exp(-(r**2) / 2 + n * math.log(r) - gammaln(n + 1) / 2)
    return mag * np.exp(1j * phi * n)


def to_fock(s: CoherentSum, cutoff: int) -> FockVector:
    if s.modes != 1:
        raise ContractViolation("to_fock needs a single-mode state")
    if cutoff < 0:
        raise ContractViolation("cutoff must be non-negative")
    vec = np.zeros(cutoff + 1, dtype=complex)
    for c, (a,) in zip(s.coeffs, s.amps):
        vec += complex(c) * coherent_fock(a, cutoff)
    return FockVector(cutoff, vec)


def to_fock_tensor(s: CoherentSum, cutoff: int) -> np.ndarray:
    """Dense amplitude tensor of shape ``(cutoff + 1,) * modes``.

    Only meant for two- and three-mode states; memory grows as cutoff**modes.
    """
    shape = (cutoff + 1,) * s.modes
    out = np.zeros(shape, dtype=complex)
    for c, row in zip(s.coeffs, s.amps):
        t = np.asarray(complex(c))
        for a in row:
            t = np.multiply.outer(t, coherent_fock(a, cutoff))
        out += t
    return out


def to_fock_matrix(s: CoherentSum, cutoff: int) -> TwoModeFockMatrix:
    if s.modes != 2:
        raise ContractViolation("to_fock_matrix needs a two-mode state")
    return TwoModeFockMatrix(cutoff, to_fock_tensor(s, cutoff))


def schmidt_via_svd(s: CoherentSum, cutoff: int) -> np.ndarray:
    """Squared singular values of the two-mode amplitude matrix, descending, ``< 1e-14`` trimmed."""
    sv = np.linalg.svd(to_fock_matrix(s, cutoff).coeffs, compute_uv=False)
    vals = np.sort(sv**2)[::-1]
    return vals[vals >= 1e-14]


def entropy_of_spectrum(vals) -> float:
    """Shannon entropy in bits with ``0 log 0 = 0``; input is renormalized."""
    v = np.asarray(vals, dtype=float)
    if np.any(v < 0):
        raise ContractViolation("spectrum has negative entries")
    total = v.sum()
    if not 1 - 1e-6 <= total <= 1 + 1e-6:
        raise ContractViolation(f"spectrum sums to {total}, not 1")
    v = v[v > 0] / total
    return float(-(v * np.log2(v)).sum())


def measurement_statistics(s: CoherentSum, kept: int, cutoff: int):
    """Photon-number statistics on every mode except ``kept``.

    Returns ``(probs, conditional)`` where ``probs[n_1, ..., n_k]`` is the
    probability of the measured counts (in mode order, ``kept`` removed) and
    ``conditional[..., :]`` holds the unnormalized Fock amplitudes of the
    unmeasured mode for each outcome.
    """
    amp = np.moveaxis(to_fock_tensor(s, cutoff), kept, -1)
    probs = (np.abs(amp) ** 2).sum(axis=-1)
    return probs, amp
