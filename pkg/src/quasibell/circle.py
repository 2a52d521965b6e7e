"""Coherent states on a circle and the rotationally invariant superpositions built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .coherent_algebra import CDTYPE, RDTYPE, CoherentSum, ContractViolation, root_of_unity
from .fock_validate import FockVector

WEIGHT_FLOOR = 1e-300


class DegenerateWeightError(ArithmeticError):
    """A residue weight g~(q) is too small to normalize by."""


@dataclass(frozen=True)
class CircleConfig:
    """``N`` coherent states ``alpha_m = alpha0 * exp(-2 pi i m / N)`` on a circle."""

    n_components: int
    alpha0: complex

    def __post_init__(self):
        if int(self.n_components) != self.n_components or self.n_components < 2:
            raise ContractViolation(f"need N >= 2, got {self.n_components}")
        if abs(complex(self.alpha0)) == 0:
            raise ContractViolation("alpha0 must be non-zero")
        object.__setattr__(self, "n_components", int(self.n_components))
        object.__setattr__(self, "alpha0", complex(self.alpha0))

    @property
    def n(self) -> int:
        return self.n_components

    @property
    def radius(self) -> float:
        return abs(self.alpha0)

    def points(self) -> np.ndarray:
        """All circle amplitudes in extended precision."""
        return CDTYPE(self.alpha0) * root_of_unity(np.arange(self.n), self.n)

    def point(self, m: int):
        return CDTYPE(self.alpha0) * root_of_unity(m, self.n)

    def scaled(self, factor: float) -> "CircleConfig":
        return CircleConfig(self.n, self.alpha0 * factor)


@dataclass(frozen=True)
class GramTables:
    g: np.ndarray
    g_tilde: np.ndarray


def _label(cfg: CircleConfig, q: int, what: str = "q") -> int:
    if not 0 <= q < cfg.n:
        raise ContractViolation(f"{what}={q} outside 0..{cfg.n - 1}")
    return int(q)


def gram_g(cfg: CircleConfig, m: int) -> complex:
    """Overlap ``<alpha_0|alpha_m> = exp(|alpha0|^2 (exp(2 pi i m/N) - 1))``."""
    w = np.conj(root_of_unity(m, cfg.n))
    return complex(np.exp(RDTYPE(cfg.radius) ** 2 * (w - 1)))


def _series_cap(mean: float) -> int:
    return int(mean + 40 * math.sqrt(mean + 1) + 40)


@lru_cache(maxsize=512)
def _residue_moments(n: int, radius: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Per-residue Poisson weight and first moment, series summed until the relative tail < 1e-16."""
    mean = radius**2
    cap = _series_cap(mean)
    log_mean = math.log(mean)
    weights, firsts = [], []
    for k in range(n):
        w = m1 = 0.0
        idx = k
        while idx <= cap:
            term = math.exp(-mean + idx * log_mean - gammaln(idx + 1))
            w += term
            m1 += idx * term
            if idx > mean and term < 1e-16 * w:
                break
            idx += n
        weights.append(w)
        firsts.append(m1)
    return tuple(weights), tuple(firsts)


def gram_g_tilde(cfg: CircleConfig, k: int) -> float:
    """Poisson weight carried by photon numbers ``= k (mod N)``."""
    return _residue_moments(cfg.n, cfg.radius)[0][k % cfg.n]


def gram_g_tilde_dft(cfg: CircleConfig, k: int) -> complex:
    """Same quantity as the DFT ``(1/N) sum_m g(m) exp(-2 pi i k m / N)``."""
    n = cfg.n
    m = np.arange(n)
    g = np.exp(RDTYPE(cfg.radius) ** 2 * (np.conj(root_of_unity(m, n)) - 1))
    return complex((g * root_of_unity(k * m, n)).sum() / n)


def gram_tables(cfg: CircleConfig) -> GramTables:
    g = np.array([gram_g(cfg, m) for m in range(cfg.n)])
    gt = np.array(_residue_moments(cfg.n, cfg.radius)[0])
    return GramTables(g, gt)


def _checked_weight(cfg: CircleConfig, q: int) -> float:
    w = gram_g_tilde(cfg, q)
    if w < WEIGHT_FLOOR:
        raise DegenerateWeightError(f"g~({q}) = {w:.3e} for N={cfg.n}, |alpha0|={cfg.radius}")
    return w


def circular_state(cfg: CircleConfig, coeffs) -> CoherentSum:
    """``sum_l coeffs[l] |alpha_l>`` (not normalized)."""
    coeffs = np.asarray(coeffs, dtype=CDTYPE)
    if coeffs.shape != (cfg.n,):
        raise ContractViolation(f"need {cfg.n} coefficients, got {coeffs.shape}")
    return CoherentSum(1, coeffs, cfg.points()[:, None])


def rics(cfg: CircleConfig, q: int) -> CoherentSum:
    """Rotation eigenstate ``|c_q>``: equal-weight circle superposition with linear phase."""
    q = _label(cfg, q)
    n = cfg.n
    norm = RDTYPE(n) * np.sqrt(RDTYPE(_checked_weight(cfg, q)))
    phases = np.conj(root_of_unity(q * np.arange(n), n))
    return circular_state(cfg, phases / norm)


def rics_fock_coeffs(cfg: CircleConfig, q: int, cutoff: int) -> FockVector:
    """Photon-number amplitudes of ``|c_q>``; support on ``n = q (mod N)`` only.

    The prefactor is ``exp(-|alpha0|^2/2) / sqrt(g~(q))``, the value that makes
    the vector unit-norm (projecting the coherent form onto ``<n|``).
    """
    q = _label(cfg, q)
    if cutoff < q:
        raise ContractViolation("cutoff must be at least q")
    w = _checked_weight(cfg, q)
    r, phi = cfg.radius, np.angle(cfg.alpha0)
    n = np.arange(cutoff + 1)
    vec = np.zeros(cutoff + 1, dtype=complex)
    sel = n[n % cfg.n == q]
    mag = np.exp(-(r**2) / 2 + sel * math.log(r) - gammaln(sel + 1) / 2 - math.log(w) / 2)
    vec[sel] = mag * np.exp(1j * phi * sel)
    return FockVector(cutoff, vec)


def mean_photon(cfg: CircleConfig, q: int) -> float:
    q = _label(cfg, q)
    weights, firsts = _residue_moments(cfg.n, cfg.radius)
    if weights[q] < WEIGHT_FLOOR:
        raise DegenerateWeightError(f"g~({q}) underflows")
    return firsts[q] / weights[q]


def nonclassicality_bound(cfg: CircleConfig, q: int) -> float:
    """Lower bound ``sqrt(1 + 2<n>) - 1`` on the distance from classical states."""
    return math.sqrt(1 + 2 * mean_photon(cfg, q)) - 1


def delta_tilde(cfg: CircleConfig, m: int, k: int) -> complex:
    """Expansion matrix of pseudo-phase states in the coherent basis; circulant in ``m - k``."""
    n = cfg.n
    q = np.arange(n)
    inv = np.array([1 / math.sqrt(_checked_weight(cfg, j)) for j in q], dtype=RDTYPE)
    s = (inv * np.conj(root_of_unity((m - k) * q, n))).sum()
    return complex(s / RDTYPE(n) ** RDTYPE(1.5))


def delta_tilde_matrix(cfg: CircleConfig) -> np.ndarray:
    n = cfg.n
    return np.array([[delta_tilde(cfg, m, k) for k in range(n)] for m in range(n)])


def pseudo_phase(cfg: CircleConfig, k: int) -> CoherentSum:
    """Discrete Fourier partner ``(1/sqrt N) sum_q exp(-2 pi i q k/N) |c_q>`` of the RICS basis."""
    k = _label(cfg, k, "k")
    n = cfg.n
    out = CoherentSum.zero(1)
    for q in range(n):
        out = out + rics(cfg, q) * (root_of_unity(q * k, n) / np.sqrt(RDTYPE(n)))
    return out


def lattice_indices(cfg: CircleConfig, amps, tol: float = 1e-10) -> np.ndarray:
    """Integer labels ``m`` with ``amps == alpha_m``; raises if an amplitude is off the circle."""
    amps = np.asarray(amps, dtype=CDTYPE)
    n = cfg.n
    ratio = (amps / CDTYPE(cfg.alpha0)).astype(np.complex128)
    m = np.mod(np.rint(-np.angle(ratio) * n / (2 * math.pi)).astype(np.int64), n)
    err = np.abs(amps - cfg.points()[m])
    if np.any(err > tol * max(1.0, cfg.radius)):
        raise ContractViolation("state has amplitudes off the circle lattice")
    return m


def rics_coordinates(cfg: CircleConfig, s: CoherentSum) -> np.ndarray:
    """Coordinates of a circle-lattice state in the orthonormal RICS basis of every mode.

    Uses ``<c_q|alpha_m> = sqrt(g~(q)) exp(-2 pi i m q/N)``: the coefficient
    tensor on the lattice is Fourier transformed along each mode and
    weighted.  This avoids the ill-conditioned Gram sums entirely, so inner
    products of strongly non-orthogonal expansions stay accurate.
    """
    n = cfg.n
    tensor_c = np.zeros((n,) * s.modes, dtype=CDTYPE)
    if len(s):
        idx = np.stack([lattice_indices(cfg, s.amps[:, j]) for j in range(s.modes)], axis=1)
        np.add.at(tensor_c, tuple(idx.T), s.coeffs)
    q = np.arange(n)
    weights = np.sqrt(np.array(_residue_moments(n, cfg.radius)[0], dtype=RDTYPE))
    fourier = weights[:, None] * root_of_unity(np.outer(q, q), n)  # [q, m]
    out = tensor_c
    for axis in range(s.modes):
        out = np.moveaxis(np.tensordot(fourier, out, axes=([1], [axis])), 0, axis)
    return out.astype(np.complex128)
