"""Two-mode entangled circle states: quasi-Bell states, their Schmidt spectra and true Bell partners."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import CircleConfig, _label, gram_g_tilde, pseudo_phase, rics, rics_coordinates
from .coherent_algebra import (
    RDTYPE,
    CoherentSum,
    ContractViolation,
    apply_rotation,
    append_vacuum,
    beam_split_50,
    reduced_matrix,
    root_of_unity,
    tensor,
)

MODE_A, MODE_B = 0, 1


@dataclass(frozen=True)
class SchmidtSpectrum:
    q: int
    lambdas: np.ndarray
    entropy: float


def g1_tilde(cfg: CircleConfig, q: int) -> float:
    """Normalization weight ``sum_k g~(k) g~(q - k)`` of the split state."""
    n = cfg.n
    return math.fsum(gram_g_tilde(cfg, k) * gram_g_tilde(cfg, q - k) for k in range(n))


def g1_tilde_dft(cfg: CircleConfig, q: int) -> complex:
    """Same weight from the DFT of ``g(m)^2``."""
    n = cfg.n
    m = np.arange(n)
    g2 = np.exp(2 * RDTYPE(cfg.radius) ** 2 * (np.conj(root_of_unity(m, n)) - 1))
    return complex((g2 * root_of_unity(q * m, n)).sum() / n)


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def schmidt_coeffs(cfg: CircleConfig, q: int) -> SchmidtSpectrum:
    q = _label(cfg, q)
    n = cfg.n
    norm = g1_tilde(cfg, q)
    lam = np.array([gram_g_tilde(cfg, k) * gram_g_tilde(cfg, q - k) / norm for k in range(n)])
    return SchmidtSpectrum(q, lam, shannon_bits(lam))


def entanglement(cfg: CircleConfig, q: int) -> float:
    """Entanglement entropy in bits; depends on ``q`` but not on the rotation ``p``."""
    return schmidt_coeffs(cfg, q).entropy


def reduced_density_diag(cfg: CircleConfig, q: int) -> np.ndarray:
    """Diagonal of the reduced state of either mode, in the RICS basis."""
    return schmidt_coeffs(cfg, q).lambdas


def gqbs_state(cfg: CircleConfig, q: int, p: int) -> CoherentSum:
    """``(1/(N sqrt g1~(q))) sum_m e^{2 pi i q m/N} |alpha_m>_A |alpha_{m+p}>_B``."""
    q, p = _label(cfg, q), _label(cfg, p, "p")
    n = cfg.n
    m = np.arange(n)
    pts = cfg.points()
    coeffs = np.conj(root_of_unity(q * m, n)) / (RDTYPE(n) * np.sqrt(RDTYPE(g1_tilde(cfg, q))))
    amps = np.stack([pts, pts[(m + p) % n]], axis=1)
    return CoherentSum(2, coeffs, amps)


def gqbs_schmidt_form(cfg: CircleConfig, q: int, p: int) -> CoherentSum:
    """The same state assembled from RICS products with Schmidt weights."""
    q, p = _label(cfg, q), _label(cfg, p, "p")
    n = cfg.n
    lam = schmidt_coeffs(cfg, q).lambdas
    out = CoherentSum.zero(2)
    for k in range(n):
        w = np.sqrt(RDTYPE(lam[k])) * root_of_unity((q - k) * p, n)
        out = out + tensor(rics(cfg, k), rics(cfg, (q - k) % n)) * w
    return out


def gqbs_via_splitting(cfg: CircleConfig, q: int) -> CoherentSum:
    """Split ``|c_q>`` of amplitude ``sqrt2 * alpha0`` against vacuum on a balanced splitter.

    Each term ``(sqrt2 a, 0)`` exits as ``(a, a)``, so the output is directly
    comparable with ``gqbs_state(cfg, q, 0)``.
    """
    big = CircleConfig(cfg.n, cfg.alpha0 * math.sqrt(2))
    return beam_split_50(append_vacuum(rics(big, q)), 0, 1)


def reduced_density_rics(state: CoherentSum, cfg: CircleConfig, mode: int = MODE_A) -> np.ndarray:
    """Reduced density matrix of one mode of a two-mode state, in the RICS basis."""
    basis = [rics(cfg, k) for k in range(cfg.n)]
    return reduced_matrix(state, mode, basis)


def generalized_bell(cfg: CircleConfig, q: int, p: int) -> CoherentSum:
    """``(1/sqrt N) sum_m e^{2 pi i q m/N} |phi_m>_A |phi_{m+p}>_B`` on the pseudo-phase basis."""
    q, p = _label(cfg, q), _label(cfg, p, "p")
    n = cfg.n
    phis = [pseudo_phase(cfg, k) for k in range(n)]
    out = CoherentSum.zero(2)
    for m in range(n):
        w = np.conj(root_of_unity(q * m, n)) / np.sqrt(RDTYPE(n))
        out = out + tensor(phis[m], phis[(m + p) % n]) * w
    return out


def generalized_bell_schmidt_form(cfg: CircleConfig, q: int, p: int) -> CoherentSum:
    """Flat-weight RICS form ``(1/sqrt N) sum_k e^{-2 pi i (q-k) p/N} |c_k>|c_{q-k}>``."""
    q, p = _label(cfg, q), _label(cfg, p, "p")
    n = cfg.n
    out = CoherentSum.zero(2)
    for k in range(n):
        w = root_of_unity((q - k) * p, n) / np.sqrt(RDTYPE(n))
        out = out + tensor(rics(cfg, k), rics(cfg, (q - k) % n)) * w
    return out


def rotate_b(state: CoherentSum, cfg: CircleConfig, power: int) -> CoherentSum:
    return apply_rotation(state, MODE_B, cfg.n, power)


def schmidt_via_rics(cfg: CircleConfig, state: CoherentSum) -> np.ndarray:
    """Squared singular values of the exact RICS-basis coordinate matrix, descending.

    Unlike the Fock SVD this stays accurate for expansions with large,
    strongly cancelling coherent coefficients (small ``|alpha0|``, large ``N``).
    """
    if state.modes != 2:
        raise ContractViolation("need a two-mode state")
    sv = np.linalg.svd(rics_coordinates(cfg, state), compute_uv=False)
    return np.sort(sv**2)[::-1]
