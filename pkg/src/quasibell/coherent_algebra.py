"""Exact algebra of finite superpositions of multimode coherent product states.

A state is stored as a list of terms ``coeff * |a_0>|a_1>...|a_{M-1}>``.  Every
bilinear quantity (inner products, projector expectations, reduced matrix
elements) is a closed-form sum over term pairs, so nothing is truncated.

Arithmetic is carried out in ``numpy.clongdouble``.  Circle-state expansions
carry coefficients of order ``1/sqrt(g~(q))`` which can reach 1e4 at small
amplitudes, and the Gram sums then cancel down to O(1); the extra mantissa
bits keep those cancellations below 1e-11.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CDTYPE = np.clongdouble
RDTYPE = np.longdouble

TERM_TOL = 1e-12
REALITY_TOL = 1e-12


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


class NumericalRealityError(ArithmeticError):
    """A quantity that must be real came out with a significant imaginary part."""


def as_real(z, tol: float = REALITY_TOL, what: str = "value") -> float:
    """Return ``Re z`` after checking ``|Im z|`` is negligible (scaled by ``max(1, |z|)``)."""
    z = complex(z)
    if abs(z.imag) > tol * max(1.0, abs(z)):
        raise NumericalRealityError(f"{what} has imaginary part {z.imag:.3e}")
    return z.real


def root_of_unity(power, n: int) -> np.ndarray:
    """``exp(-2 pi i power / n)`` in extended precision (elementwise)."""
    k = np.mod(np.asarray(power, dtype=np.int64), n).astype(RDTYPE)
    theta = 2 * np.arccos(RDTYPE(-1)) * k / RDTYPE(n)
    return (np.cos(theta) - 1j * np.sin(theta)).astype(CDTYPE)


@dataclass(frozen=True)
class CoherentTerm:
    coeff: complex
    amps: tuple[complex, ...]


def _merge(coeffs: np.ndarray, amps: np.ndarray, tol: float):
    if len(coeffs) == 0:
        return coeffs, amps
    n = len(coeffs)
    group = np.full(n, -1, dtype=np.int64)
    reps = []
    for i in range(n):
        if group[i] >= 0:
            continue
        close = np.all(np.abs(amps[i:] - amps[i]) <= tol, axis=1)
        idx = np.nonzero(close & (group[i:] < 0))[0] + i
        group[idx] = len(reps)
        reps.append(i)
    out_amps = amps[reps]
    out_coeffs = np.zeros(len(reps), dtype=CDTYPE)
    np.add.at(out_coeffs, group, coeffs)
    keep = out_coeffs != 0
    out_coeffs, out_amps = out_coeffs[keep], out_amps[keep]
    # canonical order: lexicographic on rounded amplitudes, exact values break ties
    if len(out_coeffs) > 1:
        exact = out_amps
        key = np.round(out_amps.astype(np.complex128), 9)
        cols = []
        for k in (exact, key):  # lexsort: later keys take priority
            for j in reversed(range(k.shape[1])):
                cols.extend([k[:, j].imag, k[:, j].real])
        order = np.lexsort(cols)
        out_coeffs, out_amps = out_coeffs[order], out_amps[order]
    return out_coeffs, out_amps


class CoherentSum:
    """Immutable superposition ``sum_t coeffs[t] * |amps[t, 0]> ... |amps[t, modes-1]>``.

    Terms whose amplitude tuples agree within ``TERM_TOL`` componentwise are
    merged on construction.  ``prune`` optionally drops merged terms with
    ``|coeff| < prune``; it is off by default because dropping small terms can
    bias post-selected probabilities.
    """

    __slots__ = ("modes", "coeffs", "amps")

    def __init__(self, modes: int, coeffs, amps, *, prune: float | None = None):
        if modes < 0:
            raise ContractViolation("mode count must be non-negative")
        coeffs = np.asarray(coeffs, dtype=CDTYPE).reshape(-1)
        amps = np.asarray(amps, dtype=CDTYPE).reshape(len(coeffs), modes)
        coeffs, amps = _merge(coeffs, amps, TERM_TOL)
        if prune is not None:
            keep = np.abs(coeffs) >= prune
            coeffs, amps = coeffs[keep], amps[keep]
        coeffs.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "modes", int(modes))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amps", amps)

    def __setattr__(self, name, value):
        raise AttributeError("CoherentSum is immutable")

    @classmethod
    def from_terms(cls, modes: int, terms: Iterable[CoherentTerm | tuple]) -> "CoherentSum":
        coeffs, amps = [], []
        for t in terms:
            c, a = (t.coeff, t.amps) if isinstance(t, CoherentTerm) else t
            if len(a) != modes:
                raise ContractViolation(f"term has {len(a)} amplitudes, expected {modes}")
            coeffs.append(c)
            amps.append(list(a))
        return cls(modes, coeffs, np.array(amps, dtype=CDTYPE).reshape(len(coeffs), modes))

    @classmethod
    def zero(cls, modes: int) -> "CoherentSum":
        return cls(modes, [], np.zeros((0, modes)))

    @property
    def terms(self) -> tuple[CoherentTerm, ...]:
        return tuple(
            CoherentTerm(complex(c), tuple(complex(x) for x in row))
            for c, row in zip(self.coeffs, self.amps)
        )

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"CoherentSum(modes={self.modes}, terms={len(self)})"

    def __add__(self, other: "CoherentSum") -> "CoherentSum":
        _check_modes(self, other)
        return CoherentSum(
            self.modes,
            np.concatenate([self.coeffs, other.coeffs]),
            np.concatenate([self.amps, other.amps]),
        )

    def __neg__(self) -> "CoherentSum":
        return CoherentSum(self.modes, -self.coeffs, self.amps)

    def __sub__(self, other: "CoherentSum") -> "CoherentSum":
        return self + (-other)

    def __mul__(self, scalar) -> "CoherentSum":
        return CoherentSum(self.modes, self.coeffs * CDTYPE(scalar), self.amps)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "CoherentSum":
        return CoherentSum(self.modes, self.coeffs / CDTYPE(scalar), self.amps)


def coherent(*amps, coeff=1.0) -> CoherentSum:
    """The product coherent state ``coeff * |amps[0]>|amps[1]>...``."""
    return CoherentSum(len(amps), [coeff], np.array([amps], dtype=CDTYPE))


def _check_modes(x: CoherentSum, y: CoherentSum) -> None:
    if x.modes != y.modes:
        raise ContractViolation(f"mode-count mismatch: {x.modes} vs {y.modes}")


def _check_mode(s: CoherentSum, mode: int) -> None:
    if not 0 <= mode < s.modes:
        raise ContractViolation(f"mode {mode} out of range for {s.modes}-mode state")


def overlap(a, b) -> complex:
    """Coherent-state overlap ``<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)``."""
    a, b = CDTYPE(a), CDTYPE(b)
    return complex(np.exp(-abs(a) ** 2 / 2 - abs(b) ** 2 / 2 + np.conj(a) * b))


def _log_overlap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise log-overlaps summed over modes: shape (len(a), len(b))."""
    aa = (np.abs(a) ** 2).sum(axis=1)
    bb = (np.abs(b) ** 2).sum(axis=1)
    return -aa[:, None] / 2 - bb[None, :] / 2 + np.conj(a) @ b.T


def inner_ld(x: CoherentSum, y: CoherentSum):
    """``<x|y>`` returned as an extended-precision scalar."""
    _check_modes(x, y)
    if len(x) == 0 or len(y) == 0:
        return CDTYPE(0)
    gram = np.exp(_log_overlap(x.amps, y.amps))
    return np.conj(x.coeffs) @ gram @ y.coeffs


def inner(x: CoherentSum, y: CoherentSum) -> complex:
    """Inner product ``<x|y>`` by Gram expansion over term pairs."""
    return complex(inner_ld(x, y))


def norm(x: CoherentSum) -> float:
    return math.sqrt(max(as_real(inner_ld(x, x), what="<x|x>"), 0.0))


def normalized(x: CoherentSum) -> CoherentSum:
    n = norm(x)
    if n == 0:
        raise ContractViolation("cannot normalize the zero state")
    return x / n


def distance(x: CoherentSum, y: CoherentSum) -> float:
    """``|| x - y ||``, computed on the merged difference so equal terms cancel exactly."""
    return norm(x - y)


def fidelity(x: CoherentSum, y: CoherentSum) -> float:
    """``|<x|y>|^2 / (<x|x><y|y>)``."""
    xy = inner_ld(x, y)
    xx = as_real(inner_ld(x, x))
    yy = as_real(inner_ld(y, y))
    return float(abs(xy) ** 2 / (xx * yy))


def tensor(*states: CoherentSum) -> CoherentSum:
    """Tensor product; modes are concatenated in argument order."""
    out = states[0]
    for s in states[1:]:
        coeffs = (out.coeffs[:, None] * s.coeffs[None, :]).reshape(-1)
        amps = np.concatenate(
            [
                np.repeat(out.amps, len(s), axis=0),
                np.tile(s.amps, (len(out), 1)),
            ],
            axis=1,
        )
        out = CoherentSum(out.modes + s.modes, coeffs, amps)
    return out


def append_vacuum(s: CoherentSum, count: int = 1) -> CoherentSum:
    amps = np.concatenate([s.amps, np.zeros((len(s), count), dtype=CDTYPE)], axis=1)
    return CoherentSum(s.modes + count, s.coeffs, amps)


def permute_modes(s: CoherentSum, order: Sequence[int]) -> CoherentSum:
    """New state whose mode ``i`` is old mode ``order[i]``."""
    if sorted(order) != list(range(s.modes)):
        raise ContractViolation(f"{order} is not a permutation of {s.modes} modes")
    return CoherentSum(s.modes, s.coeffs, s.amps[:, list(order)])


def apply_rotation(s: CoherentSum, mode: int, n: int, power: int) -> CoherentSum:
    """Apply ``U_N^power = exp(-2 pi i power a^dag a / N)`` to one mode.

    A rotation maps coherent states to coherent states with no extra phase,
    so only amplitudes change.
    """
    _check_mode(s, mode)
    amps = s.amps.copy()
    amps[:, mode] *= root_of_unity(power, n)
    return CoherentSum(s.modes, s.coeffs, amps)


def beam_splitter(s: CoherentSum, mode1: int, mode2: int, theta) -> CoherentSum:
    """Real two-port splitter ``(a, b) -> (cos t a - sin t b, sin t a + cos t b)``."""
    _check_mode(s, mode1)
    _check_mode(s, mode2)
    if mode1 == mode2:
        raise ContractViolation("beam splitter needs two distinct modes")
    c, sn = np.cos(RDTYPE(theta)), np.sin(RDTYPE(theta))
    amps = s.amps.copy()
    a, b = s.amps[:, mode1], s.amps[:, mode2]
    amps[:, mode1] = c * a - sn * b
    amps[:, mode2] = sn * a + c * b
    return CoherentSum(s.modes, s.coeffs, amps)


def beam_split_50(s: CoherentSum, mode_in1: int, mode_in2: int) -> CoherentSum:
    """Balanced splitter: ``(a, b) -> ((a - b)/sqrt2, (a + b)/sqrt2)``.

    The first output is the difference port (G-type), the second the sum
    port (H-type).  This is the single splitter convention used throughout.
    """
    return beam_splitter(s, mode_in1, mode_in2, np.arccos(RDTYPE(-1)) / 4)


def dilute(s: CoherentSum, mode: int, copies: int) -> CoherentSum:
    """Split ``mode`` into ``copies`` modes of amplitude ``a / sqrt(copies)``.

    The first copy stays at index ``mode``; the other ``copies - 1`` are
    appended after the existing modes, in order.  Equivalent to mixing the
    mode with ``copies - 1`` vacuum ancillas on a splitter cascade.
    """
    _check_mode(s, mode)
    if copies < 1:
        raise ContractViolation("dilution needs at least one copy")
    part = s.amps[:, mode] / np.sqrt(RDTYPE(copies))
    amps = np.concatenate(
        [s.amps, np.repeat(part[:, None], copies - 1, axis=1)], axis=1
    )
    amps[:, mode] = part
    return CoherentSum(s.modes + copies - 1, s.coeffs, amps)


class Projector(enum.Enum):
    IDENTITY = "identity"
    VACUUM = "vacuum"
    NONVACUUM = "nonvacuum"


@dataclass(frozen=True)
class ExactCount:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ContractViolation("photon count must be non-negative")


Selector = Projector | ExactCount


@dataclass(frozen=True)
class ModePattern:
    """Per-mode product of photon-number projectors."""

    selectors: tuple[Selector, ...]

    @classmethod
    def of(cls, *selectors: Selector) -> "ModePattern":
        return cls(tuple(selectors))

    def __len__(self) -> int:
        return len(self.selectors)


def _mode_factor(sel: Selector, a: np.ndarray, b: np.ndarray, z) -> np.ndarray:
    """Pairwise factor ``<a| sel z^{n} |b>`` for bra amplitudes ``a`` and ket ``b``."""
    damp = np.exp(-(np.abs(a[:, None]) ** 2 + np.abs(b[None, :]) ** 2) / 2)
    x = np.conj(a)[:, None] * b[None, :] * z
    if sel is Projector.IDENTITY:
        return damp * np.exp(x)
    if sel is Projector.VACUUM:
        return damp.astype(CDTYPE)
    if sel is Projector.NONVACUUM:
        # exp(x) - 1 without cancellation at small |x|
        return damp * _expm1(x)
    if isinstance(sel, ExactCount):
        return damp * x**sel.n / RDTYPE(math.factorial(sel.n))
    raise ContractViolation(f"unknown selector {sel!r}")


def _expm1(x: np.ndarray) -> np.ndarray:
    small = np.abs(x) < 1e-3
    out = np.exp(x) - 1
    if np.any(small):
        xs = x[small]
        # Taylor series to x^7 is exact to ~1e-24 for |x| < 1e-3
        acc = np.zeros_like(xs)
        for k in range(7, 0, -1):
            acc = (acc + 1) * xs / RDTYPE(k)
        out[small] = acc
    return out


def pattern_generating_function(s: CoherentSum, pat: ModePattern, weights=None):
    """``<s| prod_j sel_j z_j^{n_j} |s>`` with per-mode complex weights ``z_j``.

    With all weights 1 this is the pattern expectation; with roots of unity it
    feeds residue filters on total photon counts.  Returned in extended precision.
    """
    if len(pat) != s.modes:
        raise ContractViolation(f"pattern has {len(pat)} selectors for {s.modes} modes")
    if len(s) == 0:
        return CDTYPE(0)
    if weights is None:
        weights = [1] * s.modes
    acc = np.ones((len(s), len(s)), dtype=CDTYPE)
    for j, sel in enumerate(pat.selectors):
        acc *= _mode_factor(sel, s.amps[:, j], s.amps[:, j], CDTYPE(weights[j]))
    return np.conj(s.coeffs) @ acc @ s.coeffs


def pattern_expectation(s: CoherentSum, pat: ModePattern) -> float:
    """Probability-like expectation ``<s| prod_j sel_j |s>``, clamped to ``[0, 1 + 1e-12]``."""
    val = as_real(pattern_generating_function(s, pat), what="pattern expectation")
    return min(max(val, 0.0), 1.0 + 1e-12)


def reduced_matrix(s: CoherentSum, keep: int, basis: Sequence[CoherentSum]) -> np.ndarray:
    """Matrix ``<e_i| Tr_{other modes} |s><s| |e_j>`` for single-mode basis states ``e``."""
    _check_mode(s, keep)
    others = [j for j in range(s.modes) if j != keep]
    a = s.amps[:, keep : keep + 1]
    rest = s.amps[:, others]
    # <rest_j | rest_i> weights the ket term i against bra term j
    trace_w = np.exp(_log_overlap(rest, rest)).T
    proj = np.stack(
        [np.conj(e.coeffs) @ np.exp(_log_overlap(e.amps, a)) for e in basis]
    )  # <e_k | a_i>
    weighted = proj * s.coeffs[None, :]
    rho = weighted @ trace_w @ np.conj(weighted).T
    return rho.astype(np.complex128)
