"""Probabilistic teleportation of a circle-state qudit through a quasi-Bell resource.

Mode layout of the joint state after Alice's splitter network::

    0          Bob's mode B
    1 .. L     difference ports G_0 .. G_{L-1}
    L+1 .. 2L  sum ports H_0 .. H_{L-1}

with ``N = 2L``.  Every coherent term of the joint state has exactly one
measured mode with zero amplitude; a run succeeds when exactly one measured
mode is found empty.

Heralded Bob states are resolved by the residue ``c`` of the total measured
photon count modulo ``N``.  Within a success class all surviving terms carry
measured amplitudes that differ only by a common root of unity
``exp(-2 pi i s_t / N)``, so a count pattern with total ``n`` multiplies term
``t`` by ``exp(-2 pi i s_t n / N)``: the residue sector is pure, and for
``c == q`` the corrected state equals the input exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .circle import CircleConfig, _label, circular_state
from .coherent_algebra import (
    CDTYPE,
    CoherentSum,
    ContractViolation,
    ModePattern,
    Projector,
    apply_rotation,
    as_real,
    beam_split_50,
    dilute,
    fidelity,
    inner_ld,
    pattern_expectation,
    pattern_generating_function,
    permute_modes,
    root_of_unity,
    tensor,
)
from .gqbs import g1_tilde, gqbs_state

SURVIVAL_TOL = 1e-9
NORM_TOL = 1e-10


class DegenerateInputError(ValueError):
    """The requested qudit has (numerically) zero norm."""


class UnsupportedProtocolError(ValueError):
    """The protocol needs an even number of circle components."""


class InvariantViolation(AssertionError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"invariant '{name}' violated: {detail}")
        self.name = name


def _half(cfg: CircleConfig) -> int:
    if cfg.n % 2:
        raise UnsupportedProtocolError(f"teleportation needs even N, got {cfg.n}")
    return cfg.n // 2


@dataclass(frozen=True)
class QuditCoeffs:
    """Coefficients ``Q_l`` of ``sum_l Q_l |alpha_l>`` in the non-orthogonal circle basis."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not any(c != 0 for c in self.coeffs):
            raise DegenerateInputError("all qudit coefficients are zero")

    @classmethod
    def basis(cls, n: int, l: int = 0) -> "QuditCoeffs":
        return cls(tuple(1.0 if j == l else 0.0 for j in range(n)))

    def state(self, cfg: CircleConfig) -> CoherentSum:
        return circular_state(cfg, np.array(self.coeffs))


def gram_norm_sq(cfg: CircleConfig, q: QuditCoeffs) -> float:
    s = q.state(cfg)
    return as_real(inner_ld(s, s), what="qudit norm")


def normalize_input(cfg: CircleConfig, raw: QuditCoeffs) -> QuditCoeffs:
    if len(raw.coeffs) != cfg.n:
        raise ContractViolation(f"need {cfg.n} coefficients, got {len(raw.coeffs)}")
    nsq = gram_norm_sq(cfg, raw)
    if nsq <= 1e-12:
        raise DegenerateInputError(f"qudit norm^2 = {nsq:.3e} is too small")
    scale = 1 / math.sqrt(nsq)
    return QuditCoeffs(tuple(c * scale for c in raw.coeffs))


def _require_normalized(cfg: CircleConfig, q: QuditCoeffs) -> None:
    if len(q.coeffs) != cfg.n:
        raise ContractViolation(f"need {cfg.n} coefficients, got {len(q.coeffs)}")
    nsq = gram_norm_sq(cfg, q)
    if abs(nsq - 1) > NORM_TOL:
        raise ContractViolation(f"input not normalized (norm^2 = {nsq!r}); use normalize_input")


@dataclass(frozen=True)
class OutcomeClass:
    """Which measured port was found empty; ``kind`` is ``"G"``, ``"H"`` or ``"failure"``."""

    kind: Literal["G", "H", "failure"]
    j: int | None = None

    @classmethod
    def empty_g(cls, j: int) -> "OutcomeClass":
        return cls("G", j)

    @classmethod
    def empty_h(cls, j: int) -> "OutcomeClass":
        return cls("H", j)

    @classmethod
    def failure(cls) -> "OutcomeClass":
        return cls("failure")

    def __str__(self) -> str:
        return "failure" if self.kind == "failure" else f"{self.kind}{self.j}"

    @classmethod
    def parse(cls, text: str) -> "OutcomeClass":
        if text == "failure":
            return cls.failure()
        return cls(text[0], int(text[1:]))  # type: ignore[arg-type]

    def mode_index(self, half: int) -> int:
        if self.kind == "failure":
            raise ContractViolation("failure has no empty mode")
        if not 0 <= self.j < half:
            raise ContractViolation(f"port index {self.j} outside 0..{half - 1}")
        return 1 + self.j if self.kind == "G" else 1 + half + self.j


def success_classes(cfg: CircleConfig) -> list[OutcomeClass]:
    half = _half(cfg)
    return [OutcomeClass.empty_g(j) for j in range(half)] + [
        OutcomeClass.empty_h(j) for j in range(half)
    ]


def joint_state(cfg: CircleConfig, qudit: QuditCoeffs, q: int, p: int) -> CoherentSum:
    """Resource, input and Alice's splitter network; modes ordered B, G_0.., H_0..."""
    half = _half(cfg)
    n = cfg.n
    _require_normalized(cfg, qudit)
    s = tensor(gqbs_state(cfg, q, p), qudit.state(cfg))  # A, B, C
    s = dilute(s, 0, half)
    a_modes = [0] + list(range(3, half + 2))
    s = dilute(s, 2, half)
    c_modes = [2] + list(range(half + 2, 2 * half + 1))
    for k, mode in enumerate(a_modes):
        s = apply_rotation(s, mode, n, k)
    for c_mode, a_mode in zip(c_modes, a_modes):
        s = beam_split_50(s, c_mode, a_mode)  # C_k -> G_k, A_k -> H_k
    return permute_modes(s, [1] + c_modes + a_modes)


def class_pattern(cfg: CircleConfig, cls: OutcomeClass | None) -> ModePattern:
    """Identity on B, vacuum on the empty port, non-vacuum elsewhere (``None``: no empty port)."""
    half = _half(cfg)
    sels = [Projector.IDENTITY] + [Projector.NONVACUUM] * (2 * half)
    if cls is not None:
        sels[cls.mode_index(half)] = Projector.VACUUM
    return ModePattern(tuple(sels))


def _class_probability(joint: CoherentSum, cfg: CircleConfig, cls: OutcomeClass) -> float:
    if cls.kind == "failure":
        return 1.0 - sum(pattern_expectation(joint, class_pattern(cfg, c)) for c in success_classes(cfg))
    return pattern_expectation(joint, class_pattern(cfg, cls))


def class_probability(
    cfg: CircleConfig, qudit: QuditCoeffs, q: int, p: int, cls: OutcomeClass
) -> float:
    """Probability of a heralding class by full Gram expansion of the projector pattern."""
    return _class_probability(joint_state(cfg, qudit, q, p), cfg, cls)


def no_empty_probability(cfg: CircleConfig, qudit: QuditCoeffs, q: int, p: int) -> float:
    """Probability that every measured port clicks; identically zero."""
    return pattern_expectation(joint_state(cfg, qudit, q, p), class_pattern(cfg, None))


def residue_probability_gram(
    joint: CoherentSum, cfg: CircleConfig, cls: OutcomeClass, residue: int
) -> float:
    """Residue-sector probability from the full joint state by a roots-of-unity filter."""
    n = cfg.n
    pat = class_pattern(cfg, cls)
    acc = CDTYPE(0)
    for r in range(n):
        z = np.conj(root_of_unity(r, n))  # exp(+2 pi i r / N)
        acc += root_of_unity(r * residue, n) * pattern_generating_function(
            joint, pat, [1] + [z] * n
        )
    return as_real(acc / n, what="residue probability")


def success_probability_closed(cfg: CircleConfig) -> float:
    """Closed-form success probability for a circle basis input and the ``q = p = 0`` resource."""
    n = cfg.n
    _half(cfg)
    pts = cfg.points().astype(np.complex128)
    prod = math.prod(1 - math.exp(-abs(pts[0] - pts[l]) ** 2 / n) for l in range(1, n))
    return prod / (n * g1_tilde(cfg, 0))


def success_probability_vanenk(cfg: CircleConfig) -> float:
    """The same product without the resource normalization factor."""
    n = cfg.n
    _half(cfg)
    pts = cfg.points().astype(np.complex128)
    return math.prod(1 - math.exp(-abs(pts[0] - pts[l]) ** 2 / n) for l in range(1, n))


def correction_power(cls: OutcomeClass, p: int, half: int) -> int:
    """Rotation power Bob applies after being told the empty port."""
    n = 2 * half
    if cls.kind == "failure":
        raise ContractViolation("no correction exists for a failed run")
    if cls.kind == "H":
        return (cls.j - p - half) % n
    return (cls.j - p) % n


@dataclass(frozen=True)
class _Sector:
    """Surviving terms of one success class, reduced to Bob's mode."""

    bob_amps: np.ndarray  # (T,)
    coeffs: np.ndarray  # (T,)
    shifts: np.ndarray  # (T,) integer s_t of the common root of unity
    means: np.ndarray  # Poisson means of the clicking ports


def _sector(joint: CoherentSum, cfg: CircleConfig, cls: OutcomeClass) -> _Sector:
    n = cfg.n
    half = n // 2
    empty = cls.mode_index(half)
    clicking = [j for j in range(1, n + 1) if j != empty]
    amps = joint.amps
    alive = np.abs(amps[:, empty]) <= SURVIVAL_TOL
    if not np.any(alive):
        empty_c = np.zeros(0, dtype=CDTYPE)
        return _Sector(empty_c, empty_c, np.zeros(0, dtype=int), np.zeros(n - 1))
    meas = amps[alive][:, clicking]
    ref = meas[0]
    if np.any(np.abs(ref) <= SURVIVAL_TOL):
        raise InvariantViolation("unique-empty-port", "surviving term has a second vacuum port")
    ratio = meas / ref[None, :]
    u = ratio[:, 0]
    if np.max(np.abs(ratio - u[:, None])) > 1e-10:
        raise InvariantViolation("common-phase", "clicking amplitudes differ by more than a phase")
    shifts = np.mod(np.rint(-np.angle(u.astype(np.complex128)) * n / (2 * math.pi)), n).astype(int)
    if np.max(np.abs(u - root_of_unity(shifts, n))) > 1e-10:
        raise InvariantViolation("root-of-unity", "term phases are not N-th roots of unity")
    # vacuum factor of the (numerically) empty port, ~1
    vac = np.exp(-np.abs(amps[alive][:, empty]) ** 2 / 2)
    return _Sector(
        bob_amps=amps[alive][:, 0],
        coeffs=joint.coeffs[alive] * vac,
        shifts=shifts,
        means=(np.abs(ref) ** 2).astype(float),
    )


def clicking_residue_weights(means, n: int) -> np.ndarray:
    """``P(all X_j >= 1 and sum X_j = c mod n)`` for independent ``X_j ~ Poisson(means_j)``."""
    means = np.asarray(means, dtype=float)
    out = np.zeros(n)
    for c in range(n):
        acc = 0j
        for r in range(n):
            z = complex(np.exp(2j * math.pi * r / n))
            acc += np.exp(-2j * math.pi * r * c / n) * np.prod(
                np.exp(-means) * (np.exp(means * z) - 1)
                if r
                else -np.expm1(-means)
            )
        out[c] = (acc / n).real
    return np.clip(out, 0.0, None)


def _residue_state(sector: _Sector, n: int, residue: int) -> CoherentSum:
    return CoherentSum(1, sector.coeffs * root_of_unity(sector.shifts * residue, n), sector.bob_amps[:, None])


def _bob_residue(joint, cfg, cls, residue):
    sector = _sector(joint, cfg, cls)
    if len(sector.coeffs) == 0:
        return 0.0, CoherentSum.zero(1)
    w = clicking_residue_weights(sector.means, cfg.n)[residue % cfg.n]
    chi = _residue_state(sector, cfg.n, residue % cfg.n)
    nsq = as_real(inner_ld(chi, chi), what="<chi|chi>")
    prob = w * nsq
    if nsq <= 0:
        return prob, chi
    return prob, chi / math.sqrt(nsq)


def bob_state_residue(
    cfg: CircleConfig, qudit: QuditCoeffs, q: int, p: int, cls: OutcomeClass, residue: int
) -> tuple[float, CoherentSum]:
    """Probability and normalized (uncorrected) Bob state for a class and photon-count residue."""
    return _bob_residue(joint_state(cfg, qudit, q, p), cfg, cls, residue)


def corrected(state: CoherentSum, cfg: CircleConfig, cls: OutcomeClass, p: int) -> CoherentSum:
    return apply_rotation(state, 0, cfg.n, correction_power(cls, p, cfg.n // 2))


@dataclass(frozen=True)
class CoherentDensity:
    """Single-mode operator ``sum_{tt'} R[t, t'] |b_t><b_t'|`` on coherent dyads."""

    amps: np.ndarray
    matrix: np.ndarray

    def _gram(self):
        a = self.amps
        return np.exp(-np.abs(a[:, None]) ** 2 / 2 - np.abs(a[None, :]) ** 2 / 2 + np.conj(a)[:, None] * a[None, :])

    def trace(self) -> float:
        # Tr |b_t><b_t'| = <b_t'|b_t>
        return as_real(np.sum(self.matrix * self._gram().T), what="trace")

    def expectation(self, psi: CoherentSum) -> float:
        """``<psi| rho |psi>``."""
        a = self.amps
        proj = np.conj(psi.coeffs) @ np.exp(
            -np.abs(psi.amps[:, 0:1]) ** 2 / 2 - np.abs(a[None, :]) ** 2 / 2 + np.conj(psi.amps[:, 0:1]) * a[None, :]
        )  # <psi|b_t>
        return as_real(proj @ self.matrix @ np.conj(proj), what="<psi|rho|psi>")

    def rotated(self, n: int, power: int) -> "CoherentDensity":
        return CoherentDensity(self.amps * root_of_unity(power, n), self.matrix)


def _coarse_density(joint, cfg, cls) -> CoherentDensity:
    n = cfg.n
    sector = _sector(joint, cfg, cls)
    u = root_of_unity(sector.shifts, n).astype(np.complex128)
    phase = u[:, None] * np.conj(u)[None, :]
    kernel = np.ones_like(phase)
    for mu in sector.means:
        kernel *= np.exp(-mu) * (np.exp(mu * phase) - 1)
    c = sector.coeffs.astype(np.complex128)
    mat = c[:, None] * np.conj(c)[None, :] * kernel
    rho = CoherentDensity(sector.bob_amps, mat)
    return CoherentDensity(rho.amps, mat / rho.trace())


def bob_density_coarse(
    cfg: CircleConfig, qudit: QuditCoeffs, q: int, p: int, cls: OutcomeClass
) -> CoherentDensity:
    """Bob's state heralded by the class alone, mixing all photon-count outcomes (uncorrected)."""
    return _coarse_density(joint_state(cfg, qudit, q, p), cfg, cls)


def residue_mixture(cfg, qudit, q, p, cls) -> CoherentDensity:
    """``sum_c P(c) |psi_c><psi_c|`` on the same dyad basis as ``bob_density_coarse``."""
    joint = joint_state(cfg, qudit, q, p)
    sector = _sector(joint, cfg, cls)
    weights = clicking_residue_weights(sector.means, cfg.n)
    mat = np.zeros((len(sector.coeffs),) * 2, dtype=complex)
    for c in range(cfg.n):
        v = (sector.coeffs * root_of_unity(sector.shifts * c, cfg.n)).astype(np.complex128)
        mat += weights[c] * np.outer(v, np.conj(v))
    rho = CoherentDensity(sector.bob_amps, mat)
    return CoherentDensity(rho.amps, mat / rho.trace())


@dataclass(frozen=True)
class ResidueOutcome:
    probability: float
    fidelity: float | None


@dataclass(frozen=True)
class ClassOutcome:
    outcome: OutcomeClass
    probability: float
    coarse_fidelity: float
    residues: dict[int, ResidueOutcome] = field(default_factory=dict)


@dataclass(frozen=True)
class TeleportReport:
    n: int
    alpha0: complex
    q: int
    p: int
    input: tuple[complex, ...]
    classes: tuple[ClassOutcome, ...]
    failure_probability: float

    @property
    def success_probability(self) -> float:
        return math.fsum(c.probability for c in self.classes)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha0": [self.alpha0.real, self.alpha0.imag],
            "q": self.q,
            "p": self.p,
            "input": [[c.real, c.imag] for c in self.input],
            "classes": [
                {
                    "class": str(c.outcome),
                    "probability": c.probability,
                    "coarse_fidelity": c.coarse_fidelity,
                    "residues": [
                        {"residue": r, "probability": v.probability, "fidelity": v.fidelity}
                        for r, v in sorted(c.residues.items())
                    ],
                }
                for c in self.classes
            ],
            "success_probability": self.success_probability,
            "failure_probability": self.failure_probability,
        }


def teleport_report(cfg: CircleConfig, qudit: QuditCoeffs, q: int, p: int) -> TeleportReport:
    """Tabulate every heralding class, its residue sectors and the corrected fidelities."""
    q, p = _label(cfg, q), _label(cfg, p, "p")
    n = cfg.n
    joint = joint_state(cfg, qudit, q, p)
    target = qudit.state(cfg)

    blank = pattern_expectation(joint, class_pattern(cfg, None))
    if blank > 1e-12:
        raise InvariantViolation("no-all-click", f"all-click probability {blank:.3e}")

    classes = []
    for cls in success_classes(cfg):
        prob = _class_probability(joint, cfg, cls)
        residues = {}
        for c in range(n):
            pc, chi = _bob_residue(joint, cfg, cls, c)
            fid = fidelity(target, corrected(chi, cfg, cls, p)) if pc > 0 else None
            residues[c] = ResidueOutcome(pc, fid)
        resid_total = math.fsum(r.probability for r in residues.values())
        if abs(resid_total - prob) > 1e-10:
            raise InvariantViolation(
                "residue-partition", f"{cls}: residues sum to {resid_total!r}, class {prob!r}"
            )
        rho = _coarse_density(joint, cfg, cls).rotated(n, correction_power(cls, p, n // 2))
        coarse = rho.expectation(target) if prob > 0 else 0.0
        classes.append(ClassOutcome(cls, prob, coarse, residues))

    failure = 1.0 - math.fsum(c.probability for c in classes)
    report = TeleportReport(n, cfg.alpha0, q, p, qudit.coeffs, tuple(classes), failure)
    _check_report(report)
    return report


def _check_report(report: TeleportReport) -> None:
    probs = [c.probability for c in report.classes] + [report.failure_probability]
    if min(probs) < -1e-12:
        raise InvariantViolation("non-negative", f"negative probability {min(probs)!r}")
    for c in report.classes:
        fids = [c.coarse_fidelity] + [r.fidelity for r in c.residues.values() if r.fidelity is not None]
        if any(f < -1e-12 or f > 1 + 1e-12 for f in fids):
            raise InvariantViolation("fidelity-range", f"{c.outcome}: {fids}")


@dataclass(frozen=True)
class Draw:
    outcome: OutcomeClass
    residue: int | None


def sample_outcomes(report: TeleportReport, seed: int, draws: int) -> list[Draw]:
    """Seeded draws of (class, residue) from the exact outcome distribution."""
    events: list[Draw] = []
    probs: list[float] = []
    for c in report.classes:
        for r, v in sorted(c.residues.items()):
            events.append(Draw(c.outcome, r))
            probs.append(v.probability)
    events.append(Draw(OutcomeClass.failure(), None))
    probs.append(report.failure_probability)
    weights = np.clip(np.array(probs), 0.0, None)
    weights /= weights.sum()
    rng = np.random.default_rng(seed)
    return [events[i] for i in rng.choice(len(events), size=draws, p=weights)]


def sample_outcome_class(report: TeleportReport, seed: int) -> Draw:
    return sample_outcomes(report, seed, 1)[0]
