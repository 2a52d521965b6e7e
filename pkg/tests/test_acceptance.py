"""End-to-end acceptance checks, one test per criterion.

Each test gathers its worst-case deviation over the stated grid and reports a
single PASS/FAIL line (collected in the ``acceptance criteria`` section of the
terminal summary).
"""

import math

import numpy as np
from scipy.optimize import brentq

from quasibell import cli
from quasibell.circle import CircleConfig, pseudo_phase, rics, rics_coordinates
from quasibell.coherent_algebra import apply_rotation, fidelity, inner, pattern_expectation
from quasibell.fock_validate import cutoff_for, measurement_statistics, schmidt_via_svd, to_fock
from quasibell.gqbs import g1_tilde, generalized_bell, gqbs_state, schmidt_coeffs, schmidt_via_rics
from quasibell.teleport import (
    QuditCoeffs,
    _class_probability,
    bob_state_residue,
    class_pattern,
    joint_state,
    normalize_input,
    success_classes,
    success_probability_closed,
    success_probability_vanenk,
    teleport_report,
)


def test_01_rics_orthonormality(criterion):
    worst_gram = worst_fock = 0.0
    for n in [2, 3, 4, 8]:
        for a in [0.5, 1.0, 2.0]:
            cfg = CircleConfig(n, a)
            cut = cutoff_for(a, 1e-12)
            states = [rics(cfg, q) for q in range(n)]
            fock = np.array([to_fock(s, cut).coeffs for s in states])
            g = np.array([[inner(x, y) for y in states] for x in states])
            f = fock.conj() @ fock.T
            worst_gram = max(worst_gram, np.abs(g - np.eye(n)).max())
            worst_fock = max(worst_fock, np.abs(f - np.eye(n)).max())
    criterion(
        "1 RICS orthonormality",
        worst_gram < 1e-10 and worst_fock < 1e-8,
        f"gram {worst_gram:.2e} (<1e-10), fock {worst_fock:.2e} (<1e-8)",
    )


def test_02_schmidt_consistency(criterion):
    worst_sum = 0.0
    for n in [2, 3, 4, 8, 16]:
        for a in [0.3, 0.5, 1.0, 2.0, 4.0]:
            cfg = CircleConfig(n, a)
            for q in range(n):
                worst_sum = max(worst_sum, abs(math.fsum(schmidt_coeffs(cfg, q).lambdas) - 1))
    worst_svd = 0.0
    for n in [2, 4, 8]:
        for a in [1.0, 2.0]:
            cfg = CircleConfig(n, a)
            cut = cutoff_for(a, 1e-12)
            for q in range(n):
                want = np.sort(schmidt_coeffs(cfg, q).lambdas)[::-1]
                want = want[want >= 1e-14]
                for p in {0, 1, n - 1}:
                    got = schmidt_via_svd(gqbs_state(cfg, q, p), cut)
                    dev = np.abs(got - want).max() if got.shape == want.shape else math.inf
                    worst_svd = max(worst_svd, dev)
    criterion(
        "2 Schmidt consistency",
        worst_sum < 1e-12 and worst_svd < 1e-8,
        f"sum {worst_sum:.2e} (<1e-12), svd multiset {worst_svd:.2e} (<1e-8)",
    )


def test_03_entropy_profiles(criterion):
    e1 = [schmidt_coeffs(CircleConfig(8, 1.0), q).entropy for q in range(8)]
    e2 = [schmidt_coeffs(CircleConfig(8, 2.0), q).entropy for q in range(8)]
    ok = (
        int(np.argmax(e1)) == 7
        and e1[0] == min(e1)
        and int(np.argmax(e2)) == 3
        and 2.96 <= e2[3] <= 2.98
    )
    criterion(
        "3 entropy profiles",
        ok,
        f"|a|=1 argmax {int(np.argmax(e1))} argmin {int(np.argmin(e1))}; "
        f"|a|=2 argmax {int(np.argmax(e2))} E={e2[3]:.4f}",
    )


def test_04_success_curve(criterion):
    def crossing(n):
        return brentq(lambda a: success_probability_closed(CircleConfig(n, a)) - 0.2, 0.3, 6.0)

    x4, x8 = crossing(4), crossing(8)
    dev2 = max(
        abs(success_probability_closed(CircleConfig(2, a)) - (1 - math.exp(-2 * a * a)) / (1 + math.exp(-4 * a * a)))
        for a in np.linspace(0.05, 4, 80)
    )
    top = {n: success_probability_closed(CircleConfig(n, float(n))) for n in [2, 4]}
    ok = 1.05 <= x4 <= 1.25 and 2.9 <= x8 <= 3.3 and dev2 < 1e-12 and all(1 - v < 1e-3 for v in top.values())
    criterion(
        "4 success-probability curve",
        ok,
        f"N=4 crossing {x4:.4f}, N=8 crossing {x8:.4f}, N=2 reduction {dev2:.1e}, "
        f"P(N=2,|a|=2)={top[2]:.6f}, P(N=4,|a|=4)={top[4]:.6f}",
    )


def test_05_protocol_oracle(criterion):
    worst = 0.0
    for n in [2, 4, 8]:
        for a in [0.3, 1.0, 2.0]:
            cfg = CircleConfig(n, a)
            joint = joint_state(cfg, QuditCoeffs.basis(n), 0, 0)
            closed = success_probability_closed(cfg)
            for cls in success_classes(cfg):
                worst = max(worst, abs(n * _class_probability(joint, cfg, cls) - closed))
    cfg = CircleConfig(2, 0.6)
    probs, _ = measurement_statistics(joint_state(cfg, QuditCoeffs.basis(2), 0, 0), 0, 30)
    fock = probs[0, 1:].sum() + probs[1:, 0].sum()
    dev_fock = abs(fock - success_probability_closed(cfg))
    criterion(
        "5 protocol oracle equivalence",
        worst < 1e-10 and dev_fock < 1e-6,
        f"gram {worst:.2e} (<1e-10), fock enumeration {dev_fock:.2e} (<1e-6)",
    )


def test_06_outcome_completeness(criterion):
    rng = np.random.default_rng(606)
    worst_sum = worst_blank = 0.0
    cases = [(2, 0.6), (4, 1.0), (4, 0.3), (8, 2.0)]
    for n, a in cases:
        cfg = CircleConfig(n, a)
        inputs = [QuditCoeffs.basis(n)]
        if n <= 4:
            inputs.append(normalize_input(cfg, QuditCoeffs(tuple(rng.normal(size=n) + 1j * rng.normal(size=n)))))
        for qd in inputs:
            joint = joint_state(cfg, qd, 0, 1 % n)
            total = sum(_class_probability(joint, cfg, c) for c in success_classes(cfg))
            fail = 1 - total
            direct = [pattern_expectation(joint, class_pattern(cfg, c)) for c in success_classes(cfg)]
            worst_sum = max(worst_sum, abs(math.fsum(direct) + fail - 1))
            worst_blank = max(worst_blank, abs(pattern_expectation(joint, class_pattern(cfg, None))))
    criterion(
        "6 outcome completeness",
        worst_sum < 1e-10 and worst_blank < 1e-12,
        f"sum {worst_sum:.2e} (<1e-10), all-click {worst_blank:.2e} (<1e-12)",
    )


def test_07_sector_exact_teleportation(criterion):
    rng = np.random.default_rng(707)
    worst_fid = 0.0
    worst_p = 0.0
    for _ in range(20):
        for n in [2, 4]:
            cfg = CircleConfig(n, 1.0)
            qd = normalize_input(cfg, QuditCoeffs(tuple(rng.normal(size=n) + 1j * rng.normal(size=n))))
            reports = [teleport_report(cfg, qd, 0, p) for p in range(n)]
            for rep in reports:
                for c in rep.classes:
                    worst_fid = max(worst_fid, 1 - c.residues[0].fidelity)
            ref = reports[0]
            for rep in reports[1:]:
                worst_p = max(worst_p, abs(rep.failure_probability - ref.failure_probability))
                for a, b in zip(rep.classes, ref.classes):
                    worst_p = max(worst_p, abs(a.probability - b.probability), abs(a.coarse_fidelity - b.coarse_fidelity))
                    for r in a.residues:
                        worst_p = max(worst_p, abs(a.residues[r].probability - b.residues[r].probability))
                        if a.residues[r].fidelity is not None:
                            worst_p = max(worst_p, abs(a.residues[r].fidelity - b.residues[r].fidelity))
    criterion(
        "7 sector-exact teleportation",
        worst_fid <= 1e-9 and worst_p < 1e-10,
        f"max 1-F(residue 0) {worst_fid:.2e} (<=1e-9), p-dependence {worst_p:.2e} (<1e-10)",
    )


def test_08_nonzero_q_witness(criterion):
    cfg = CircleConfig(4, 1.0)
    qd = normalize_input(cfg, QuditCoeffs((1, 1, 0, 0)))
    target = qd.state(cfg)
    best = 0.0
    for cls in success_classes(cfg):
        _, chi = bob_state_residue(cfg, qd, 1, 0, cls, 0)
        best = max(best, max(fidelity(target, apply_rotation(chi, 0, 4, k)) for k in range(4)))
    criterion("8 q!=0 non-correctability", best < 1 - 1e-3, f"best corrected fidelity {best:.4f} (<0.999)")


def test_09_basis_structure(criterion):
    worst_phi = worst_mub = worst_flat = worst_bell = 0.0
    for n in [2, 4, 8]:
        for a in [0.5, 1.0, 2.0]:
            cfg = CircleConfig(n, a)
            phis = [pseudo_phase(cfg, k) for k in range(n)]
            cs = [rics(cfg, q) for q in range(n)]
            g = np.array([[inner(x, y) for y in phis] for x in phis])
            m = np.array([[abs(inner(x, y)) ** 2 for y in cs] for x in phis])
            worst_phi = max(worst_phi, np.abs(g - np.eye(n)).max())
            worst_mub = max(worst_mub, np.abs(m - 1 / n).max())
            bells = [generalized_bell(cfg, q, p) for q in range(n) for p in range(n)]
            coords = np.array([rics_coordinates(cfg, b).ravel() for b in bells])
            worst_bell = max(worst_bell, np.abs(coords.conj() @ coords.T - np.eye(n * n)).max())
            for b in bells:
                worst_flat = max(worst_flat, np.abs(schmidt_via_rics(cfg, b) - 1 / n).max())
    ok = max(worst_phi, worst_mub, worst_flat, worst_bell) < 1e-10
    criterion(
        "9 pseudo-phase and Bell basis structure",
        ok,
        f"<phi|phi> {worst_phi:.2e}, |<phi|c>|^2 {worst_mub:.2e}, Bell flat {worst_flat:.2e}, "
        f"Bell orthonormal {worst_bell:.2e} (all <1e-10)",
    )


def test_10_unnormalized_success(criterion):
    cfg = CircleConfig(4, 2.0)
    dev_norm = abs(4 * g1_tilde(cfg, 0) - 1)
    pc, pv = success_probability_closed(cfg), success_probability_vanenk(cfg)
    rel = abs(pv - pc) / pc
    criterion("10 unnormalized success comparison", dev_norm < 0.01 and rel < 0.01, f"|N g1(0)-1| {dev_norm:.2e}, relative gap {rel:.2e}")


def test_11_determinism(criterion, tmp_path):
    configs = [
        ["schmidt", "--n", "8", "--alpha", "2"],
        ["entanglement", "--n", "8", "--alpha-range", "0.1:4:0.1"],
        ["psuccess", "--n", "4", "--format", "json"],
        ["teleport", "--n", "4", "--alpha", "1", "--input", "1,0,0.5,0.5,0,1,0.2,0", "--draws", "500", "--seed", "42"],
        ["teleport", "--n", "2", "--alpha", "0.6", "--draws", "100", "--seed", "7", "--format", "json"],
    ]
    mismatched = []
    path = tmp_path / "out.dat"
    for argv in configs:
        blobs = []
        for _ in range(2):
            code = cli.main(argv + ["--out", str(path)])
            blobs.append((code, path.read_bytes()))
        if blobs[0] != blobs[1] or blobs[0][0] != 0:
            mismatched.append(argv[0])
    criterion("11 CLI determinism", not mismatched, f"{len(configs) - len(mismatched)}/{len(configs)} configs byte-identical")
