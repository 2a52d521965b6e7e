"""Teleport a random circle-state qudit and print the per-class, per-residue outcome table."""

import argparse

import numpy as np

from quasibell.circle import CircleConfig
from quasibell.teleport import QuditCoeffs, normalize_input, sample_outcomes, teleport_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--q", type=int, default=0)
    ap.add_argument("--p", type=int, default=0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--draws", type=int, default=10_000)
    args = ap.parse_args()

    cfg = CircleConfig(args.n, args.alpha)
    rng = np.random.default_rng(args.seed)
    raw = QuditCoeffs(tuple(rng.normal(size=args.n) + 1j * rng.normal(size=args.n)))
    rep = teleport_report(cfg, normalize_input(cfg, raw), args.q, args.p)

    print(f"N={rep.n} |alpha0|={cfg.radius} q={rep.q} p={rep.p}")
    print(f"{'class':>7} {'P(class)':>11} {'F_coarse':>9}   residue: P / F")
    for c in rep.classes:
        cells = "  ".join(
            f"{r}:{v.probability:.4f}/{'-' if v.fidelity is None else f'{v.fidelity:.4f}'}"
            for r, v in sorted(c.residues.items())
        )
        print(f"{str(c.outcome):>7} {c.probability:11.6f} {c.coarse_fidelity:9.5f}   {cells}")
    print(f"success {rep.success_probability:.6f}  failure {rep.failure_probability:.6f}")

    draws = sample_outcomes(rep, args.seed, args.draws)
    hits = sum(d.outcome.kind != "failure" for d in draws)
    exact = sum(d.outcome.kind != "failure" and d.residue == rep.q for d in draws)
    print(f"{args.draws} draws: {hits} heralded successes, {exact} in the exact residue sector")


if __name__ == "__main__":
    main()
