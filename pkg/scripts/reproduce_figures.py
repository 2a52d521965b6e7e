"""Write the Schmidt-spectrum, entropy-sweep and success-probability tables as CSV.

    python3 scripts/reproduce_figures.py --outdir results/
"""

import argparse
import pathlib
import sys

from quasibell import cli

JOBS = {
    "schmidt_n8_a1.csv": ["schmidt", "--n", "8", "--alpha", "1"],
    "schmidt_n8_a2.csv": ["schmidt", "--n", "8", "--alpha", "2"],
    "entropy_n4.csv": ["entanglement", "--n", "4", "--alpha-range", "0.05:4:0.05"],
    "entropy_n8.csv": ["entanglement", "--n", "8", "--alpha-range", "0.05:4:0.05"],
    "psuccess_n2.csv": ["psuccess", "--n", "2"],
    "psuccess_n4.csv": ["psuccess", "--n", "4"],
    "psuccess_n8.csv": ["psuccess", "--n", "8"],
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in JOBS.items():
        code = cli.main(argv + ["--out", str(out / name)])
        if code:
            print(f"{name}: exit {code}", file=sys.stderr)
            return code
        print(f"wrote {out / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
