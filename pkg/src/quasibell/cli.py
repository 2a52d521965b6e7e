"""Command-line front end: figure data for Schmidt spectra, entropy sweeps, success curves, teleport reports.

Exit codes: 0 success, 1 usage error, 2 invariant violation, 3 I/O error.
"""

from __future__ import annotations

import argparse
import cmath
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .circle import CircleConfig
from .coherent_algebra import ContractViolation
from .gqbs import schmidt_coeffs
from .teleport import (
    DegenerateInputError,
    InvariantViolation,
    QuditCoeffs,
    UnsupportedProtocolError,
    normalize_input,
    sample_outcomes,
    success_probability_closed,
    success_probability_vanenk,
    teleport_report,
)

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3
DEFAULT_RANGE = (0.05, 4.0, 0.05)

SCHMIDT_COLUMNS = ["N", "alpha_abs", "q", "k", "lambda", "entropy"]
SWEEP_COLUMNS = ["N", "alpha_abs", "q", "entropy"]
PSUCCESS_COLUMNS = ["N", "alpha_abs", "p_closed", "p_vanenk"]
TELEPORT_COLUMNS = ["record", "index", "class", "residue", "probability", "fidelity"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: int
    alpha: complex = 1.0
    q: int = 0
    p: int = 0
    input: list[complex] | None = None
    alpha_range: tuple[float, float, float] = DEFAULT_RANGE
    format: str = "csv"
    out: str | None = None
    seed: int = 0
    draws: int = 0
    notes: list[str] = field(default_factory=list)

    def echo(self) -> dict:
        d = asdict(self)
        d["alpha"] = [self.alpha.real, self.alpha.imag]
        if self.input is not None:
            d["input"] = [[c.real, c.imag] for c in self.input]
        d["alpha_range"] = list(self.alpha_range)
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_alpha(text: str) -> complex:
    """``mod[:phase]`` with the phase in radians."""
    parts = text.split(":")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"bad alpha '{text}'")
    mod = float(parts[0])
    phase = float(parts[1]) if len(parts) == 2 else 0.0
    if mod <= 0:
        raise argparse.ArgumentTypeError("alpha modulus must be positive")
    return mod * cmath.exp(1j * phase) if phase else complex(mod)


def parse_range(text: str) -> tuple[float, float, float]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range '{text}', want start:stop:step") from None
    if step <= 0:
        raise argparse.ArgumentTypeError("sweep step must be positive")
    return start, stop, step


def parse_input(text: str) -> list[complex]:
    """Comma list of ``re,im`` pairs, or of ``mod:phase`` tokens when colons are present."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    try:
        if any(":" in t for t in tokens):
            out = []
            for t in tokens:
                mod, phase = (float(x) for x in t.split(":"))
                out.append(mod * cmath.exp(1j * phase))
            return out
        vals = [float(t) for t in tokens]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad input coefficients '{text}'") from None
    if len(vals) % 2:
        raise argparse.ArgumentTypeError("input needs re,im pairs")
    return [complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasibell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"quasibell {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, sweep=False):
        p.add_argument("--n", type=int, required=True, help="number of circle components N")
        if sweep:
            p.add_argument("--alpha-range", type=parse_range, default=DEFAULT_RANGE,
                           help="start:stop:step over |alpha0| (stop inclusive)")
        else:
            p.add_argument("--alpha", type=parse_alpha, required=True, help="mod[:phase]")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    common(sub.add_parser("schmidt", help="Schmidt coefficients for every q"))
    common(sub.add_parser("entanglement", help="entanglement entropy over an alpha sweep"), sweep=True)
    common(sub.add_parser("psuccess", help="teleportation success probability curve"), sweep=True)
    tp = sub.add_parser("teleport", help="full teleportation report")
    common(tp)
    tp.add_argument("--q", type=int, default=0)
    tp.add_argument("--p", type=int, default=0)
    tp.add_argument("--input", type=parse_input, default=None, help="c0,c1,... each as re,im")
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--draws", type=int, default=0)
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(args.subcommand, args.n, format=args.format, out=args.out)
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if hasattr(args, "alpha"):
        cfg.alpha = args.alpha
    if hasattr(args, "alpha_range"):
        cfg.alpha_range = args.alpha_range
    if args.subcommand == "teleport":
        cfg.q, cfg.p, cfg.input = args.q, args.p, args.input
        cfg.seed, cfg.draws = args.seed, args.draws
        if not (0 <= cfg.q < cfg.n and 0 <= cfg.p < cfg.n):
            raise UsageError("--q and --p must lie in 0..N-1")
        if cfg.input is not None and len(cfg.input) != cfg.n:
            raise UsageError(f"--input needs {cfg.n} coefficients, got {len(cfg.input)}")
        if cfg.draws < 0 or cfg.seed < 0:
            raise UsageError("--draws and --seed must be non-negative")
    if args.subcommand in ("psuccess", "teleport") and args.n % 2:
        raise UsageError("teleportation needs an even --n")
    return cfg


def alpha_grid(rng: tuple[float, float, float]) -> list[float]:
    start, stop, step = rng
    if stop < start:
        raise UsageError("empty alpha sweep")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = [round(start + i * step, 12) for i in range(count)]
    if grid[0] <= 0:
        raise UsageError("alpha sweep must stay above zero")
    return grid


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _check(name: str, ok: bool, detail: str) -> None:
    if not ok:
        raise InvariantViolation(name, detail)


def rows_schmidt(cfg: RunConfig) -> list[list]:
    circ = CircleConfig(cfg.n, cfg.alpha)
    rows = []
    for q in range(cfg.n):
        spectrum = schmidt_coeffs(circ, q)
        total = math.fsum(spectrum.lambdas)
        _check("schmidt-sum", abs(total - 1) < 1e-12, f"q={q}: sum {total!r}")
        _check("entropy-range", -1e-12 <= spectrum.entropy <= math.log2(cfg.n) + 1e-12, f"q={q}")
        for k, lam in enumerate(spectrum.lambdas):
            rows.append([cfg.n, circ.radius, q, k, float(lam), spectrum.entropy])
    return rows


def rows_entanglement(cfg: RunConfig) -> list[list]:
    rows = []
    for a in alpha_grid(cfg.alpha_range):
        circ = CircleConfig(cfg.n, a)
        for q in range(cfg.n):
            e = schmidt_coeffs(circ, q).entropy
            _check("entropy-range", -1e-12 <= e <= math.log2(cfg.n) + 1e-12, f"alpha={a}, q={q}")
            rows.append([cfg.n, a, q, e])
    return rows


def rows_psuccess(cfg: RunConfig) -> list[list]:
    rows = []
    for a in alpha_grid(cfg.alpha_range):
        circ = CircleConfig(cfg.n, a)
        pc, pv = success_probability_closed(circ), success_probability_vanenk(circ)
        _check("probability-range", 0 <= pc <= 1 + 1e-12 and 0 <= pv <= 1, f"alpha={a}")
        rows.append([cfg.n, a, pc, pv])
    return rows


def run_teleport(cfg: RunConfig):
    circ = CircleConfig(cfg.n, cfg.alpha)
    raw = QuditCoeffs(tuple(cfg.input)) if cfg.input else QuditCoeffs.basis(cfg.n)
    qudit = normalize_input(circ, raw)
    if qudit.coeffs != raw.coeffs:
        cfg.notes.append("input rescaled to unit norm in the circle-state Gram metric")
    report = teleport_report(circ, qudit, cfg.q, cfg.p)
    draws = sample_outcomes(report, cfg.seed, cfg.draws) if cfg.draws else []
    return report, draws


def teleport_rows(report, draws) -> list[list]:
    rows = []
    for c in report.classes:
        rows.append(["class", "", str(c.outcome), "", c.probability, c.coarse_fidelity])
        for r, v in sorted(c.residues.items()):
            rows.append(["residue", "", str(c.outcome), r, v.probability, v.fidelity])
    rows.append(["total", "", "success", "", report.success_probability, None])
    rows.append(["total", "", "failure", "", report.failure_probability, None])
    for i, d in enumerate(draws):
        rows.append(["draw", i, str(d.outcome), "" if d.residue is None else d.residue, None, None])
    return rows


def render(cfg: RunConfig, columns: list[str], rows: list[list], extra: dict | None = None) -> str:
    meta = {"tool": "quasibell", "version": __version__, "command": cfg.subcommand,
            "config": cfg.echo()}
    if cfg.format == "json":
        doc = {"meta": meta, "columns": columns, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool: quasibell {__version__}\n")
    buf.write(f"# command: {cfg.subcommand}\n")
    buf.write(f"# config: {json.dumps(cfg.echo(), sort_keys=True)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def execute(cfg: RunConfig) -> str:
    if cfg.subcommand == "schmidt":
        return render(cfg, SCHMIDT_COLUMNS, rows_schmidt(cfg))
    if cfg.subcommand == "entanglement":
        return render(cfg, SWEEP_COLUMNS, rows_entanglement(cfg))
    if cfg.subcommand == "psuccess":
        return render(cfg, PSUCCESS_COLUMNS, rows_psuccess(cfg))
    report, draws = run_teleport(cfg)
    extra = {
        "report": report.to_dict(),
        "draws": [{"class": str(d.outcome), "residue": d.residue} for d in draws],
    }
    return render(cfg, TELEPORT_COLUMNS, teleport_rows(report, draws), extra)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        text = execute(cfg)
    except (UsageError, ContractViolation, DegenerateInputError, UnsupportedProtocolError) as exc:
        print(f"quasibell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, ArithmeticError) as exc:
        print(f"quasibell: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    try:
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"quasibell: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK
