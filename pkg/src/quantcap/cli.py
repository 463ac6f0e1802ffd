"""Command-line front end: ``quantcap regions|pack|bounds|sweep``.

Output schemas
--------------
regions : ``kind,m,n,l,d,regions`` plus ``enumerated,match`` with ``--verify``
pack    : ``x1,...,xm`` one centre per row
bounds  : ``power_db,bound_name,value_bits,gap_bits,assumptions``
sweep   : ``rates.csv`` (``power_db,strategy,mean_rate_bits,std_rate_bits,trials``),
          ``rates.svg``, ``bounds.csv`` (trial-averaged ``prop3_upper``) and
          ``manifest.json``

The default output directory for ``sweep`` is ``$QUANTCAP_OUTPUT_DIR`` when
set, else ``./results``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    prop1_upper,
    prop2_bounds,
    prop3_upper,
    theorem1_upper,
    unquantized_capacity,
)
from .configs import Architecture, ChannelInstance, build_config, induced_arrangement
from .counting import MAX_HYPERPLANES, r_central, r_general, r_parallel
from .geometry import HyperplaneArrangement, enumerate_cells, is_general_position, vertex_radius
from .io import ParseError, atomic_write, parse_arrangement, parse_matrix
from .kernels import BACKEND
from .packing import ORACLE_MAX_RADIUS, pack_margin, r_ssps_oracle
from .simulate import rate_curve, sample_channel, stream, trial_channel
from .svg import arrangement_svg, rate_plot_svg

OUTPUT_ENV = "QUANTCAP_OUTPUT_DIR"
RATES_HEADER = ["power_db", "strategy", "mean_rate_bits", "std_rate_bits", "trials"]
BOUNDS_HEADER = ["power_db", "bound_name", "value_bits", "gap_bits", "assumptions"]
VERIFY_ATTEMPTS = 50


class UsageError(ValueError):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "results"))


# ---------------------------------------------------------------- regions


def _random_instance(kind, m, n, l, d, rng) -> HyperplaneArrangement:
    """General-position instance of the requested kind, resampled until GP holds."""
    for _ in range(VERIFY_ATTEMPTS):
        if kind == "parallel":
            dirs = rng.standard_normal((l, m))
            if not is_general_position(HyperplaneArrangement(dirs, np.zeros(l))):
                continue
            normals = np.repeat(dirs, d, axis=0)
            offsets = rng.standard_normal(l * d) * 2
            return HyperplaneArrangement(normals, offsets)
        normals = rng.standard_normal((n, m))
        offsets = np.zeros(n) if kind == "central" else rng.standard_normal(n)
        arr = HyperplaneArrangement(normals, offsets)
        if is_general_position(arr):
            return arr
    raise RuntimeError("could not draw a general-position instance")


def _enumerated(arr: HyperplaneArrangement) -> int:
    return len(enumerate_cells(arr, vertex_radius(arr) + 1.0))


def cmd_regions(args) -> int:
    kind = "parallel" if args.parallel else "central" if args.central else "general"
    if args.parallel and args.central:
        raise UsageError("--central and --parallel are exclusive")
    if args.m is None:
        raise UsageError("--m is required")
    rows = []
    rng = stream(args.seed, 7)
    queries = []
    if kind == "parallel":
        if args.l is None or args.d is None:
            raise UsageError("--parallel needs --l and --d")
        for m in args.m:
            for l in args.l:
                for d in args.d:
                    queries.append((m, l * d, l, d))
    else:
        if args.n is None:
            raise UsageError("--n is required")
        queries = [(m, n, None, None) for m in args.m for n in args.n]

    mismatch = False
    for m, n, l, d in queries:
        try:
            if kind == "general":
                value = r_general(m, n)
            elif kind == "central":
                value = r_central(n, m)
            else:
                value = r_parallel(m, l, d)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        row = [kind, m, n, "" if l is None else l, "" if d is None else d, value]
        if args.verify:
            if m > 4 or n > 12:
                raise UsageError("--verify is limited to m <= 4 and n <= 12")
            if kind == "general" and n == 0:
                got = 1
            else:
                got = _enumerated(_random_instance(kind, m, n, l, d, rng))
            row += [got, "yes" if got == value else "no"]
            mismatch |= got != value
        rows.append(row)

    header = ["kind", "m", "n", "l", "d", "regions"]
    if args.verify:
        header += ["enumerated", "match"]
    _emit(_csv_text(header, rows), args.out)
    if mismatch:
        print("error: formula and enumeration disagree", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------- pack


def _parse_inline(lines) -> HyperplaneArrangement:
    return parse_arrangement("\n".join(lines))


def cmd_pack(args) -> int:
    if args.arrangement and args.hyperplane:
        raise UsageError("give either an arrangement file or --hyperplane lines")
    if args.arrangement:
        text = Path(args.arrangement).read_text()
        arr = parse_arrangement(text, dim=args.dim)
    elif args.hyperplane:
        arr = _parse_inline(args.hyperplane)
    elif args.dim:
        arr = HyperplaneArrangement(np.zeros((0, args.dim)), [], dim=args.dim)
    else:
        raise UsageError("no arrangement given")
    if args.svg and arr.dim != 2:
        raise UsageError("--svg renders planar arrangements only")
    if not args.radius > 1:
        raise UsageError("--radius must exceed 1")
    if args.oracle and (arr.dim != 2 or args.radius > ORACLE_MAX_RADIUS):
        raise UsageError(f"--oracle needs a planar arrangement and radius <= {ORACLE_MAX_RADIUS}")

    packing = pack_margin(arr, args.radius)
    header = [f"x{i + 1}" for i in range(arr.dim)]
    text = _csv_text(header, [[_fmt(v) for v in c] for c in packing.centers])
    if args.out:
        atomic_write(args.out, text)
    if args.svg:
        atomic_write(args.svg, arrangement_svg(arr, packing.centers, args.radius))
    summary = f"pack_margin: {len(packing)}"
    if args.oracle:
        summary += f"\noracle: {r_ssps_oracle(arr, args.radius, args.grid_step)}"
    if args.out:
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


# ---------------------------------------------------------------- bounds


def bound_rows(ch: ChannelInstance, n_tq, power_db, k_convention="printed", exponent="printed"):
    """All bound rows for one channel over a power grid."""
    n_t, n_r = ch.n_t, ch.n_r
    h_max = float(np.max(ch.row_norms))
    lo, hi = prop2_bounds(n_r, n_t)
    rows = []
    for pdb in power_db:
        P = 10.0 ** (pdb / 10.0)
        rows.append([pdb, "prop1_upper", prop1_upper(h_max, P, n_tq), 2.0,
                     f"best single antenna |h|={h_max:.6g}"])
        rows.append([pdb, "prop2_lower", lo, 0.0, "high-SNR limit; sign quantizer per antenna"])
        rows.append([pdb, "prop2_upper", hi, 0.0, "high-SNR limit; sign quantizer per antenna"])
        rep = prop3_upper(ch.singular_values, P, n_tq, n_t=n_t, n_r=n_r,
                          k_convention=k_convention, exponent=exponent)
        rows.append([pdb, rep.name, rep.value_bits, rep.gap_bits, "; ".join(rep.assumptions)])
        arrs = []
        for arch in Architecture:
            arr = induced_arrangement(ch, build_config(arch, ch, n_tq, P))
            arrs.append(arr)
            rep = theorem1_upper([arr], P, n_t, n_r)
            rows.append([pdb, f"theorem1_upper:{arch.value}", rep.value_bits, rep.gap_bits,
                         "; ".join(rep.assumptions)])
        rep = theorem1_upper(arrs, P, n_t, n_r)
        rows.append([pdb, "theorem1_upper", rep.value_bits, rep.gap_bits,
                     "; ".join(rep.assumptions + ("max over the four architectures",))])
        rows.append([pdb, "unquantized", unquantized_capacity(ch, P), 0.0, "waterfilling"])
    return [[_fmt(r[0]), r[1], _fmt(r[2]), _fmt(r[3]), r[4]] for r in rows]


def cmd_bounds(args) -> int:
    if args.channel:
        H = parse_matrix(Path(args.channel).read_text())
        ch = ChannelInstance.from_matrix(H, normalize=args.normalize)
    else:
        if args.n_t is None or args.n_r is None:
            raise UsageError("give --channel or both --n-t and --n-r")
        ch = sample_channel(args.n_t, args.n_r, args.seed)
    if args.n_tq < 1 or args.n_tq > MAX_HYPERPLANES:
        raise UsageError(f"--n-tq must lie in [1, {MAX_HYPERPLANES}]")
    rows = bound_rows(ch, args.n_tq, args.power_db, args.k_convention, args.prop3_exponent)
    _emit(_csv_text(BOUNDS_HEADER, rows), args.out)
    return 0


# ---------------------------------------------------------------- sweep


@dataclass
class ExperimentOptions:
    k_convention: str = "printed"
    prop3_exponent: str = "printed"
    optimize_prior: bool = False


@dataclass
class ExperimentSpec:
    """Parameters of a rate sweep; defaults reproduce the reference setup."""

    n_t: int = 2
    n_r: int = 3
    n_tq: int = 4
    power_db: list = field(default_factory=lambda: [float(p) for p in range(0, 45, 5)])
    strategies: list = field(default_factory=lambda: [a.value for a in Architecture])
    trials: int = 50
    mc_samples: int = 100_000
    seed: int = 2024
    output_dir: str = ""
    options: ExperimentOptions = field(default_factory=ExperimentOptions)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise UsageError("spec must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = sorted(set(data) - known)
        if extra:
            raise UsageError(f"unknown spec keys: {', '.join(extra)}")
        data = dict(data)
        opts = data.pop("options", {}) or {}
        if not isinstance(opts, dict):
            raise UsageError("options must be an object")
        extra = sorted(set(opts) - {f.name for f in fields(ExperimentOptions)})
        if extra:
            raise UsageError(f"unknown option keys: {', '.join(extra)}")
        spec = cls(**data, options=ExperimentOptions(**opts))
        spec.validate()
        return spec

    def validate(self) -> None:
        def is_int(v):
            return isinstance(v, int) and not isinstance(v, bool)

        for name in ("n_t", "n_r", "n_tq", "trials", "mc_samples"):
            if not is_int(getattr(self, name)) or getattr(self, name) < 1:
                raise UsageError(f"{name} must be a positive integer")
        if not is_int(self.seed) or self.seed < 0:
            raise UsageError("seed must be a nonnegative integer")
        if self.n_tq > MAX_HYPERPLANES:
            raise UsageError(f"n_tq is capped at {MAX_HYPERPLANES}")
        if self.n_t > 4:
            raise UsageError("n_t above 4 is not supported by the cell solver")
        if not self.power_db or not all(
            isinstance(p, (int, float)) and not isinstance(p, bool) and math.isfinite(p)
            for p in self.power_db
        ):
            raise UsageError("power_db must be a nonempty list of finite numbers")
        if len(set(self.power_db)) != len(self.power_db):
            raise UsageError("power_db has duplicates")
        if not self.strategies:
            raise UsageError("strategies must be nonempty")
        valid = {a.value for a in Architecture}
        for s in self.strategies:
            if s not in valid:
                raise UsageError(f"unknown strategy {s!r}; choose from {sorted(valid)}")
        if len(set(self.strategies)) != len(self.strategies):
            raise UsageError("strategies has duplicates")
        if self.options.k_convention not in ("printed", "min"):
            raise UsageError("k_convention must be 'printed' or 'min'")
        if self.options.prop3_exponent not in ("printed", "squared"):
            raise UsageError("prop3_exponent must be 'printed' or 'squared'")
        if not isinstance(self.options.optimize_prior, bool):
            raise UsageError("optimize_prior must be a boolean")


def _rates_csv(curve) -> str:
    rows = [
        [_fmt(e.power_db), e.strategy, _fmt(e.mean_rate_bits), _fmt(e.std_rate_bits), e.trials]
        for e in curve.entries
    ]
    return _csv_text(RATES_HEADER, rows)


def _sweep_bounds_csv(spec: ExperimentSpec) -> str:
    """Trial-averaged linear-combining bound on the sweep's own channels."""
    rows = []
    chans = [trial_channel(spec.seed, t, spec.n_t, spec.n_r) for t in range(spec.trials)]
    for pdb in spec.power_db:
        P = 10.0 ** (pdb / 10.0)
        reps = [
            prop3_upper(ch.singular_values, P, spec.n_tq, n_t=spec.n_t, n_r=spec.n_r,
                        k_convention=spec.options.k_convention,
                        exponent=spec.options.prop3_exponent)
            for ch in chans
        ]
        value = float(np.mean([r.value_bits for r in reps]))
        notes = "; ".join(reps[0].assumptions[:2]) + f"; mean over {spec.trials} channels"
        rows.append([_fmt(pdb), "prop3_upper", _fmt(value), _fmt(reps[0].gap_bits), notes])
    return _csv_text(BOUNDS_HEADER, rows)


def run_sweep(spec: ExperimentSpec, workers: int = 1) -> dict[str, str]:
    """Run the sweep and return the output files as ``{name: text}``."""
    curve = rate_curve(
        spec.strategies,
        spec.power_db,
        spec.n_t,
        spec.n_r,
        spec.n_tq,
        spec.trials,
        spec.mc_samples,
        spec.seed,
        optimize_prior=spec.options.optimize_prior,
        workers=workers,
    )
    params = asdict(spec)
    params.pop("output_dir")
    manifest = {
        "params": params,
        "seed": spec.seed,
        "version": __version__,
        "backend": BACKEND,
        "numpy": np.__version__,
        "files": ["rates.csv", "rates.svg", "bounds.csv"],
    }
    return {
        "rates.csv": _rates_csv(curve),
        "rates.svg": rate_plot_svg(curve),
        "bounds.csv": _sweep_bounds_csv(spec),
        "manifest.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    }


def write_outputs(outdir: Path, files: dict[str, str]) -> None:
    """Write every file atomically; remove the ones already written if any fails."""
    done = []
    try:
        for name, text in files.items():
            atomic_write(outdir / name, text)
            done.append(outdir / name)
    except BaseException:
        for p in done:
            p.unlink(missing_ok=True)
        raise


def cmd_sweep(args) -> int:
    if args.spec:
        try:
            data = json.loads(Path(args.spec).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.spec}: invalid JSON ({exc})") from None
        spec = ExperimentSpec.from_dict(data)
    else:
        spec = ExperimentSpec()
    for name in ("n_t", "n_r", "n_tq", "trials", "mc_samples", "seed", "power_db", "strategies"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(spec, name, v)
    if args.output_dir:
        spec.output_dir = args.output_dir
    spec.validate()
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    outdir = Path(spec.output_dir) if spec.output_dir else default_output_dir()
    files = run_sweep(spec, workers=args.workers)
    write_outputs(outdir, files)
    print(f"wrote {', '.join(files)} to {outdir}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="quantcap",
        description="Region counts, separable packings, capacity bounds and rate sweeps "
        "for MIMO channels with one-bit quantizers.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("regions", help="tabulate region counts")
    r.add_argument("--m", type=int, nargs="+", help="dimension(s)")
    r.add_argument("--n", type=int, nargs="+", help="hyperplane count(s)")
    r.add_argument("--central", action="store_true", help="hyperplanes through the origin")
    r.add_argument("--parallel", action="store_true", help="l directions, d copies each")
    r.add_argument("--l", type=int, nargs="+")
    r.add_argument("--d", type=int, nargs="+")
    r.add_argument("--verify", action="store_true", help="cross-check by cell enumeration")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="CSV path (default stdout)")
    r.set_defaults(func=cmd_regions)

    k = sub.add_parser("pack", help="separable unit-sphere packing of an arrangement")
    k.add_argument("arrangement", nargs="?", help="file with lines 'a_1 ... a_m | b'")
    k.add_argument("--hyperplane", action="append", metavar="'A1 .. AM | B'",
                   help="inline hyperplane, repeatable")
    k.add_argument("--dim", type=int, help="dimension (needed for an empty arrangement)")
    k.add_argument("--radius", type=float, required=True, help="outer radius sqrt(P)")
    k.add_argument("--oracle", action="store_true", help="also run the exhaustive search")
    k.add_argument("--grid-step", type=float, default=0.25)
    k.add_argument("--out", help="centres CSV path (default stdout)")
    k.add_argument("--svg", help="SVG overlay path (planar only)")
    k.set_defaults(func=cmd_pack)

    b = sub.add_parser("bounds", help="capacity bounds over a power sweep")
    b.add_argument("--channel", help="matrix file, one row of H per line")
    b.add_argument("--normalize", action="store_true", help="scale channel rows to unit norm")
    b.add_argument("--n-t", type=int)
    b.add_argument("--n-r", type=int)
    b.add_argument("--n-tq", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--power-db", type=float, nargs="+", default=[0.0, 10.0, 20.0, 30.0, 40.0])
    b.add_argument("--k-convention", choices=["printed", "min"], default="printed")
    b.add_argument("--prop3-exponent", choices=["printed", "squared"], default="printed")
    b.add_argument("--out", help="CSV path (default stdout)")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("sweep", help="achievable-rate sweep over random channels")
    s.add_argument("--spec", help="JSON experiment spec")
    s.add_argument("--n-t", dest="n_t", type=int)
    s.add_argument("--n-r", dest="n_r", type=int)
    s.add_argument("--n-tq", dest="n_tq", type=int)
    s.add_argument("--power-db", dest="power_db", type=float, nargs="+")
    s.add_argument("--strategies", nargs="+")
    s.add_argument("--trials", type=int)
    s.add_argument("--mc-samples", dest="mc_samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--output-dir", help=f"default ${OUTPUT_ENV} or ./results")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {getattr(args, 'arrangement', None) or 'input'}: {exc}", file=sys.stderr)
        return 2
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
