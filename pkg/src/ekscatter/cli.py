"""Command line front end: ``ekscatter <subcommand> [flags]``.

Machine-readable output goes to ``--output`` (or stdout); progress and
timing go to stderr. Files are written to a temporary sibling and renamed
into place, so an interrupted run leaves no partial file behind.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
import tempfile
import time

from . import __version__
from .errors import InvalidArgument, InvariantViolation, ResourceError
from .geodesics import DEFAULT_T0, enumerate_up_to
from .sieve import MAX_LIMIT, build_factor_table
from .stats import (
    DEFAULT_PRIME_LIMIT,
    EKNormalization,
    EKSamples,
    alpha_constant,
    asymptotic_ratio,
    count_A,
    count_A_via_O,
    default_workers,
    ek_omega_columns,
    empirical_cdf,
    histogram,
    ks_distance,
    scan_columns,
    std_normal_cdf,
)
from .svg import render_histogram_svg

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 2, 3, 4

CDF_POINTS = (-2, -1, 0, 1, 2)


class UsageError(Exception):
    pass


@contextlib.contextmanager
def open_output(path):
    """Text sink: stdout for None or '-', otherwise an atomically replaced file."""
    if path in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ekscatter-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _log(msg):
    print(msg, file=sys.stderr)


def _dump_json(obj, fh):
    fh.write(json.dumps(obj, indent=2) + "\n")


def _table(cfg):
    return build_factor_table(max(cfg.limit, 2), segmented=cfg.segmented)


def _require_limit(cfg, minimum=1):
    if cfg.limit is None:
        raise UsageError("--limit is required")
    if not minimum <= cfg.limit <= MAX_LIMIT:
        raise UsageError(f"--limit must be in [{minimum}, {MAX_LIMIT}], got {cfg.limit}")


# ---------------------------------------------------------------- commands

def write_scan_csv(t, x, fh, workers=1):
    fh.write("q,phi,s,n,omega_n,omega_phi\n")
    rows = 0
    for c in scan_columns(t, x, workers=workers):
        cols = [a.tolist() for a in c]
        fh.write("".join("%d,%d,%d,%d,%d,%d\n" % r for r in zip(*cols)))
        rows += len(cols[0])
    return rows


def cmd_scan(cfg):
    _require_limit(cfg)
    start = time.perf_counter()
    t = _table(cfg)
    with open_output(cfg.output) as fh:
        rows = write_scan_csv(t, cfg.limit, fh, cfg.workers)
    _log(f"scan: {rows} rows in {time.perf_counter() - start:.2f}s")
    return EXIT_OK


def cmd_geodesics(cfg):
    _require_limit(cfg)
    start = time.perf_counter()
    t = _table(cfg)
    rows = 0
    with open_output(cfg.output) as fh:
        fh.write("q,p,sojourn\n")
        for fam in enumerate_up_to(t, cfg.limit, cfg.t0):
            soj = f"{fam.sojourn:.12g}"
            fh.write("".join(f"{fam.q},{p},{soj}\n" for p in fam.numerators))
            rows += len(fam)
    _log(f"geodesics: {rows} rows in {time.perf_counter() - start:.2f}s")
    return EXIT_OK


def histogram_csv(h):
    lines = ["bin_lo,bin_hi,count,density"]
    edges = h.edges()
    for i, (k, d) in enumerate(zip(h.counts, h.densities())):
        lines.append(f"{edges[i]:.12g},{edges[i + 1]:.12g},{k},{d:.12g}")
    return "\n".join(lines) + "\n"


def ekhist_report(t, x, lo, hi, bins, workers=1):
    """Histogram of normalized omega(n_q) plus its summary statistics."""
    norm = EKNormalization.at(x)
    on, op = ek_omega_columns(t, x, workers=workers)
    samples = EKSamples(on, norm, "omega_n")
    companion = EKSamples(op, norm, "omega_phi")
    h = histogram(samples, lo, hi, bins)
    mean, var = samples.mean_var()
    summary = {
        "x": x,
        "f": norm.f,
        "g": norm.g,
        "ks_distance": ks_distance(samples),
        "ks_distance_omega_phi": ks_distance(companion),
        "empirical_cdf": {str(a): empirical_cdf(samples, a) for a in CDF_POINTS},
        "empirical_cdf_omega_phi": {str(a): empirical_cdf(companion, a) for a in CDF_POINTS},
        "normal_cdf": {str(a): std_normal_cdf(a) for a in CDF_POINTS},
        "mean": mean,
        "variance": var,
        "bins": bins,
        "range": [lo, hi],
        "underflow": h.underflow,
        "overflow": h.overflow,
    }
    return h, summary


def cmd_ekhist(cfg):
    _require_limit(cfg, minimum=16)
    start = time.perf_counter()
    t = _table(cfg)
    lo, hi = cfg.range
    h, summary = ekhist_report(t, cfg.limit, lo, hi, cfg.bins, cfg.workers)
    fmt = cfg.format or "csv"
    path = cfg.output or f"ekhist_{cfg.limit}.{fmt}"
    with open_output(path) as fh:
        if fmt == "svg":
            fh.write(render_histogram_svg(
                h, title=f"normalized omega(n_q), 1 <= q <= {cfg.limit}",
                xlabel="(omega(n_q) - (ln ln N)^2 / 2) / ((ln ln N)^1.5 / sqrt 3)"))
        elif fmt == "json":
            _dump_json({"edges": h.edges(), "counts": list(h.counts),
                        "densities": h.densities(), "total": h.total}, fh)
        else:
            fh.write(histogram_csv(h))
    _dump_json(summary, sys.stdout)
    _log(f"ekhist: {cfg.limit} samples -> {path} in {time.perf_counter() - start:.2f}s")
    return EXIT_OK


def cmd_acheck(cfg):
    _require_limit(cfg)
    t = _table(cfg)
    a = count_A(t, cfg.limit)
    a_o = count_A_via_O(t, cfg.limit)
    alpha = alpha_constant(cfg.prime_limit)
    report = {
        "x": cfg.limit,
        "A_x": a,
        "A_x_via_O": a_o,
        "equal": a == a_o,
        "alpha": alpha.value,
        "prime_limit": alpha.prime_limit,
        "tail_bound": alpha.tail_bound,
        "ratio_to_asymptotic": asymptotic_ratio(a, cfg.limit, alpha.value) if cfg.limit > 1 else None,
    }
    with open_output(cfg.output) as fh:
        _dump_json(report, fh)
    if a != a_o:
        raise InvariantViolation(f"A({cfg.limit}) = {a} but the O-count gives {a_o}")
    return EXIT_OK


def cmd_echeck(cfg):
    _require_limit(cfg)
    t = _table(cfg)
    e = 0
    a = 0
    for c in scan_columns(t, cfg.limit, workers=cfg.workers):
        e += int((abs(c.omega_n.astype(int) - c.omega_phi) > 1).sum())
        a += int((c.s != 0).sum())
    if e > a:
        raise InvariantViolation(f"|E(x)| = {e} exceeds A(x) = {a}")
    report = {"x": cfg.limit, "E_x": e, "E_ratio": e / cfg.limit, "A_x": a, "A_ratio": a / cfg.limit}
    with open_output(cfg.output) as fh:
        _dump_json(report, fh)
    return EXIT_OK


def cmd_constants(cfg):
    if cfg.limit is not None and cfg.limit < 16:
        raise UsageError(f"--limit must be >= 16 for f(x), g(x), got {cfg.limit}")
    alpha = alpha_constant(cfg.prime_limit)
    report = {"alpha": alpha.value, "prime_limit": alpha.prime_limit,
              "tail_bound": alpha.tail_bound, "alpha_upper": alpha.upper}
    if cfg.limit is not None:
        norm = EKNormalization.at(cfg.limit)
        report.update(x=cfg.limit, f=norm.f, g=norm.g)
    with open_output(cfg.output) as fh:
        _dump_json(report, fh)
    return EXIT_OK


COMMANDS = {
    "scan": (cmd_scan, "per-q table q,phi,s,n,omega_n,omega_phi as CSV"),
    "geodesics": (cmd_geodesics, "geodesic parameters q,p,sojourn as CSV"),
    "ekhist": (cmd_ekhist, "density histogram of normalized omega(n_q)"),
    "acheck": (cmd_acheck, "A(x) two ways, alpha and the asymptotic ratio"),
    "echeck": (cmd_echeck, "size of the exceptional set E(x)"),
    "constants": (cmd_constants, "alpha with tail bound; f(x), g(x)"),
}


# ---------------------------------------------------------------- parsing

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _t0(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 1 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"t0 must be a finite number > 1, got {text}")
    return v


def _range(text):
    try:
        lo, hi = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"need LO < HI, got {text}")
    return lo, hi


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit", type=_positive_int, help="largest q (also the cutoff x)")
    common.add_argument("--t0", type=_t0, default=DEFAULT_T0, help="cusp cutoff T0 > 1 (default 2)")
    common.add_argument("--bins", type=_positive_int, default=60, help="histogram bins (default 60)")
    common.add_argument("--range", type=_range, default=(-4.0, 4.0), metavar="LO:HI",
                        help="histogram range; write --range=-4:4 for a negative LO")
    common.add_argument("--prime-limit", type=_positive_int, default=DEFAULT_PRIME_LIMIT,
                        help="truncation bound for the alpha product (default 10^6)")
    common.add_argument("--format", choices=("csv", "json", "svg"))
    common.add_argument("--output", metavar="PATH", help="output file ('-' for stdout)")
    common.add_argument("--workers", type=_positive_int, default=default_workers(),
                        help="worker processes for range-partitioned scans")
    common.add_argument("--segmented", action="store_true", default=None,
                        help="build the factor table segment by segment")

    parser = argparse.ArgumentParser(prog="ekscatter", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        cfg = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    func = COMMANDS[cfg.command][0]
    if cfg.command != "ekhist" and cfg.format not in (None, "csv", "json"):
        parser.error(f"--format {cfg.format} is only supported by ekhist")
    try:
        return func(cfg)
    except (UsageError, InvalidArgument) as exc:
        _log(f"ekscatter {cfg.command}: error: {exc}")
        return EXIT_USAGE
    except InvariantViolation as exc:
        _log(f"ekscatter {cfg.command}: invariant violated: {exc}")
        return EXIT_INVARIANT
    except (OSError, ResourceError) as exc:
        _log(f"ekscatter {cfg.command}: I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
