"""Command-line front end: ``hecke-murmur <subcommand> [flags]``.

Every subcommand writes a CSV with a header row and a trailing metadata line
``# config_hash=<hex> version=<v>``. Exit codes: 0 success, 1 usage or input
error, 2 validation failure, 3 resource or budget limit.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import CacheCorruptionError, HeckeMurmurError, ResourceLimitError

log = logging.getLogger("hecke_murmur")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RESOURCE = 0, 1, 2, 3
SUBCOMMANDS = ("family", "empirical", "average", "density", "murmur-fn", "compare", "constants", "validate")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    x: int = 2**14
    y: int | None = None
    p_min: int | None = None
    p_max: int | None = None
    h_exp: float = 0.55
    euler_cutoff: int = 10**5
    exclusion: float = 0.05
    grid: str | None = None
    out: str | None = None
    workers: int = 1
    cache: str | None = None
    suite: str | None = None
    format: str = "csv"
    weight: str = "indicator_1_2"
    method: str = "dirichlet"
    bessel: bool = False

    # fields that never change the numbers, so they stay out of the config hash
    _UNHASHED = ("out", "workers", "cache")

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.x < 1 or (self.y is not None and self.y < 1):
            raise UsageError("--x and --y must be positive")
        if not 0 < self.h_exp < 1:
            raise UsageError("--h-exp must lie in (0, 1)")
        if self.euler_cutoff < 100:
            raise UsageError("--euler-cutoff must be at least 100")
        if not 0 < self.exclusion < 0.5:
            raise UsageError("--exclusion must lie in (0, 0.5)")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        if self.format != "csv":
            raise UsageError("only --format csv is supported")
        if self.method not in ("forms", "dirichlet"):
            raise UsageError("--method must be forms or dirichlet")
        if self.weight not in ("indicator_1_2", "smooth_bump"):
            raise UsageError("--weight must be indicator_1_2 or smooth_bump")
        if self.p_min is not None and self.p_max is not None and self.p_min > self.p_max:
            raise UsageError("--p-min exceeds --p-max")
        if self.grid is not None:
            parse_grid(self.grid)

    @property
    def Y(self) -> int:
        return self.x if self.y is None else self.y

    def config_hash(self) -> str:
        d = {k: v for k, v in dataclasses.asdict(self).items() if k not in self._UNHASHED}
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:n`` (linear), ``lo:hi:n:log`` (geometric) or a comma list."""
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("lin", "log")):
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1 or hi < lo:
                raise ValueError
            if len(parts) == 4 and parts[3] == "log":
                if lo <= 0:
                    raise ValueError
                return np.geomspace(lo, hi, n)
            return np.linspace(lo, hi, n)
        vals = np.array([float(v) for v in spec.split(",") if v.strip()])
        if vals.size == 0:
            raise ValueError
        return vals
    except ValueError:
        raise UsageError(f"bad grid spec {spec!r}; expected lo:hi:n[:log] or a comma list") from None


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _coerce(field: dataclasses.Field, raw: str):
    kind = str(field.type)
    if "bool" in kind:
        return raw.lower() in ("1", "true", "yes", "on")
    if "int" in kind:
        return int(float(raw))
    if "float" in kind:
        return float(raw)
    return raw


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--x", type=int, help="window start X (conductor scale N)")
    common.add_argument("--y", type=int, help="window length Y (default: Y = X)")
    common.add_argument("--p-min", type=int)
    common.add_argument("--p-max", type=int)
    common.add_argument("--h-exp", type=float, help="rolling window H = P^h (default 0.55)")
    common.add_argument("--euler-cutoff", type=lambda s: int(float(s)), help="Euler-product prime cutoff (default 1e5)")
    common.add_argument("--exclusion", type=float, help="exclusion radius around y^2/4 (default 0.05)")
    common.add_argument("--grid", help="lo:hi:n[:log] or comma list")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--workers", type=int, help="kernel threads")
    common.add_argument("--cache", help="class-number cache file")
    common.add_argument("--config", help="key = value file; overrides flags")
    common.add_argument("--suite", help="validate: run one suite")
    common.add_argument("--format", help="output format (csv)")
    common.add_argument("--weight", help="indicator_1_2 or smooth_bump")
    common.add_argument("--method", help="class numbers: forms or dirichlet")
    common.add_argument("--bessel", action="store_true", default=None, help="density: emit the Bessel cross-check table")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="hecke-murmur", description="Murmurations of Hecke L-functions of imaginary quadratic fields.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def make_config(ns: argparse.Namespace) -> RunConfig:
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    values = {k: v for k, v in vars(ns).items() if k in fields and v is not None}
    if ns.config:
        for k, raw in read_config_file(ns.config).items():
            if k not in fields or k == "subcommand":
                raise UsageError(f"unknown config key {k!r}")
            try:
                values[k] = _coerce(fields[k], raw)
            except ValueError:
                raise UsageError(f"bad value for {k}: {raw!r}") from None
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def emit(cfg: RunConfig, header: list[str], rows, footer: list[str] | None = None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    for line in footer or []:
        buf.write(f"# {line}\n")
    buf.write(f"# config_hash={cfg.config_hash()} version={__version__}\n")
    text = buf.getvalue()
    if cfg.out is None:
        sys.stdout.write(text)
        return
    path = Path(cfg.out)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _check_out(cfg: RunConfig) -> None:
    if cfg.out is None:
        return
    parent = Path(cfg.out).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise UsageError(f"output directory {parent} is not writable")


# ---------------------------------------------------------------- subcommands


def _window(cfg: RunConfig):
    from .quadfield import DiscriminantWindow

    return DiscriminantWindow(cfg.x, cfg.Y)


def _family(cfg: RunConfig):
    from .quadfield import ClassNumberCache, family_table

    cache = ClassNumberCache(cfg.cache) if cfg.cache else None
    return family_table(_window(cfg), cfg.method, cache)


def _density_params(cfg: RunConfig):
    from .density import DensityParams

    return DensityParams(euler_cutoff=cfg.euler_cutoff, exclusion=cfg.exclusion)


def cmd_family(cfg: RunConfig) -> int:
    fam = _family(cfg)
    rows = ([d, h, f"{l1:.12g}", fam.method] for d, h, l1 in zip(fam.D.tolist(), fam.h.tolist(), fam.L1.tolist()))
    emit(cfg, ["D", "h", "L1", "method"], rows)
    return EXIT_OK


def _prime_range(cfg: RunConfig) -> tuple[int, int]:
    lo = cfg.p_min if cfg.p_min is not None else 3
    hi = cfg.p_max if cfg.p_max is not None else math.floor(2.25 * cfg.x)
    return lo, hi


def cmd_empirical(cfg: RunConfig) -> int:
    from .arith_core import primes_between
    from .empirical import sweep_arrays

    lo, hi = _prime_range(cfg)
    primes = primes_between(max(lo, 3), hi)
    arr = sweep_arrays(_window(cfg), primes, _family(cfg))
    ymax = arr.plus.shape[1] - 1
    header = ["p", "p_mod_8", "p_mod_3", "p_mod_5", "xi", "G", "G_denom", "G_num_minus", "ramified"] + [f"y{k}" for k in range(1, ymax + 1)]
    rows = []
    for i in range(primes.size):
        pt = arr.point(i)
        p = pt.p
        rows.append(
            [p, p % 8, p % 3, p % 5, pt.xi, pt.G, pt.G_denom, pt.G_num_minus, pt.ramified_term]
            + [pt.G_num_plus_by_y.get(k, 0.0) for k in range(1, ymax + 1)]
        )
    emit(cfg, header, rows)
    return EXIT_OK


def _anchors(cfg: RunConfig, default: str) -> list[tuple[float, int, int]]:
    """(Xi, P, H) with P the least prime >= Xi X and H = floor(P^h)."""
    from .arith_core import is_prime

    out = []
    for xi in parse_grid(cfg.grid or default):
        P = max(3, math.ceil(float(xi) * cfg.x))
        while not is_prime(P):
            P += 1
        out.append((float(xi), P, max(1, math.floor(P**cfg.h_exp))))
    return out


def _sweep_for(cfg: RunConfig, anchors):
    from .arith_core import primes_between
    from .empirical import sweep_arrays

    lo = min(P for _, P, _ in anchors)
    hi = max(P + H for _, P, H in anchors)
    return sweep_arrays(_window(cfg), primes_between(lo, hi), _family(cfg))


def cmd_average(cfg: RunConfig) -> int:
    from .empirical import rolling_average_arrays

    anchors = _anchors(cfg, "0.3:2.2:39")
    arr = _sweep_for(cfg, anchors)
    rows = []
    for _, P, H in anchors:
        a = rolling_average_arrays(arr, P, H)
        rows.append([a.P, a.Xi, a.H, a.primes_used, a.G_avg])
    emit(cfg, ["P", "Xi", "H", "n_primes", "G_avg"], rows)
    return EXIT_OK


def cmd_density(cfg: RunConfig) -> int:
    from .analytic import density_bessel
    from .density import constants, density_averaged, is_excluded

    params = _density_params(cfg)
    consts = constants(params)
    grid = parse_grid(cfg.grid or "0.3:8:40")
    rows = []
    for xi in grid.tolist():
        if is_excluded(xi, params.exclusion):
            log.warning("skipping Xi=%s inside an exclusion zone", xi)
            continue
        d = density_averaged(xi, params, consts)
        if cfg.bessel:
            b = density_bessel(xi, density=params, consts=consts)
            rows.append([xi, d.M_total, b.value, b.value - d.M_total, b.trunc_estimate])
        else:
            rows.append([xi, d.M_total, d.M_minus_term])
    header = ["Xi", "direct", "bessel", "diff", "trunc_estimate"] if cfg.bessel else ["Xi", "M", "M_minus"]
    emit(cfg, header, rows)
    return EXIT_OK


def _weight(cfg: RunConfig):
    from .analytic import WeightFunction

    return WeightFunction(cfg.weight)


def cmd_murmur_fn(cfg: RunConfig) -> int:
    from .analytic import murmuration_fn
    from .density import constants

    params = _density_params(cfg)
    consts = constants(params)
    w = _weight(cfg)
    rows = []
    for xi in parse_grid(cfg.grid or "0.3:8:78").tolist():
        r = murmuration_fn(xi, w, params, consts=consts)
        rows.append([xi, r.value, r.quad_error])
    emit(cfg, ["Xi", "M_Phi", "quad_error"], rows)
    return EXIT_OK


def compare_rows(cfg: RunConfig):
    """Rolling empirical averages against M_Phi evaluated at each anchor's P/X."""
    from .analytic import murmuration_fn
    from .density import constants, is_excluded
    from .empirical import rolling_average_arrays

    params = _density_params(cfg)
    consts = constants(params)
    w = _weight(cfg)
    anchors = []
    for xi, P, H in _anchors(cfg, "0.3:2.2:39"):
        if is_excluded(P / cfg.x, params.exclusion) or is_excluded((P + H) / cfg.x, params.exclusion):
            log.warning("skipping Xi=%s inside an exclusion zone", xi)
            continue
        anchors.append((xi, P, H))
    if not anchors:
        raise UsageError("every grid point falls in an exclusion zone")
    arr = _sweep_for(cfg, anchors)
    rows = []
    for _, P, H in anchors:
        a = rolling_average_arrays(arr, P, H)
        m = murmuration_fn(a.Xi, w, params, consts=consts)
        rows.append([a.P, a.Xi, a.H, a.primes_used, a.G_avg, m.value, a.G_avg - m.value])
    res = np.array([r[-1] for r in rows])
    rms = float(np.sqrt(np.add.reduce(res * res) / res.size))
    return rows, rms


def cmd_compare(cfg: RunConfig) -> int:
    rows, rms = compare_rows(cfg)
    emit(cfg, ["P", "Xi", "H", "n_primes", "G_avg", "M_Phi", "residual"], rows, [f"rms_residual={rms!r} n={len(rows)}"])
    return EXIT_OK


def cmd_constants(cfg: RunConfig) -> int:
    from .density import ZETA2, constant_A, constant_cbar

    M = cfg.euler_cutoff
    rows = [
        ["A", constant_A(M, True), M, "accelerated"],
        ["A", constant_A(M), M, "plain"],
        ["cbar", constant_cbar(M, True), M, "accelerated"],
        ["cbar", constant_cbar(M), M, "plain"],
        ["zeta2", ZETA2, 0, "exact"],
    ]
    emit(cfg, ["name", "value", "cutoff", "product"], rows)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    from .validation import SUITES

    if cfg.suite is not None and cfg.suite not in SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    names = [cfg.suite] if cfg.suite else list(SUITES)
    rows = []
    failed = 0
    for name in names:
        for r in SUITES[name]():
            rows.append([name, r.identity, r.params, r.lhs, r.rhs, "pass" if r.passed else "FAIL"])
            failed += not r.passed
            log.info("%s %s: %s", name, r.identity, "pass" if r.passed else "FAIL")
    emit(cfg, ["suite", "identity", "params", "lhs", "rhs", "pass"], rows, [f"failed={failed} total={len(rows)}"])
    return EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {
    "family": cmd_family,
    "empirical": cmd_empirical,
    "average": cmd_average,
    "density": cmd_density,
    "murmur-fn": cmd_murmur_fn,
    "compare": cmd_compare,
    "constants": cmd_constants,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = make_config(ns)
        _check_out(cfg)
        kernels.set_workers(cfg.workers)
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except CacheCorruptionError as e:
        print(f"cache error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (HeckeMurmurError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
