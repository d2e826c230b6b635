"""Command-line front end: ``nondegen <command> --N 3 --s 0.5 [...]``.

Exit codes: 0 all selected checks pass, 1 some check failed,
2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import special

from .bubble import bubble_profile
from .decay import FIT_WINDOW, bootstrap_check, kernel_decay, predicted_steps
from .errors import DomainError, NondegenError
from .funk_hecke import (
    eigenvalue_closed,
    eigenvalue_quadrature,
    ratio_law,
)
from .params import DEFECTS, ProblemParams
from .report import CheckRecord, Report
from .riesz import RadialProfile, RieszConfig, gaussian_fourier_potential, riesz_radial
from .spectral import (
    CertificateConfig,
    check_audit,
    check_bubble,
    check_dim,
    check_gap,
    check_identity,
    check_kernel,
    check_lift,
    check_spectrum,
    nondegeneracy_certificate,
)
from .sphere_transform import (
    conformal_distance_defect,
    lift,
    sphere_samples,
    verify_id1,
)

__all__ = ["RunConfig", "build_parser", "run", "main", "COMMANDS"]

COMMANDS = ("constants", "bubble-check", "kernel-check", "transform-check",
            "eigs", "spectrum", "decay", "certify")

# default tolerances, keyed by the --tol-<name> flag
TOLERANCES = {
    "constants": 1e-8,
    "bubble": 1e-6,
    "kernel": 1e-5,
    "lift": 1e-8,
    "transform": 1e-12,
    "id1": 1e-6,
    "audit": 1e-10,
    "ratio": 1e-12,
    "identity": 1e-8,
    "spectrum": 1e-5,
    "decay": 0.05,
}

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    N: int
    s: float
    lmax: int = 20
    radial_nodes: int = 96
    angular_nodes: int = 64
    zonal_nodes: int = 64
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    out: str = None
    format: str = "json"
    seed: int = 0
    timestamp: bool = True
    parallel: bool = False
    defect: str = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise DomainError("format must be json or csv")
        if any(not (t > 0 and math.isfinite(t)) for t in self.tolerances.values()):
            raise DomainError("tolerances must be positive")
        if self.lmax < 3:
            raise DomainError("lmax must be >= 3")
        if self.defect is not None and self.defect not in DEFECTS:
            raise DomainError(f"unknown defect {self.defect!r}")
        self.params()  # validates N and s

    def params(self) -> ProblemParams:
        p = ProblemParams(self.N, self.s)
        return p.with_defect(self.defect) if self.defect else p

    def riesz(self) -> RieszConfig:
        return RieszConfig(n_angular=self.angular_nodes, n_radial=self.radial_nodes)

    def certificate(self) -> CertificateConfig:
        t = self.tolerances
        return CertificateConfig(
            riesz=self.riesz(), lmax=self.lmax, zonal_nodes=self.zonal_nodes,
            tol_bubble=t["bubble"], tol_kernel=t["kernel"], tol_lift=t["lift"],
            tol_audit=t["audit"], tol_identity=t["identity"], tol_spectrum=t["spectrum"],
        )

    def echo(self) -> dict:
        d = asdict(self)
        # fields that do not change results stay out of the report
        for key in ("timestamp", "parallel", "out"):
            d.pop(key)
        return d


# ---------------------------------------------------------------------------
# checks local to the command line; each returns a list of CheckRecords


def _rel(a, b):
    return abs(a - b) / abs(b)


def _check_constants(cfg: RunConfig, params: ProblemParams) -> list:
    """Riesz constant against a Fourier oracle; amplitude against its Gamma ratio."""
    tol = cfg.tolerances["constants"]
    N, s = params.N, params.s
    gauss = RadialProfile(lambda r: np.exp(-r * r), math.inf)
    radii = [0.0, 1.0]
    comp = [riesz_radial(params, gauss, 0, r, cfg.riesz()) for r in radii]
    ref = [gaussian_fourier_potential(N, s, r) for r in radii]
    worst = max(_rel(a, b) for a, b in zip(comp, ref))
    out = [CheckRecord("riesz_constant", {"gamma": params.riesz_gamma, "radii": radii}, comp, ref,
                       tol, worst <= tol, detail=f"max rel {worst:.2e}")]
    lam = 4**s * special.gamma((N + 2 * s) / 2) / special.gamma((N - 2 * s) / 2)
    amp = params.bubble_amplitude
    r = _rel(amp ** (params.p - 1), lam)
    out.append(CheckRecord("bubble_amplitude", {"alpha": amp, "p": params.p}, amp ** (params.p - 1),
                           lam, tol, r <= tol, detail=f"rel {r:.2e}"))
    return out


def _check_transform(cfg: RunConfig, params: ProblemParams) -> list:
    tol = cfg.tolerances["transform"]
    N = params.N
    rng = np.random.default_rng(cfg.seed)
    x = rng.normal(size=(100, N)) * 2.0
    y = rng.normal(size=(100, N)) * 2.0
    d = float(np.max(conformal_distance_defect(x, y)))
    out = [CheckRecord("conformal_distance", {"pairs": 100, "seed": cfg.seed}, d, 0.0, tol, d <= tol,
                       detail=f"max rel {d:.2e}")]
    # the Sobolev-weight lift of the bubble is constant
    lw = lift(params, lambda z: bubble_profile(params, np.linalg.norm(z, axis=-1)), kind="sobolev")
    pts = sphere_samples(N, 12, seed=cfg.seed)[:100]
    vals = lw(pts)
    const = params.bubble_amplitude * 2 ** (-params.decay / 2)
    dev = float(np.max(np.abs(vals / const - 1)))
    out.append(CheckRecord("bubble_lift_constant", {"points": len(pts)}, float(vals.mean()), const,
                           tol, dev <= tol, detail=f"max rel {dev:.2e}"))
    if N in (1, 2):
        tol1 = cfg.tolerances["id1"]
        phi = lambda z: np.exp(-np.sum(z * z, axis=-1))  # noqa: E731
        psi = lambda z: np.exp(-np.sum((z - 0.5) ** 2, axis=-1))  # noqa: E731
        n = 24 if N == 1 else 12
        lhs, rhs, rel = verify_id1(params, phi, psi, n=n)
        out.append(CheckRecord("bilinear_identity", {"n": n}, lhs, rhs, tol1, rel <= tol1,
                               detail=f"rel {rel:.2e}"))
    return out


def eigen_table(params: ProblemParams, lmax: int) -> list:
    """Rows ``(l, closed, quadrature, ratio, predicted_ratio)``; ratios refer to e_l/e_(l-1)."""
    rows = []
    prev = None
    for l in range(lmax + 1):
        c = eigenvalue_closed(params, l)
        q = eigenvalue_quadrature(params, l)
        ratio = c / prev if prev is not None else float("nan")
        pred = float(ratio_law(params, l - 1)) if l else float("nan")
        rows.append((l, c, q, ratio, pred))
        prev = c
    return rows


def _check_eigs(cfg: RunConfig, params: ProblemParams, rows) -> list:
    tol = cfg.tolerances["ratio"]
    dev = max(abs(r[3] / r[4] - 1) for r in rows[1:])
    out = [CheckRecord("ratio_law", {"lmax": cfg.lmax}, [r[3] for r in rows[1:]], [r[4] for r in rows[1:]],
                       tol, dev <= tol, detail=f"max rel {dev:.2e}")]
    rec, _ = check_audit(params, replace(cfg.certificate(), lmax=max(cfg.lmax, 3)))
    out.append(rec)
    return out


def decay_rows(params: ProblemParams, cfg: RieszConfig = None):
    """One application from nu in {0, half-saturation, saturation}, then the iterated run."""
    sat = params.N - 2 * params.s
    rows = []
    for label, nu in (("zero", 0.0), ("half", 0.5 * sat), ("saturated", sat)):
        step = bootstrap_check(params, nu, 1, cfg=cfg)[0]
        rows.append(("single", label, nu, 1, step[1], step[2], step[3].r_squared))
    steps = max(1, predicted_steps(params, 0.0))
    for step in bootstrap_check(params, 0.0, steps, cfg=cfg):
        rows.append(("bootstrap", "zero", 0.0, step[0], step[1], step[2], step[3].r_squared))
    for k in (0, 1):
        fit = kernel_decay(params, k)
        pred = sat if k == 0 else sat + 1
        rows.append(("kernel", f"Z_{k}", float("nan"), 0, fit.exponent, pred, fit.r_squared))
    return rows


def _check_decay(cfg: RunConfig, params: ProblemParams, rows) -> list:
    tol = cfg.tolerances["decay"]
    out = []
    for kind, label, nu, step, meas, pred, r2 in rows:
        name = {"single": f"decay_law_{label}", "bootstrap": f"bootstrap_step_{step}",
                "kernel": f"kernel_decay_{label}"}[kind]
        err = abs(meas - pred)
        out.append(CheckRecord(name, {"nu": nu, "step": step, "window": list(FIT_WINDOW)},
                               meas, pred, tol, err <= tol,
                               detail=f"measured {meas:.4f} predicted {pred:.4f}"))
    return out


# ---------------------------------------------------------------------------


def _tasks(cfg: RunConfig, params: ProblemParams, tables: dict) -> list:
    """Ordered list of thunks producing lists of CheckRecords for the command."""
    cc = cfg.certificate()
    cmd = cfg.command
    one = lambda f: (lambda: [f()])  # noqa: E731
    if cmd == "constants":
        return [lambda: _check_constants(cfg, params)]
    if cmd == "bubble-check":
        return [one(lambda: check_bubble(params, cc))]
    if cmd == "kernel-check":
        return [one(lambda: check_kernel(params, cc))]
    if cmd == "transform-check":
        return [lambda: _check_transform(cfg, params), one(lambda: check_lift(params, cc))]
    if cmd == "eigs":
        rows = eigen_table(params, cfg.lmax)
        tables["eigs"] = rows
        return [lambda: _check_eigs(cfg, params, rows)]
    if cmd == "spectrum":
        def spectral_checks():
            audit, k = check_audit(params, cc)
            recs = [audit, check_identity(params, k, cc)]
            if params.N >= 2:
                recs.append(check_spectrum(params, k, cc)[0])
            recs.append(check_gap(params))
            recs.append(check_dim(params))
            return recs
        return [spectral_checks]
    if cmd == "decay":
        def dec():
            rows = decay_rows(params, cfg.riesz())
            tables["decay"] = rows
            return _check_decay(cfg, params, rows)
        return [dec]
    if cmd == "certify":
        return [lambda: nondegeneracy_certificate(params, cc).checks]
    raise DomainError(cmd)


def _timed(thunk):
    t0 = time.perf_counter()
    recs = thunk()
    dt = time.perf_counter() - t0
    for r in recs:
        if not r.seconds:
            r.seconds = dt / len(recs)
    return recs


def execute(cfg: RunConfig) -> tuple:
    """Run the configured command; returns (Report, tables)."""
    params = cfg.params()
    tables = {}
    tasks = _tasks(cfg, params, tables)
    if cfg.parallel and len(tasks) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(_timed, tasks))
    else:
        results = [_timed(t) for t in tasks]
    checks = [r for group in results for r in group]
    if not cfg.timestamp:
        for c in checks:
            c.seconds = 0.0
    norm = next((c.computed["kappa_audit"] for c in checks if c.name == "normalization_audit"), None)
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if cfg.timestamp else None
    return Report(cfg.echo(), checks, norm, stamp), tables


def _format_table(name: str, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if name == "eigs":
        w.writerow(["l", "e_closed", "e_quadrature", "ratio", "predicted_ratio"])
    else:
        w.writerow(["kind", "label", "nu", "step", "measured", "predicted", "r_squared"])
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so ``run`` can map bad flags to exit code 2."""

    def error(self, message):
        raise _ArgError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--N", type=int, required=True, help="dimension")
    common.add_argument("--s", type=float, required=True, help="fractional order in (0, 1)")
    common.add_argument("--lmax", type=int, default=20)
    common.add_argument("--radial-nodes", type=int, default=96)
    common.add_argument("--angular-nodes", type=int, default=64)
    common.add_argument("--zonal-nodes", type=int, default=64)
    for name, val in TOLERANCES.items():
        common.add_argument(f"--tol-{name}", type=float, default=val, metavar="TOL")
    common.add_argument("--out", default=None, help="report path (stdout summary always printed)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0, help="sample shuffling only")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp and zero wall times for byte-identical reports")
    common.add_argument("--parallel", action="store_true", help="run independent checks concurrently")
    common.add_argument("--inject-defect", choices=sorted(DEFECTS), default=None,
                        help="deliberately perturb one constant (falsifiability control)")
    parser = _Parser(prog="nondegen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return parser


def _config_from_args(ns) -> RunConfig:
    tols = {k: getattr(ns, f"tol_{k}") for k in TOLERANCES}
    return RunConfig(
        command=ns.command, N=ns.N, s=ns.s, lmax=ns.lmax, radial_nodes=ns.radial_nodes,
        angular_nodes=ns.angular_nodes, zonal_nodes=ns.zonal_nodes, tolerances=tols,
        out=ns.out, format=ns.format, seed=ns.seed, timestamp=not ns.no_timestamp,
        parallel=ns.parallel, defect=ns.inject_defect,
    )


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = _config_from_args(ns)
    except _ArgError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (DomainError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG
    try:
        report, tables = execute(cfg)
    except DomainError as exc:
        print(f"invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG
    except (NondegenError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    for name, rows in tables.items():
        stdout.write(_format_table(name, rows))
    prefix = "# " if tables else ""
    for c in report.checks:
        print(prefix + c.summary(), file=stdout)
    print(f"{prefix}verdict: {'pass' if report.verdict else 'fail'}", file=stdout)
    if cfg.out:
        text = report.to_json() if cfg.format == "json" else report.to_csv()
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_PASS if report.verdict else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
