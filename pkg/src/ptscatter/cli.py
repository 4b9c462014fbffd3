"""Command-line front end.

Exit codes: 0 success, 2 bad arguments or parameters outside a valid
regime, 3 verification failure.
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import analysis, report
from .bound import bound_spectrum
from .model import CaseKind, DomainError, PotentialParams, RegimeError, potential_value
from .oracle import AccuracyError, IntegrationConfig, bound_oracle, integrate_amplitudes
from .scatter import amplitudes, penetrating_window

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3

FEATURE_KINDS = ("reciprocity", "ss", "invisible-left", "invisible-right", "invisible-both", "unitarity")

# Parameters of each reproducible panel.  3b has no parameters of its own
# and reuses those of 3a; its title says so.
FIGURES = {
    "2a": dict(case="mu-imag", v=1.0, mu=np.pi / 12, window=(0.01, 5.0), series=("R_left", "R_right", "T"), features=("reciprocity",)),
    "3a": dict(case="mu-imag", v=9.5, mu=6.2832, window=(0.05, 9.4), series=("R_left", "T"), features=("ss",)),
    "3b": dict(case="mu-imag", v=9.5, mu=6.2832, window=(0.05, 20.0), series=("R_left+T",), features=("ss", "unitarity"), canonical=False),
    "4a": dict(case="mu-imag", v=3.54, mu=1.11, window=(0.1, 10.0), series=("R_left", "R_right", "T"), features=("invisible-left", "invisible-right")),
    "4b": dict(case="mu-imag", v=8.24, mu=6.24, window=(0.1, 10.0), series=("R_left", "R_right", "T"), features=("invisible-left", "invisible-right")),
    "4c": dict(case="mu-imag", v=3.75, mu=3.12, window=(0.01, 20.0), series=("R_left", "R_right", "T"), features=("invisible-left", "invisible-right", "invisible-both")),
    "5": dict(case="real", v=-4.95, mu=0.25, d=2.5, window=(-15.0, 15.0)),
    "6a": dict(case="d-imag", v=0.18, mu=0.42, window=(0.01, 12.0), series=("R_left", "T"), features=("ss",)),
    "6b": dict(case="d-imag", v=0.18, mu=0.42, window=(0.3, 0.6), series=("R_left", "T"), features=("invisible-left",)),
}


@dataclass
class JobConfig:
    command: str
    case: str = "mu-imag"
    v: float = 1.0
    mu: float = 0.0
    emin: float = None
    emax: float = None
    steps: int = None
    kind: str = None
    figure_id: str = None
    samples: int = 20
    tol: float = 1e-6
    seed: int = 0
    bound: bool = False
    d: float = 1.0
    zeta: float = 0.0
    xmin: float = -10.0
    xmax: float = 10.0
    points: int = 401
    out: str = None
    csv: str = None
    format: str = None

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown job keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def params(self):
        return PotentialParams(self.v, self.mu, CaseKind(self.case))


def _add_params(p, need_case=True):
    if need_case:
        p.add_argument("--case", choices=[c.value for c in CaseKind], default="mu-imag")
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)


def _add_window(p, required=True):
    p.add_argument("--emin", type=float, required=required)
    p.add_argument("--emax", type=float, required=required)
    p.add_argument("--steps", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="ptscatter", description="Scattering and bound states of a PT-symmetric Morse-like potential.")
    parser.add_argument("--job", help="run the JobConfig stored in this JSON file")
    parser.add_argument("--save-job", help="write the parsed job to this JSON file before running")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("potential", help="sample V along x")
    _add_params(p)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--zeta", type=float, default=0.0)
    p.add_argument("--xmin", type=float, default=-10.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--out")

    p = sub.add_parser("bound", help="bound-state table")
    _add_params(p, need_case=False)
    p.add_argument("--out")

    p = sub.add_parser("scan", help="R, T and unitarity defect on an energy grid (CSV)")
    _add_params(p)
    _add_window(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "svg"), default=None)

    p = sub.add_parser("features", help="locate features (JSON)")
    _add_params(p)
    _add_window(p)
    p.add_argument("--kind", choices=FEATURE_KINDS, required=True)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="compare closed forms with the integration oracle")
    _add_params(p)
    _add_window(p, required=False)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", action="store_true", help="also check bound energies against finite differences")

    p = sub.add_parser("figure", help="reproduce one panel")
    p.add_argument("--id", dest="figure_id", choices=sorted(FIGURES), required=True)
    p.add_argument("--out", help="SVG path")
    p.add_argument("--csv", help="also write the scan (or potential samples) as CSV")
    return parser


def _job_from_args(args):
    data = {k: v for k, v in vars(args).items() if k not in ("job", "save_job")}
    names = {f.name for f in fields(JobConfig)}
    return JobConfig(**{k: v for k, v in data.items() if k in names})


def _emit(text, path):
    if path:
        report._write_text(path, text)
    else:
        sys.stdout.write(text)


def cmd_potential(job):
    params = job.params()
    x = np.linspace(job.xmin, job.xmax, job.points)
    V = np.atleast_1d(potential_value(params, x, zeta=job.zeta, d=job.d))
    rows = [(xi, Vi.real, Vi.imag) for xi, Vi in zip(x, V)]
    _emit(report.write_rows_csv(("x", "re_V", "im_V"), rows), job.out)
    return EXIT_OK


def cmd_bound(job):
    states = bound_spectrum(job.v, job.mu)
    rows = [(str(s.n), s.b_n, s.a_n.imag, s.epsilon_n, s.A_n.real, s.A_n.imag) for s in states]
    _emit(report.write_rows_csv(("n", "b_n", "im_a_n", "epsilon_n", "re_A_n", "im_A_n"), rows), job.out)
    return EXIT_OK


def cmd_scan(job):
    table = analysis.scan(job.params(), job.emin, job.emax, job.steps)
    fmt = job.format or ("svg" if job.out and job.out.endswith(".svg") else "csv")
    if fmt == "svg":
        if not job.out:
            raise ValueError("svg output needs --out")
        report.emit_svg(table, job.out)
    else:
        _emit(report.scan_csv_text(table), job.out)
    return EXIT_OK


def run_features(params, kind, window, steps=None):
    table = analysis.scan(params, window[0], window[1], steps)
    if kind == "reciprocity":
        return analysis.find_reciprocity_points(params, window, table)
    if kind == "ss":
        return analysis.find_spectral_singularities(params, window, table)
    if kind == "unitarity":
        return analysis.find_unitarity_points(params, window, table)
    side = kind.split("-", 1)[1]
    return analysis.find_invisibility_points(params, side, window, table)


def cmd_features(job):
    res = run_features(job.params(), job.kind, (job.emin, job.emax), job.steps)
    if res.degenerate:
        print("degenerate: the defining function vanishes on the whole window", file=sys.stderr)
    if res.asymptotic:
        print("asymptotic: unitarity restored at the top of the window", file=sys.stderr)
    _emit(report.features_json_text(res.points), job.out)
    return EXIT_OK


def _default_verify_window(params):
    v, mu = params.v, params.mu
    if params.case is CaseKind.D_IMAGINARY:
        lo, hi = penetrating_window(v, mu)
        span = hi - lo
        return lo + 1e-3 * span, hi - 1e-3 * span
    if params.case is CaseKind.REAL:
        top = max(v * np.exp(2 * mu), v * np.exp(-2 * mu), 0.0)
        return top + 0.1, top + 20.0
    return 0.1, 20.0


def pair_relative_error(a, b):
    """max over sides of max(|dr|, |dt|) / max(|r|, |t|)."""
    errs = []
    for r, t in (("r_l", "t_l"), ("r_r", "t_r")):
        ra, ta = getattr(a, r).value, getattr(a, t).value
        rb, tb = getattr(b, r).value, getattr(b, t).value
        scale = np.maximum(np.abs(ra), np.abs(ta))
        errs.append(np.maximum(np.abs(ra - rb), np.abs(ta - tb)) / scale)
    return np.maximum(*errs)


def sample_energies(params, window, samples, seed, clearance=1e-3):
    """Random energies in ``window`` at least ``clearance`` from any pole root."""
    rng = np.random.default_rng(seed)
    roots = [z.real for z in analysis.pole_roots(params, window)]
    out = []
    while len(out) < samples:
        e = float(rng.uniform(*window))
        if all(abs(e - r) >= clearance for r in roots):
            out.append(e)
    return np.array(out)


def cmd_verify(job):
    params = job.params()
    window = (job.emin, job.emax) if job.emin is not None and job.emax is not None else _default_verify_window(params)
    failed = False
    print(f"# verify case={params.case.value} v={params.v:g} mu={params.mu:g} window=({window[0]:.6g}, {window[1]:.6g}) tol={job.tol:g}")
    if params.case is CaseKind.D_IMAGINARY and window[0] >= 0:
        # free states have no integration oracle; report the pole check instead
        res = analysis.find_spectral_singularities(params, window, use_roots=False)
        for p, z in analysis.reconcile_poles(res):
            gap = abs(p.epsilon - z.real) if z is not None else float("nan")
            ok = z is not None and gap <= analysis.POLE_MATCH_TOL
            failed |= not ok
            print(f"ss epsilon={p.epsilon:.10f} pole={'none' if z is None else f'{z.real:.10f}'} gap={gap:.3e} {'ok' if ok else 'FAIL'}")
        thr = params.v * np.exp(2 * params.mu)
        if window[0] < thr < window[1]:
            table = analysis.scan(params, max(window[0], thr - 0.1), min(window[1], thr + 0.1), 4000)
            i = int(np.argmin(table.R_left))
            print(f"R_left minimum near k+ threshold: epsilon={table.epsilon[i]:.6f} R_left={table.R_left[i]:.3e} T={table.T[i]:.6f}")
    else:
        eps = sample_energies(params, window, job.samples, job.seed)
        closed = amplitudes(params, eps)
        integ = integrate_amplitudes(params, eps, IntegrationConfig())
        err = pair_relative_error(closed, integ)
        for e, x in zip(eps, err):
            ok = x <= job.tol
            failed |= not ok
            print(f"epsilon={e:.10f} pair_rel_err={x:.3e} {'ok' if ok else 'FAIL'}")
    if job.bound and params.case is CaseKind.MU_IMAGINARY:
        for s in bound_spectrum(params.v, params.mu):
            fd = bound_oracle(params, targets=[s.epsilon_n])[0]
            gap = abs(fd - s.epsilon_n)
            ok = gap <= 1e-4
            failed |= not ok
            print(f"bound n={s.n} epsilon={s.epsilon_n:.8f} fd={fd.real:.8f}{fd.imag:+.2e}j gap={gap:.3e} {'ok' if ok else 'FAIL'}")
    print("FAILED" if failed else "PASSED")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_figure(job):
    fig = FIGURES[job.figure_id]
    params = PotentialParams(fig["v"], fig["mu"], CaseKind(fig["case"]))
    label = f"{job.figure_id}: v={fig['v']:g}, mu={fig['mu']:g}"
    if not fig.get("canonical", True):
        label += " (parameters reused from 3a)"
    if job.figure_id == "5":
        x = np.linspace(*fig["window"], 601)
        V = np.real(potential_value(params, x, d=fig["d"]))
        if job.out:
            report.emit_curve_svg(x, V, job.out, "x", "effective potential", label + f", d={fig['d']:g}")
        if job.csv:
            report.write_rows_csv(("x", "V"), list(zip(x, V)), job.csv)
        print(f"# {label}, d={fig['d']:g}: max V = {V.max():.6g} at x = {x[np.argmax(V)]:.6g}")
        return EXIT_OK
    lo, hi = fig["window"]
    table = analysis.scan(params, lo, hi)
    print(f"# {label}")
    marks = []
    for kind in fig["features"]:
        res = run_features(params, kind, (lo, hi))
        for p in res.points:
            marks.append(p.epsilon)
            print(f"{kind} epsilon={p.epsilon:.10g} residual={p.residual:.3e} refined={p.refined}")
        if res.degenerate:
            print(f"{kind}: degenerate")
        if res.asymptotic:
            print(f"{kind}: restored asymptotically at the window top")
    for side in ("left", "right"):
        if f"invisible-{side}" in fig["features"]:
            R = getattr(table, f"R_{side}")
            i = int(np.nanargmin(R))
            print(f"R_{side} grid minimum epsilon={table.epsilon[i]:.6f} R={R[i]:.3e} T={table.T[i]:.6f}")
    if job.out:
        report.emit_svg(table, job.out, title=label, series=fig["series"], marks=sorted(marks))
    if job.csv:
        report.write_scan_csv(table, job.csv)
    return EXIT_OK


COMMANDS = {
    "potential": cmd_potential,
    "bound": cmd_bound,
    "scan": cmd_scan,
    "features": cmd_features,
    "verify": cmd_verify,
    "figure": cmd_figure,
}


def run_job(job):
    if job.command not in COMMANDS:
        raise ValueError(f"unknown command {job.command!r}")
    return COMMANDS[job.command](job)


def run_cli(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.job:
            with open(args.job) as fh:
                job = JobConfig.from_json(fh.read())
        elif args.command:
            job = _job_from_args(args)
        else:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if args.save_job:
            report._write_text(args.save_job, job.to_json() + "\n")
        return run_job(job)
    except (RegimeError, DomainError, ValueError) as exc:
        print(f"ptscatter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"ptscatter: verification error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"ptscatter: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
