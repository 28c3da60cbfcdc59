"""Command-line front end.

Exit codes: 0 success, 2 model validation failure, 3 infeasible risk
parameter, 4 numerical failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import homotopy as homotopy_mod
from . import horizon as horizon_mod
from . import onemode as onemode_mod
from . import rate as rate_mod
from .errors import FeasibilityError, ModelError, NumericalError
from .io import load_model, write_csv, write_summary
from .model import StateSpace
from .quadrature import QuadratureConfig
from .spectral import sample_grid, spectral_sample
from .twomode import two_mode_example


def _exit_on_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ModelError as exc:
            click.echo(f"validation failure: {exc}", err=True)
            sys.exit(2)
        except FeasibilityError as exc:
            click.echo(f"infeasible risk parameter: {exc}", err=True)
            sys.exit(3)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(4)
    return wrapper


def _limit_threads(n: int | None) -> None:
    if n is None:
        return
    try:
        from threadpoolctl import threadpool_limits
        threadpool_limits(limits=n)
    except ImportError:
        click.echo("threadpoolctl not installed; --threads ignored", err=True)


def _get_model(model_path: str | None) -> StateSpace:
    if model_path is None:
        return two_mode_example()
    return load_model(model_path)


def _config(ss: StateSpace, cutoff: float | None, step: float | None) -> QuadratureConfig:
    cfg = QuadratureConfig.for_system(ss)
    overrides = {}
    if cutoff is not None:
        overrides["cutoff"] = cutoff
    if step is not None:
        overrides["step"] = step
    if overrides:
        cfg = QuadratureConfig(cutoff=overrides.get("cutoff", cfg.cutoff),
                               step=overrides.get("step", cfg.step))
    return cfg


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _manifest(command: str, model_path, out, **overrides) -> dict:
    used = {k: v for k, v in overrides.items() if v is not None}
    return {"command": command, "model": model_path, "out": str(out), **used}


model_option = click.option("--model", "model_path", type=click.Path(exists=True),
                            default=None, help="Model JSON; built-in two-mode "
                            "example when omitted.")
out_option = click.option("--out", default=".", show_default=True,
                          help="Output directory.")
cutoff_option = click.option("--cutoff", type=float, default=None,
                             help="Frequency cutoff override.")
step_option = click.option("--step", type=float, default=None,
                           help="Frequency mesh step override.")
threads_option = click.option("--threads", type=int, default=None,
                              help="Cap BLAS thread count.")


@click.group()
@click.version_option(__version__)
def main():
    """Growth rates of quadratic-exponential costs for linear quantum models."""


@main.command()
@model_option
@out_option
@threads_option
@_exit_on_errors
def validate(model_path, out, threads):
    """Validate a model and report its structural diagnostics."""
    _limit_threads(threads)
    ss = _get_model(model_path)
    cfg = QuadratureConfig.for_system(ss)
    eigs = np.linalg.eigvals(ss.a)
    summary = {
        "command": "validate",
        "version": __version__,
        "model": model_path,
        "manifest": _manifest("validate", model_path, out),
        "pr_residual": ss.pr_residual(),
        "sigma_residual": ss.sigma_residual(),
        "hurwitz_margin": ss.hurwitz_margin(),
        "noise_det": ss.noise_det(),
        "theta0": rate_mod.theta_threshold(ss, cfg),
        "drift_eigenvalues": [[float(e.real), float(e.imag)] for e in eigs],
        "drift_norm": float(np.linalg.norm(ss.a, 2)),
        "status": "ok",
    }
    path = _out_dir(out) / "validate.json"
    write_summary(path, summary)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command(name="rate")
@model_option
@click.option("--theta", type=float, required=True, help="Risk parameter.")
@out_option
@cutoff_option
@step_option
@threads_option
@_exit_on_errors
def rate_cmd(model_path, theta, out, cutoff, step, threads):
    """Growth rate at one risk parameter, with per-frequency CSV."""
    _limit_threads(threads)
    ss = _get_model(model_path)
    cfg = _config(ss, cutoff, step)
    result = rate_mod.upsilon(ss, theta, cfg)
    lambdas, neg_ld, classical = rate_mod.frequency_profile(ss, theta, cfg)
    out_path = _out_dir(out)
    write_csv(out_path / "frequency_profile.csv",
              ["lambda", "neg_log_det_D", "classical_integrand"],
              zip(lambdas.tolist(), neg_ld.tolist(), classical.tolist()))
    summary = {
        "command": "rate",
        "version": __version__,
        "model": model_path,
        "manifest": _manifest("rate", model_path, out, theta=theta,
                              cutoff=cutoff, step=step),
        "theta": result.theta,
        "upsilon": result.upsilon,
        "classical_v": None if np.isnan(result.classical_v) else result.classical_v,
        "margin": result.margin,
        "tail_contrib": result.tail_contrib,
        "n_freq": result.n_freq,
        "theta0": rate_mod.theta_threshold(ss, cfg),
        "lqg_rate": rate_mod.lqg_rate(ss),
        "cutoff": cfg.cutoff,
        "step": cfg.step,
        "status": "ok" if result.converged else "quadrature-warning",
    }
    write_summary(out_path / "summary.json", summary)
    click.echo(f"upsilon({theta:g}) = {result.upsilon:.9g}")


@main.command()
@model_option
@click.option("--theta-max", type=float, default=None,
              help="Top of the sweep; defaults to 0.9 * theta0.")
@click.option("--points", type=int, default=10, show_default=True)
@out_option
@cutoff_option
@step_option
@threads_option
@_exit_on_errors
def sweep(model_path, theta_max, points, out, cutoff, step, threads):
    """Growth rate over a grid of risk parameters."""
    _limit_threads(threads)
    ss = _get_model(model_path)
    cfg = _config(ss, cutoff, step)
    if theta_max is None:
        theta_max = 0.9 * rate_mod.theta_threshold(ss, cfg)
    grid = sample_grid(ss, cfg.lambdas())
    rows = []
    for theta in np.linspace(0.0, theta_max, points):
        try:
            res = rate_mod.upsilon_from_grid(grid, float(theta), cfg)
            rows.append((float(theta), res.upsilon, res.classical_v,
                         res.margin, "ok"))
        except FeasibilityError:
            rows.append((float(theta), float("nan"), float("nan"),
                         float("nan"), "infeasible"))
    out_path = _out_dir(out)
    write_csv(out_path / "sweep.csv",
              ["theta", "upsilon", "classical_v", "margin", "status"], rows)
    write_summary(out_path / "summary.json", {
        "command": "sweep", "version": __version__, "model": model_path,
        "manifest": _manifest("sweep", model_path, out, theta_max=theta_max,
                              points=points, cutoff=cutoff, step=step),
        "theta": float(theta_max), "status": "ok",
    })
    click.echo(f"wrote {len(rows)} rows to {out_path / 'sweep.csv'}")


@main.command(name="homotopy")
@model_option
@click.option("--theta-max", type=float, default=None,
              help="March target; defaults to 0.9 * theta0.")
@click.option("--dtheta", type=float, default=None,
              help="Step in theta; defaults to 0.01 * theta0.")
@out_option
@cutoff_option
@step_option
@threads_option
@_exit_on_errors
def homotopy_cmd(model_path, theta_max, dtheta, out, cutoff, step, threads):
    """Growth rate by the Riccati march in the risk parameter."""
    _limit_threads(threads)
    ss = _get_model(model_path)
    cfg = _config(ss, cutoff, step)
    theta0 = rate_mod.theta_threshold(ss, cfg)
    if theta_max is None:
        theta_max = 0.9 * theta0
    if dtheta is None:
        dtheta = 0.01 * theta0
    trace = homotopy_mod.rate_by_homotopy(ss, theta_max, dtheta, cfg)
    out_path = _out_dir(out)
    write_csv(out_path / "homotopy.csv",
              ["theta", "upsilon_prime", "upsilon"],
              zip(trace.theta_grid.tolist(), trace.rate_derivative.tolist(),
                  trace.rate.tolist()))
    write_summary(out_path / "summary.json", {
        "command": "homotopy", "version": __version__, "model": model_path,
        "manifest": _manifest("homotopy", model_path, out,
                              theta_max=theta_max, dtheta=dtheta,
                              cutoff=cutoff, step=step),
        "theta": float(theta_max), "theta0": theta0,
        "upsilon": float(trace.rate[-1]), "status": "ok",
    })
    click.echo(f"upsilon({theta_max:g}) = {trace.rate[-1]:.9g}")


@main.command(name="horizon")
@model_option
@click.option("--theta", type=float, required=True)
@click.option("--horizons", default="10,20,40", show_default=True,
              help="Comma-separated horizon list.")
@click.option("--dt", type=float, default=0.025, show_default=True,
              help="Time step of the kernel discretization.")
@click.option("--max-dim", type=int, default=horizon_mod.DEFAULT_MAX_DIM,
              show_default=True, help="Memory guard on the matrix order.")
@out_option
@threads_option
@_exit_on_errors
def horizon_cmd(model_path, theta, horizons, dt, max_dim, out, threads):
    """Finite-horizon oracle sweep with 1/T extrapolation."""
    _limit_threads(threads)
    ss = _get_model(model_path)
    ts = [float(t) for t in horizons.split(",") if t.strip()]
    if not ts:
        raise NumericalError("empty horizon list")
    study = horizon_mod.convergence_study(ss, theta, ts,
                                          n_per_unit_time=int(round(1.0 / dt)),
                                          max_dim=max_dim)
    out_path = _out_dir(out)
    rows = [(e.horizon, e.n_grid, e.ln_xi, e.per_time_rate, e.spec_value,
             study.extrapolated_rate) for e in study.estimates]
    write_csv(out_path / "horizon.csv",
              ["T", "N", "ln_xi", "rate", "spec_value", "extrapolated_rate"],
              rows)
    write_summary(out_path / "summary.json", {
        "command": "horizon", "version": __version__, "model": model_path,
        "manifest": _manifest("horizon", model_path, out, theta=theta,
                              horizons=horizons, dt=dt, max_dim=max_dim),
        "theta": theta, "extrapolated_rate": study.extrapolated_rate,
        "status": "ok",
    })
    click.echo(f"extrapolated rate = {study.extrapolated_rate:.9g}")


@main.command()
@model_option
@click.option("--alpha", default="", help="Comma-separated tail levels.")
@click.option("--eps", default="", help="Comma-separated uncertainty budgets.")
@click.option("--theta-points", type=int, default=30, show_default=True)
@out_option
@cutoff_option
@step_option
@threads_option
@_exit_on_errors
def bounds(model_path, alpha, eps, theta_points, out, cutoff, step, threads):
    """Tail decay-rate and worst-case cost bounds over parameter grids."""
    _limit_threads(threads)
    ss = _get_model(model_path)
    cfg = _config(ss, cutoff, step)
    theta0 = rate_mod.theta_threshold(ss, cfg)
    theta_grid = np.linspace(0.05, 0.95, theta_points) * theta0
    alphas = [float(a) for a in alpha.split(",") if a.strip()]
    epses = [float(e) for e in eps.split(",") if e.strip()]
    if not alphas:
        alphas = [rate_mod.lqg_rate(ss) * f for f in (1.0, 1.5, 2.0)]
    if not epses:
        epses = [0.0, 0.01, 0.1]
    rows_a, rows_e = [], []
    for a in alphas:
        try:
            rows_a.append((a, rate_mod.tail_bound(ss, a, theta_grid, cfg), "ok"))
        except FeasibilityError:
            rows_a.append((a, float("nan"), "infeasible"))
    for e in epses:
        try:
            rows_e.append((e, rate_mod.worst_case_lqg_bound(ss, e, theta_grid, cfg),
                           "ok"))
        except FeasibilityError:
            rows_e.append((e, float("nan"), "infeasible"))
    out_path = _out_dir(out)
    write_csv(out_path / "tail_bounds.csv", ["alpha", "bound", "status"], rows_a)
    write_csv(out_path / "worst_case_bounds.csv", ["eps", "bound", "status"],
              rows_e)
    write_summary(out_path / "summary.json", {
        "command": "bounds", "version": __version__, "model": model_path,
        "manifest": _manifest("bounds", model_path, out, alpha=alpha or None,
                              eps=eps or None, theta_points=theta_points,
                              cutoff=cutoff, step=step),
        "theta0": theta0, "status": "ok",
    })
    click.echo(f"wrote bounds for {len(rows_a)} tail levels, "
               f"{len(rows_e)} budgets")


@main.command(name="onemode-check")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@out_option
@threads_option
@_exit_on_errors
def onemode_check(seed, samples, out, threads):
    """Cross-check the generic pipeline against single-mode closed forms."""
    _limit_threads(threads)
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(2, 2))
    r = g @ g.T + 0.5 * np.eye(2)
    m_mat = rng.normal(size=(4, 2))
    if (m_mat.T @ np.kron(np.array([[0., 1.], [-1., 0.]]), np.eye(2)) @ m_mat)[0, 1] < 0:
        m_mat = m_mat @ np.diag([1.0, -1.0])
    params = onemode_mod.OneModeParams.from_matrices(r, m_mat)
    ss = onemode_mod.to_state_space(params)
    lams = rng.uniform(-8.0, 8.0, size=samples)
    dev_psi = 0.0
    dev_trig = 0.0
    for lam in lams:
        sample = spectral_sample(ss, lam)
        a, b = onemode_mod.ab_functions(params.mu, params.nu, 1j * lam)
        from .model import BJ2
        closed = a * np.eye(2) + b * BJ2
        dev_psi = max(dev_psi, float(np.max(np.abs(sample.psi - closed))))
        theta = 0.3 / (1.0 + abs(float(lam)))
        cos_c, sin_c = onemode_mod.onemode_trig(params.mu, params.nu,
                                                1j * lam, theta)
        from .spectral import trig_bundle
        tb = trig_bundle(sample, theta)
        sin_generic = theta * sample.psi @ tb.sinc_tp
        dev_trig = max(dev_trig,
                       float(np.max(np.abs(tb.cos_tp - cos_c))),
                       float(np.max(np.abs(sin_generic - sin_c))))
    res_dets = [abs(np.linalg.det(onemode_mod.residue_at(params.mu, params.nu, p)))
                for p in onemode_mod.poles(params.mu, params.nu)]
    summary = {
        "command": "onemode-check", "version": __version__, "model": None,
        "manifest": _manifest("onemode-check", None, out, seed=seed,
                              samples=samples),
        "max_dev": {"psi": dev_psi, "trig": dev_trig,
                    "residue_det": max(res_dets)},
        "status": "ok" if max(dev_psi, dev_trig) < 1e-10
                  and max(res_dets) < 1e-6 else "mismatch",
    }
    write_summary(_out_dir(out) / "summary.json", summary)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))
    if summary["status"] != "ok":
        sys.exit(4)


@main.command()
@click.option("--dtheta-frac", type=float, default=0.01, show_default=True,
              help="Theta step as a fraction of theta0.")
@out_option
@cutoff_option
@step_option
@threads_option
@_exit_on_errors
def example(out, dtheta_frac, cutoff, step, threads):
    """Reproduce the two-mode example artifacts.

    Writes logdet_profile.csv (per-frequency integrand at 0.9 theta0 with
    its high-frequency asymptote), rate_curve.csv (growth rate by the
    direct quadrature and by the Riccati march), and summary.json.
    """
    _limit_threads(threads)
    ss = two_mode_example()
    cfg = _config(ss, cutoff, step)
    theta0 = rate_mod.theta_threshold(ss, cfg)
    theta_hi = 0.9 * theta0
    out_path = _out_dir(out)

    lambdas, neg_ld, _ = rate_mod.frequency_profile(ss, theta_hi, cfg)
    tail_coeff = ss.lqg_weight_trace()
    with np.errstate(divide="ignore"):
        asym = np.where(lambdas > 0, theta_hi * tail_coeff / lambdas ** 2,
                        float("inf"))
    write_csv(out_path / "logdet_profile.csv",
              ["lambda", "neg_log_det_D", "asymptote"],
              zip(lambdas.tolist(), neg_ld.tolist(), asym.tolist()))

    dtheta = dtheta_frac * theta0
    trace = homotopy_mod.rate_by_homotopy(ss, theta_hi, dtheta, cfg)
    grid = sample_grid(ss, cfg.lambdas())
    direct = np.array([rate_mod.upsilon_from_grid(grid, float(t), cfg).upsilon
                       for t in trace.theta_grid])
    write_csv(out_path / "rate_curve.csv",
              ["theta", "upsilon_homotopy", "upsilon_direct"],
              zip(trace.theta_grid.tolist(), trace.rate.tolist(),
                  direct.tolist()))

    nonzero = trace.theta_grid > 0
    gap = float(np.max(np.abs(trace.rate[nonzero] - direct[nonzero])
                       / np.abs(direct[nonzero])))
    eigs = np.linalg.eigvals(ss.a)
    write_summary(out_path / "summary.json", {
        "command": "example", "version": __version__, "model": None,
        "manifest": _manifest("example", None, out, dtheta_frac=dtheta_frac,
                              cutoff=cutoff, step=step),
        "theta0": theta0,
        "drift_eigenvalues": [[float(e.real), float(e.imag)] for e in eigs],
        "drift_norm": float(np.linalg.norm(ss.a, 2)),
        "lqg_rate": rate_mod.lqg_rate(ss),
        "cross_method_gap": gap,
        "cutoff": cfg.cutoff, "step": cfg.step,
        "status": "ok",
    })
    click.echo(f"theta0 = {theta0:.6g}, cross-method gap = {gap:.3g}")


if __name__ == "__main__":
    main()
