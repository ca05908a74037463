"""Command-line front end: experiments in, CSV/JSON/SVG reports out.

Subcommands: theory, gq, fit, envelope, witness, airy, lemma51, lemma52.
Reruns with an identical config produce byte-identical outputs: floats are
written with 17 significant digits, reductions have fixed order, and the
worker count never affects values.  Exit codes: 0 success, 2 validation
failure, 3 a check that ran fine but whose statistical target failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config, resolve_out_dir
from .curve import planar_order
from .decay import (DecaySeries, SeriesRow, envelope_check, experiment_grid,
                    fit_exponent, gq_series, planar_adapted_grid,
                    resolution_check)
from .errors import ConfigError, CurveDecayError
from .kernels import active_backend
from .oscquad import CutoffSpec
from .svg import LinePlot
from .theory import (breakpoint_q, breakpoints, decay_exponent,
                     predicted_model, predictions_csv)

EXIT_OK, EXIT_VALIDATION, EXIT_STATFAIL = 0, 2, 3


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _preamble(extra: dict | None = None, cfg: ExperimentConfig | None = None) -> str:
    lines = [f"# curvedecay_version={__version__}",
             f"# backend={active_backend()}"]
    if cfg is not None:
        lines.append(f"# config_hash={cfg.config_hash}")
        lines.append(f"# config={cfg.canonical}")
    for k, v in (extra or {}).items():
        lines.append(f"# {k}={v}")
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str, verbose: bool):
    path.write_text(text, encoding="utf-8")
    print(path)
    if verbose:
        print(f"  ({len(text.splitlines())} lines)", file=sys.stderr)


# -- theory ------------------------------------------------------------------


def cmd_theory(args) -> int:
    out = resolve_out_dir(args.out, None)
    d, K = args.d, args.K
    if args.breakpoints:
        verts = breakpoints(d, K)
        lines = ["d,K,inv_q_num,inv_q_den,sigma_num,sigma_den"]
        for iq, sg in verts:
            lines.append(f"{d},{K},{iq.numerator},{iq.denominator},"
                         f"{sg.numerator},{sg.denominator}")
        text = _preamble() + "\n".join(lines) + "\n"
        _write(out / f"theory_breakpoints_d{d}_K{K}.csv", text, args.verbose)
        if args.svg:
            plot = LinePlot(f"decay exponent polyline d={d} K={K}",
                            "1/q", "sigma")
            plot.add("breakpoints", [float(v[0]) for v in verts],
                     [float(v[1]) for v in verts], marker=True)
            _write(out / f"theory_breakpoints_d{d}_K{K}.svg", plot.render(),
                   args.verbose)
        return EXIT_OK
    if not args.q:
        print("theory: need --q values or --breakpoints", file=sys.stderr)
        return EXIT_VALIDATION
    from fractions import Fraction
    qs = [Fraction(s) for s in args.q]
    text = _preamble() + predictions_csv(d, K, qs)
    _write(out / f"theory_d{d}_K{K}.csv", text, args.verbose)
    for q in qs:
        p = decay_exponent(d, K, q)
        print(f"  q={q}: sigma={p.sigma} kstar={p.kstar} beta={p.beta}")
    return EXIT_OK


# -- gq ------------------------------------------------------------------------


def _grid_fn_from_choice(choice: str, curve, seed: int):
    if choice == "product":
        from .sphere import default_resolution, product_grid
        return lambda R: product_grid(curve.dim, default_resolution(curve.dim, R))
    if choice == "polar":
        if curve.dim != 3:
            raise ConfigError("polar grid is only defined for d=3")
        return planar_adapted_grid
    if choice == "mc":
        from .decay import MC_CAP
        from .sphere import SphericalGrid, surface_area

        def mc(R):
            n = int(min(10_000 * math.sqrt(max(R, 1.0)), MC_CAP))
            rng = np.random.default_rng([int(seed), int(R)])
            pts = rng.standard_normal((n, curve.dim))
            pts /= np.linalg.norm(pts, axis=1)[:, None]
            return SphericalGrid(curve.dim, pts,
                                 np.full(n, surface_area(curve.dim) / n), n)
        return mc
    return None  # auto


def series_csv_text(series_by_q: dict, cfg: ExperimentConfig,
                    degenerate: bool, extra: dict | None = None) -> str:
    extra = dict(extra or {})
    for q, ser in sorted(series_by_q.items()):
        sigma, beta = predicted_model(ser.d, ser.K, _as_fraction(q), degenerate)
        extra[f"prediction_q={q:g}"] = f"sigma={sigma} beta={beta}"
    extra["degenerate"] = int(degenerate)
    lines = ["curve_id,d,K,q,R,Gq,m,resolved_fraction"]
    for q, ser in sorted(series_by_q.items()):
        for r in ser.rows:
            lines.append(f"{ser.curve_id},{ser.d},{ser.K},{fmt(q)},{fmt(r.R)},"
                         f"{fmt(r.value)},{r.m},{fmt(r.resolved_fraction)}")
    return _preamble(extra, cfg) + "\n".join(lines) + "\n"


def _as_fraction(q: float):
    from fractions import Fraction
    return Fraction(q).limit_denominator(1000)


def cmd_gq(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    out = resolve_out_dir(args.out, cfg)
    curve = cfg.load_curve()
    p = cfg.gq_params(curve)
    grid_fn = _grid_fn_from_choice(p["grid"], curve, cfg.seed)
    series = gq_series(curve, p["cutoff"], p["qs"], p["r_values"],
                       grid_fn=grid_fn, workers=cfg.workers, seed=cfg.seed)
    extra = {}
    if p["check_resolution_at"]:
        Rc = float(p["check_resolution_at"])
        from .sphere import default_resolution
        m = default_resolution(curve.dim, Rc)
        v1, v2, rel = resolution_check(curve, p["cutoff"], p["qs"][0], Rc, m,
                                       workers=cfg.workers)
        extra["resolution_check"] = f"R={fmt(Rc)} m={m} rel_change={fmt(rel)}"
        extra["under_resolved"] = int(rel > 0.01)
    k_planar = planar_order(curve)
    degenerate = k_planar is not None
    text = series_csv_text(series, cfg, degenerate, extra)
    _write(out / f"gq_{curve.curve_id}.csv", text, args.verbose)
    return EXIT_OK


# -- fit -----------------------------------------------------------------------


def read_series_csv(path) -> tuple[dict, bool]:
    """Parse a gq CSV back into DecaySeries objects (grouped by q)."""
    degenerate = False
    rows_by_q: dict = {}
    meta: dict = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            if line.startswith("# degenerate="):
                degenerate = line.strip().endswith("1")
            continue
        if not line or line.startswith("curve_id,"):
            continue
        cid, d, K, q, R, gq, m, frac = line.split(",")
        key = float(q)
        meta[key] = (cid, int(d), int(K))
        rows_by_q.setdefault(key, []).append(
            SeriesRow(float(R), float(gq), int(m), float(frac)))
    out = {}
    for q, rows in rows_by_q.items():
        cid, d, K = meta[q]
        out[q] = DecaySeries(cid, d, K, q, tuple(sorted(rows, key=lambda r: r.R)),
                             CutoffSpec(0.0, 0.5, "bump"))
    return out, degenerate


def cmd_fit(args) -> int:
    series_by_q, degenerate = read_series_csv(args.series_csv)
    out = resolve_out_dir(args.out, None)
    worst = EXIT_OK
    for q, ser in sorted(series_by_q.items()):
        fit = fit_exponent(ser, force_beta=args.force_beta)
        sigma, beta = predicted_model(ser.d, ser.K, _as_fraction(q), degenerate)
        doc = {
            "curve_id": ser.curve_id, "d": ser.d, "K": ser.K, "q": q,
            "sigma_hat": fit.sigma_hat, "beta_hat": fit.beta_hat,
            "amplitude": fit.amplitude, "residual_rms": fit.residual_rms,
            "residual_rms_log2": fit.residual_rms_log2,
            "window": list(fit.window), "n_used": fit.n_used,
            "n_excluded": fit.n_excluded,
            "model_comparison": fit.model_comparison(),
            "unreliable": fit.unreliable,
            "prediction": {"sigma": [sigma.numerator, sigma.denominator],
                           "beta": [beta.numerator, beta.denominator],
                           "degenerate": degenerate},
            "curvedecay_version": __version__,
        }
        path = out / f"fit_{ser.curve_id}_q{q:g}.json"
        _write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n",
               args.verbose)
        if fit.unreliable:
            worst = EXIT_STATFAIL
        if args.svg:
            plot = LinePlot(f"{ser.curve_id} q={q:g} decay",
                            "log2 R", "log2 G")
            rows = ser.included_rows()
            xs = [math.log2(r.R) for r in rows]
            plot.add("data", xs, [math.log2(r.value) for r in rows], marker=True)
            c, s, b = fit.amplitude, fit.sigma_hat, fit.beta_hat
            plot.add("fit", xs,
                     [math.log2(c * r.R ** -s * math.log(r.R) ** b)
                      for r in rows])
            sg = float(sigma)
            anchor = rows[-1].value * rows[-1].R ** sg
            plot.add("predicted slope", xs,
                     [math.log2(anchor * r.R ** -sg) for r in rows],
                     dashed=True)
            _write(out / f"fit_{ser.curve_id}_q{q:g}.svg", plot.render(),
                   args.verbose)
    return worst


# -- envelope ------------------------------------------------------------------


def cmd_envelope(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    out = resolve_out_dir(args.out, cfg)
    curve = cfg.load_curve()
    p = cfg.envelope_params(curve)
    reports = envelope_check(curve, p["cutoff"], p["r_values"], p["order"],
                             workers=cfg.workers, seed=cfg.seed)
    lines = ["R,C,resolved_fraction"]
    for rep in reports:
        lines.append(f"{fmt(rep.R)},{fmt(rep.constant)},"
                     f"{fmt(rep.resolved_fraction)}")
    cs = [rep.constant for rep in reports]
    stable = max(cs) <= 2.0 * min(cs) if cs else False
    text = _preamble({"stable_within_factor_2": int(stable)}, cfg) \
        + "\n".join(lines) + "\n"
    _write(out / f"envelope_{curve.curve_id}.csv", text, args.verbose)

    lines = ["R,l,fraction,bound,ratio"]
    for rep in reports:
        for row in rep.level_sets:
            lines.append(f"{fmt(rep.R)},{row.l},{fmt(row.fraction)},"
                         f"{fmt(row.bound)},{fmt(row.ratio)}")
    _write(out / f"levelsets_{curve.curve_id}.csv",
           _preamble(None, cfg) + "\n".join(lines) + "\n", args.verbose)
    return EXIT_OK if stable else EXIT_STATFAIL


# -- witness -------------------------------------------------------------------


def cmd_witness(args) -> int:
    from .witness import (default_witness_cutoff, sample_dyadic_witness,
                          sample_witness_set, verify_lower_bound)
    cfg = load_config(args.config, args.seed, args.workers)
    out = resolve_out_dir(args.out, cfg)
    curve = cfg.load_curve()
    p = cfg.witness_params()
    lines = ["k,d,R,epsilon_or_delta,j,n,accepted,rate,stderr,min_scaled_FR"]
    failed = False
    jobs = []
    if p["mode"] == "cap":
        jobs = [(R, n, None) for R, n in zip(p["r_values"], p["ns"])]
    else:
        jobs = [(R, n, j) for R, n in zip(p["r_values"], p["ns"])
                for j in (p["j"] or [0])]
    for R, n, j in jobs:
        if p["mode"] == "cap":
            batch = sample_witness_set(curve, p["t0"], p["k"], p["radius"],
                                       R, n, cfg.seed)
        else:
            batch = sample_dyadic_witness(curve, p["t0"], p["k"], p["radius"],
                                          j, R, n, cfg.seed,
                                          tau1=p["tau1"], tau2=p["tau2"])
        min_scaled = ""
        if batch.n_accepted == 0:
            failed = True
        elif p["verify"]:
            lo, hi = batch.curve.interval
            cut = CutoffSpec(batch.t0, p["half_width_fraction"] * (hi - lo),
                             "bump")
            rep = verify_lower_bound(batch, cutoff=cut, workers=cfg.workers)
            min_scaled = fmt(rep.min_scaled)
        lines.append(f"{p['k']},{curve.dim},{fmt(R)},{fmt(p['radius'])},"
                     f"{'' if j is None else j},{n},{batch.n_accepted},"
                     f"{fmt(batch.rate)},{fmt(batch.stderr)},{min_scaled}")
    text = _preamble({"mode": p["mode"]}, cfg) + "\n".join(lines) + "\n"
    _write(out / f"witness_{curve.curve_id}_k{p['k']}.csv", text, args.verbose)
    return EXIT_STATFAIL if failed else EXIT_OK


# -- asymptotics reports ---------------------------------------------------------


def cmd_airy(args) -> int:
    from .asymptotics import airy
    out = resolve_out_dir(args.out, None)
    taus = np.arange(args.tau_min, args.tau_max + 1e-12, args.step)
    lines = ["tau,value,method,error_estimate"]
    for tau in taus:
        av = airy(float(tau))
        lines.append(f"{fmt(tau)},{fmt(av.value)},{av.method},{fmt(av.error)}")
    _write(out / "airy.csv", _preamble() + "\n".join(lines) + "\n",
           args.verbose)
    return EXIT_OK


def cmd_lemma51(args) -> int:
    from .asymptotics import check_phase_asymptotics
    out = resolve_out_dir(args.out, None)
    lams = [float(s) for s in args.lam]
    rep = check_phase_asymptotics(args.k, lams, delta=args.delta)
    extra = {"k": args.k, "delta": fmt(args.delta),
             "fitted_order": fmt(rep.fitted_order),
             "threshold": fmt(rep.threshold),
             "fitted_constant": fmt(rep.fitted_constant),
             "passed": int(rep.passed)}
    lines = ["lam,residual,main_abs,resolved"]
    for r in rep.rows:
        lines.append(f"{fmt(r.lam)},{fmt(r.residual)},{fmt(abs(r.main_term))},"
                     f"{int(r.resolved)}")
    _write(out / f"lemma51_k{args.k}.csv",
           _preamble(extra) + "\n".join(lines) + "\n", args.verbose)
    print(f"  fitted decay order {rep.fitted_order:.4f} "
          f"(need >= {rep.threshold:.4f}): "
          f"{'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_STATFAIL


def cmd_lemma52(args) -> int:
    from .asymptotics import airy_comparison_grid
    out = resolve_out_dir(args.out, None)
    lams = [float(s) for s in args.lam]
    thetas = [float(s) for s in args.theta]
    rows, c_fit = airy_comparison_grid(lams, thetas, eps=args.eps)
    lines = ["lam,theta,J_re,J_im,E1,E2,envelope,ratio1,ratio2,resolved"]
    for r in rows:
        lines.append(
            f"{fmt(r.lam)},{fmt(r.theta)},{fmt(r.value.real)},"
            f"{fmt(r.value.imag)},{fmt(r.err_airy)},{fmt(r.err_cosine)},"
            f"{fmt(r.envelope)},{fmt(r.err_airy / r.envelope)},"
            f"{fmt(r.err_cosine / r.envelope)},{int(r.resolved)}")
    ok = c_fit <= args.cmax
    extra = {"eps": fmt(args.eps), "fitted_C": fmt(c_fit),
             "cmax": fmt(args.cmax), "passed": int(ok)}
    _write(out / "lemma52.csv", _preamble(extra) + "\n".join(lines) + "\n",
           args.verbose)
    print(f"  fitted envelope constant {c_fit:.3f} "
          f"(allow <= {args.cmax:g}): {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_STATFAIL


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="curvedecay",
        description="Spherical average decay experiments for Fourier "
                    "transforms of curve measures.")
    ap.add_argument("--version", action="version", version=__version__)

    def common(sub, config_required=False):
        sub.add_argument("--config", required=config_required,
                         help="experiment config JSON")
        sub.add_argument("--out", help="output directory "
                         "(default $CURVEDECAY_OUT or ./curvedecay_out)")
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--workers", type=int, default=None)
        sub.add_argument("--verbose", "-v", action="store_true")

    sp = ap.add_subparsers(dest="command", required=True)

    t = sp.add_parser("theory", help="exact exponent predictions")
    common(t)
    t.add_argument("--d", type=int, required=True)
    t.add_argument("--K", type=int, required=True)
    t.add_argument("--q", nargs="*", default=[],
                   help="rational q values, e.g. 7 22/3")
    t.add_argument("--breakpoints", action="store_true")
    t.add_argument("--svg", action="store_true")
    t.set_defaults(func=cmd_theory)

    g = sp.add_parser("gq", help="compute a decay series")
    common(g, config_required=True)
    g.set_defaults(func=cmd_gq)

    f = sp.add_parser("fit", help="fit exponents to a series CSV")
    common(f)
    f.add_argument("series_csv")
    f.add_argument("--force-beta", type=float, default=None)
    f.add_argument("--svg", action="store_true")
    f.set_defaults(func=cmd_fit)

    e = sp.add_parser("envelope", help="pointwise envelope constant check")
    common(e, config_required=True)
    e.set_defaults(func=cmd_envelope)

    w = sp.add_parser("witness", help="witness-set sampling and lower bounds")
    common(w, config_required=True)
    w.set_defaults(func=cmd_witness)

    a = sp.add_parser("airy", help="tabulate the Airy function")
    common(a)
    a.add_argument("--tau-min", type=float, default=-30.0)
    a.add_argument("--tau-max", type=float, default=6.0)
    a.add_argument("--step", type=float, default=0.25)
    a.set_defaults(func=cmd_airy)

    l1 = sp.add_parser("lemma51", help="stationary-phase scaling-law check "
                       "for monomial phases")
    common(l1)
    l1.add_argument("--k", type=int, required=True)
    l1.add_argument("--lam", nargs="*",
                    default=["1e2", "1e3", "1e4", "1e5", "1e6"])
    l1.add_argument("--delta", type=float, default=0.0)
    l1.set_defaults(func=cmd_lemma51)

    l2 = sp.add_parser("lemma52", help="cubic-phase vs Airy-model comparison")
    common(l2)
    l2.add_argument("--lam", nargs="*", default=["1e3", "1e4", "1e5"])
    l2.add_argument("--theta", nargs="*", default=["0.003", "0.01", "0.03"])
    l2.add_argument("--eps", type=float, default=0.25)
    l2.add_argument("--cmax", type=float, default=50.0)
    l2.set_defaults(func=cmd_lemma52)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CurveDecayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
