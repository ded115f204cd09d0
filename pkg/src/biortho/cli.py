"""Command-line front end.

Subcommands: sample-matrix, sample-gas, dh, equilibrium, rate-largest,
quantile-check, lambertw, verify.  Exit codes: 0 success, 1 domain or
validation error, 2 numerical failure.  CSV output carries a header row and
17 significant digits; JSON reports are flat snake_case objects embedding
the run configuration, so every run is reproducible from its own output.
SVG plots are hand-emitted with fixed float formatting, which keeps output
byte-identical for identical inputs.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dh_law, ensemble, equilibrium, proof_lab, special
from .gas_sampler import GasConfig, GFunction, Potential, mcmc_sample


def _g17(v):
    return f"{float(v):.17g}"


@dataclass
class RunConfig:
    """Serialized invocation; JSON reports embed it for reproducibility."""

    subcommand: str
    params: dict
    out: str = ""
    seed: int = 0
    plot: str = ""

    def to_dict(self):
        return {"subcommand": self.subcommand, "params": self.params,
                "out": self.out, "seed": self.seed, "plot": self.plot}


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors, per the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _parse_complex(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected RE,IM, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_domain(text):
    lo, hi = (float(p) for p in text.split(","))
    return lo, hi


# ----------------------------------------------------------------------
# SVG emission

_SVG_W, _SVG_H = 640, 420
_MARGIN = dict(left=62, right=16, top=34, bottom=44)


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return raw


def emit_svg(histogram=None, curve=None, overlay=None, title=""):
    """Standalone SVG: optional histogram (edges, heights), optional curve
    and overlay polylines (x, y).  Deterministic byte output for identical
    input; exactly one <path> element per curve series."""
    if histogram is None and curve is None:
        raise ValueError("nothing to plot")
    xs, ys = [], []
    if histogram is not None:
        edges, heights = (np.asarray(a, dtype=float) for a in histogram)
        if edges.size < 2 or heights.size != edges.size - 1:
            raise ValueError("histogram needs edges (m+1) and heights (m)")
        xs += [edges.min(), edges.max()]
        ys += [0.0, float(heights.max())]
    for series in (curve, overlay):
        if series is not None:
            sx, sy = (np.asarray(a, dtype=float) for a in series)
            if sx.size == 0:
                raise ValueError("empty curve")
            xs += [float(sx.min()), float(sx.max())]
            ys += [float(min(sy.min(), 0.0)), float(sy.max())]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    y1 *= 1.05
    iw = _SVG_W - _MARGIN["left"] - _MARGIN["right"]
    ih = _SVG_H - _MARGIN["top"] - _MARGIN["bottom"]

    def sx(v):
        return _MARGIN["left"] + (v - x0) / (x1 - x0) * iw

    def sy(v):
        return _SVG_H - _MARGIN["bottom"] - (v - y0) / (y1 - y0) * ih

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
           f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
           f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>']
    if title:
        out.append(f'<text x="{_SVG_W // 2}" y="20" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{title}</text>')
    ax_y = _SVG_H - _MARGIN["bottom"]
    out.append(f'<line x1="{_MARGIN["left"]}" y1="{ax_y}" x2="{_SVG_W - _MARGIN["right"]}" '
               f'y2="{ax_y}" stroke="black" stroke-width="1"/>')
    out.append(f'<line x1="{_MARGIN["left"]}" y1="{_MARGIN["top"]}" '
               f'x2="{_MARGIN["left"]}" y2="{ax_y}" stroke="black" stroke-width="1"/>')
    for tv in _ticks(x0, x1):
        px = sx(tv)
        out.append(f'<line x1="{px:.2f}" y1="{ax_y}" x2="{px:.2f}" y2="{ax_y + 5}" '
                   'stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{px:.2f}" y="{ax_y + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{tv:.4g}</text>')
    for tv in _ticks(y0, y1):
        py = sy(tv)
        out.append(f'<line x1="{_MARGIN["left"] - 5}" y1="{py:.2f}" '
                   f'x2="{_MARGIN["left"]}" y2="{py:.2f}" stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{_MARGIN["left"] - 8}" y="{py + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{tv:.4g}</text>')
    if histogram is not None:
        edges, heights = (np.asarray(a, dtype=float) for a in histogram)
        for k in range(heights.size):
            hx0, hx1 = sx(edges[k]), sx(edges[k + 1])
            hy = sy(heights[k])
            out.append(f'<rect x="{hx0:.3f}" y="{hy:.3f}" width="{hx1 - hx0:.3f}" '
                       f'height="{sy(0.0) - hy:.3f}" fill="#7696c4" '
                       'fill-opacity="0.75" stroke="none"/>')
    for series, color, dash in ((curve, "#b03030", ""),
                                (overlay, "#208040", ' stroke-dasharray="6,3"')):
        if series is None:
            continue
        px, py = (np.asarray(a, dtype=float) for a in series)
        coords = [f"{sx(px[0]):.3f} {sy(py[0]):.3f}"]
        coords += [f"L {sx(a):.3f} {sy(b):.3f}" for a, b in zip(px[1:], py[1:])]
        out.append(f'<path d="M {" ".join(coords)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"{dash}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------
# subcommand handlers

def _cmd_lambertw(args):
    re_, im_ = _parse_complex(args.z)
    if im_ == 0.0 and re_ < special.BRANCH_POINT:
        w = special.lambert_w0_cut_above(re_)
    elif im_ == 0.0 and re_ >= special.BRANCH_POINT:
        w = complex(special.lambert_w0_real(re_), 0.0)
    else:
        w = special.lambert_w0_complex(complex(re_, im_))
    print(f"{w.real:.17g},{w.imag:.17g}")
    return 0


def _cmd_dh(args):
    law = dh_law.default_law()
    if args.op in ("density", "cdf", "quantile"):
        fn = {"density": dh_law.dh_density, "cdf": law.cdf,
              "quantile": law.quantile}[args.op]
        if args.csv:
            if args.op == "quantile":
                grid = np.linspace(0.005, 0.995, args.grid_points)
            else:
                grid = np.linspace(0.0, float(np.e), args.grid_points)
            print("x,value")
            for xv in grid:
                print(f"{_g17(xv)},{_g17(fn(xv))}")
        else:
            if args.x is None:
                raise ValueError("--x is required without --csv")
            print(_g17(fn(args.x)))
    elif args.op == "moment":
        if args.k is None:
            raise ValueError("--k is required for dh moment")
        val = law.moment_numeric(args.k) if args.numeric else dh_law.dh_moment_exact(args.k)
        print(_g17(val))
    elif args.op == "stieltjes":
        re_, im_ = _parse_complex(args.z)
        s = dh_law.dh_stieltjes(complex(re_, im_))
        print(f"{s.real:.17g},{s.imag:.17g}")
    elif args.op == "rtransform":
        re_, im_ = _parse_complex(args.z)
        r = dh_law.dh_r_transform(complex(re_, im_))
        r = complex(r)
        print(f"{r.real:.17g},{r.imag:.17g}")
    return 0


def _cmd_sample_matrix(args):
    params = ensemble.EnsembleParams(n=args.n, theta=args.theta, b=args.b,
                                     seed=args.seed)
    specs = ensemble.sample_spectra(params, args.trials)
    header = "trial," + ",".join(f"x{i + 1}" for i in range(args.n))
    lines = [header]
    for k, s in enumerate(specs):
        lines.append(str(k) + "," + ",".join(_g17(v) for v in s.points))
    _write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.trials} spectra (n={args.n}) to {args.out}")
    return 0


def _cmd_sample_gas(args):
    cfg = GasConfig(n=args.n, g=GFunction.parse(args.g),
                    v=Potential.parse(args.V), b=args.b)
    rows = []
    diags = []

    def run_chain(c):
        return mcmc_sample(cfg, steps=args.steps, burn_in=args.burn_in,
                           seed=(args.seed << 16) + c)

    workers = ensemble.thread_count()
    if workers > 1 and args.chains > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chain, range(args.chains)))
    else:
        results = [run_chain(c) for c in range(args.chains)]
    for c, (meas, diag) in enumerate(results):
        rows.append(str(c) + "," + ",".join(_g17(v) for v in meas.points))
        diags.append(diag)
    header = "chain," + ",".join(f"x{i + 1}" for i in range(args.n))
    _write_text(args.out, "\n".join([header] + rows) + "\n")
    acc = ", ".join(f"{d.acceptance_rate:.3f}" for d in diags)
    print(f"wrote {args.chains} chains to {args.out}; acceptance rates: {acc}")
    return 0


def _grid_from_args(args):
    lo, hi = _parse_domain(args.domain)
    return equilibrium.make_grid(args.grid, lo, hi)


def _cmd_equilibrium(args):
    cfg = GasConfig(n=max(args.grid, 2), g=GFunction.parse(args.g),
                    v=Potential.parse(args.V), b=args.b)
    grid = _grid_from_args(args)
    report = equilibrium.minimize_I(cfg, grid, tol=args.tol,
                                    max_iter=args.max_iter)
    run = RunConfig("equilibrium",
                    {"g": args.g, "V": args.V, "b": args.b, "grid": args.grid,
                     "domain": args.domain, "tol": args.tol,
                     "max_iter": args.max_iter})
    payload = report.to_dict()
    payload["run_config"] = run.to_dict()
    _write_text(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"objective {report.objective:.9g}  kkt {report.kkt_residual:.3g}  "
          f"b_eq {report.b_eq:.6g}  converged {report.converged}")
    if args.plot:
        mu = report.minimizer
        from .measures import voronoi_cell_widths
        widths = voronoi_cell_widths(mu.nodes)
        edges = np.concatenate([[mu.nodes[0] - widths[0] / 2],
                                0.5 * (mu.nodes[1:] + mu.nodes[:-1]),
                                [mu.nodes[-1] + widths[-1] / 2]])
        heights = mu.weights / widths
        overlay = None
        if args.overlay_dh:
            xs = np.linspace(1e-3, float(np.e), 300)
            overlay = (xs, dh_law.dh_density(xs))
        svg = emit_svg(histogram=(edges, heights), overlay=overlay,
                       title="equilibrium weight density")
        _write_text(args.plot, svg)
        print(f"plot written to {args.plot}")
    if not report.converged:
        return 2
    return 0


def _cmd_rate_largest(args):
    cfg = GasConfig(n=max(args.grid, 2), g=GFunction.parse(args.g),
                    v=Potential.parse(args.V), b=args.b)
    grid = _grid_from_args(args)
    report = equilibrium.minimize_I(cfg, grid, tol=args.tol,
                                    max_iter=args.max_iter)
    x_hi = args.x_max if args.x_max is not None else 3.0 * report.b_eq
    xs = np.linspace(report.b_eq, x_hi, args.points)
    js = equilibrium.rate_J_largest(xs, report.minimizer, cfg)
    payload = {
        "b_eq": report.b_eq,
        "kappa": report.kappa,
        "objective": report.objective,
        "x": xs.tolist(),
        "j": [float(v) for v in js],
        "run_config": RunConfig("rate-largest",
                                {"g": args.g, "V": args.V, "b": args.b,
                                 "grid": args.grid, "domain": args.domain,
                                 "x_max": x_hi, "points": args.points}).to_dict(),
    }
    _write_text(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"b_eq {report.b_eq:.6g}  kappa {report.kappa:.6g}  "
          f"J range [{js[0]:.4g}, {js[-1]:.4g}]")
    return 0


def _cmd_quantile_check(args):
    name, _, spec_arg = args.dist.partition(":")
    if name == "uniform":
        a, b = (float(v) for v in spec_arg.split(","))
        sigma = proof_lab.uniform_nice(a, b)
        e_half = 0.5 * sigma.analytic_energy
    elif name == "dh-trunc":
        sigma = proof_lab.truncated_dh(float(spec_arg))
        e_half = 0.5 * proof_lab.nice_energy(sigma, n0=512, tol=1e-5,
                                             max_doublings=2)
    else:
        raise ValueError(f"unknown distribution {args.dist!r}")
    g = GFunction.parse(args.g)
    if g.kind == "identity" and name == "uniform":
        e_half_g = e_half
    else:
        e_half_g = 0.5 * proof_lab.nice_energy(sigma, g, n0=512, tol=1e-5,
                                               max_doublings=2)
    grid = proof_lab.build_quantile_grid(sigma, args.n)
    ok, worst = proof_lab.check_spacing_bounds(grid, sigma.C)
    stats = proof_lab.ratio_statistics(grid, g, args.eps)
    gaps = proof_lab.energy_gap(grid, g, e_half, e_half_g)
    bl_val = proof_lab.configuration_bl_check(grid, sigma, m=args.m)
    payload = {
        "distribution": args.dist,
        "n": args.n,
        "eps": args.eps,
        "g": g.label,
        "density_bound_c": sigma.C,
        "spacing_ok": bool(ok),
        "spacing_worst_ratio": worst,
        "a_max": stats.a_max,
        "a_max_g": stats.a_max_g,
        "fraction": stats.fraction,
        "fraction_g": stats.fraction_g,
        "gap": gaps.gap,
        "gap_g": gaps.gap_g,
        "bl_value": bl_val,
        "bl_bound": sigma.C / args.n + 2.0 / args.m,
        "box_mass_log_rate": proof_lab.box_mass_log_rate(grid),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_verify(args):
    from . import acceptance
    only = None
    if args.only:
        only = {int(v) for v in args.only.split(",")}
    results = acceptance.run_all(only=only)
    print()
    print(f"{'':>4} {'criterion':<28} {'result':<6} {'time':>8}  detail")
    ok = True
    for r in results:
        ok &= r.passed
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.index:>4} {r.name:<28} {status:<6} {r.seconds:>7.1f}s  {r.detail}")
    print()
    print("all criteria passed" if ok else "FAILURES PRESENT")
    return 0 if ok else 1


def _write_text(path, text):
    if not path:
        raise ValueError("output path is required")
    with open(path, "w") as fh:
        fh.write(text)


# ----------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="biortho",
                description="numerical laboratory for biorthogonal ensembles")
    sub = p.add_subparsers(dest="cmd")

    s = sub.add_parser("lambertw", parents=[], description="principal Lambert W")
    s.add_argument("--z", required=True, help="argument RE,IM")

    s = sub.add_parser("dh", description="Dykema-Haagerup law evaluations")
    s.add_argument("op", choices=["density", "cdf", "quantile", "moment",
                                  "stieltjes", "rtransform"])
    s.add_argument("--x", type=float, default=None)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--numeric", action="store_true")
    s.add_argument("--z", default="0,1")
    s.add_argument("--csv", action="store_true")
    s.add_argument("--grid-points", type=int, default=200)

    s = sub.add_parser("sample-matrix", description="triangular-ensemble spectra")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    s = sub.add_parser("sample-gas", description="Metropolis gas sampler")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--g", default="id")
    s.add_argument("--V", default="linear:1")
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=2000)
    s.add_argument("--burn-in", type=int, default=1000)
    s.add_argument("--chains", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    s = sub.add_parser("equilibrium", description="rate-functional minimizer")
    s.add_argument("--g", default="log")
    s.add_argument("--V", default="linear:1")
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--grid", type=int, default=400)
    s.add_argument("--domain", default="1e-4,4")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=200000)
    s.add_argument("--out", required=True)
    s.add_argument("--plot", default="")
    s.add_argument("--overlay-dh", action="store_true")

    s = sub.add_parser("rate-largest", description="largest-particle rate function")
    s.add_argument("--g", default="log")
    s.add_argument("--V", default="linear:1")
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--grid", type=int, default=400)
    s.add_argument("--domain", default="1e-4,4")
    s.add_argument("--tol", type=float, default=1e-4)
    s.add_argument("--max-iter", type=int, default=200000)
    s.add_argument("--x-max", type=float, default=None)
    s.add_argument("--points", type=int, default=20)
    s.add_argument("--out", required=True)

    s = sub.add_parser("quantile-check", description="lower-bound proof diagnostics")
    s.add_argument("--dist", default="uniform:1,2")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--g", default="id")
    s.add_argument("--m", type=int, default=10000)

    s = sub.add_parser("verify", description="run the acceptance suite")
    s.add_argument("--only", default="", help="comma-separated criterion numbers")

    return p


_HANDLERS = {
    "lambertw": _cmd_lambertw,
    "dh": _cmd_dh,
    "sample-matrix": _cmd_sample_matrix,
    "sample-gas": _cmd_sample_gas,
    "equilibrium": _cmd_equilibrium,
    "rate-largest": _cmd_rate_largest,
    "quantile-check": _cmd_quantile_check,
    "verify": _cmd_verify,
}


def dispatch(argv):
    """Route argv to a subcommand; returns the process exit code."""
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.cmd:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _HANDLERS[args.cmd](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
