"""Rate-functional minimization over probability measures on a fixed grid.

The functional is

    I(mu) = E(mu)/2 + E(g_* mu)/2 + int V d(mu)

with E the logarithmic energy.  Discretized on fixed nodes with the cell
self-energy regularization from `measures`, it becomes a strictly convex
quadratic F(w) = w'Mw/2 + V'w on the probability simplex, with
M = K(nodes) + K(g(nodes)).  Fixing the nodes and optimizing only the
weights keeps the problem convex.

The solver is entropic mirror descent: multiplicative weight updates
w <- w * exp(-eta * grad) / Z with a backtracking line search on eta (the
objective never increases) and geometric step growth after accepted moves,
which lets off-support weights decay exponentially fast once the support
has stabilized.  Termination is by the KKT residual

    max( c - min_i d_i,  max_{i in support} |d_i - c| ),   c = sum w_i d_i,

where d is the objective gradient; "in support" means weight above
1e-6/m, since multiplicative updates never produce exact zeros.  The same
threshold defines the support endpoint b_eq reported for the
largest-particle rate function J, whose additive constant is fixed by
J(b_eq) = 0.
"""

from dataclasses import dataclass

import numpy as np

from .measures import (GridMeasure, energy_kernel, log_energy_grid,
                       log_energy_offdiag, pushforward, voronoi_cell_widths)

SUPPORT_THRESHOLD_SCALE = 1e-6
_ETA_MAX = 1e12
_ETA_MIN = 1e-18


@dataclass
class SolverReport:
    """Minimizer plus diagnostics; converged=False means the iteration cap
    was hit (or the line search stalled) and the best iterate is reported.
    objective_trace records the accepted objective values, which are
    non-increasing by construction."""

    minimizer: GridMeasure
    objective: float
    kkt_residual: float
    b_eq: float
    kappa: float
    iterations: int
    converged: bool
    objective_trace: np.ndarray = None

    def to_dict(self):
        return {
            "nodes": self.minimizer.nodes.tolist(),
            "weights": self.minimizer.weights.tolist(),
            "objective": self.objective,
            "kkt_residual": self.kkt_residual,
            "b_eq": self.b_eq,
            "kappa": self.kappa,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def make_grid(n, lo, hi, geo_until=0.1, geo_fraction=0.25):
    """Solver grid: geometric spacing from lo up to geo_until (resolving the
    1/(x log^2 x)-type blow-up near 0), uniform spacing beyond."""
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    n = int(n)
    if n < 2:
        raise ValueError("need at least two nodes")
    if lo >= geo_until or geo_fraction <= 0:
        return np.linspace(lo, hi, n)
    split = min(geo_until, hi / 2)
    n_geo = max(2, int(n * geo_fraction))
    geo = np.geomspace(lo, split, n_geo, endpoint=False)
    uni = np.linspace(split, hi, n - n_geo)
    return np.concatenate([geo, uni])


def _pushed_widths(nodes, cell_widths, g):
    """Cell widths for the image grid: Voronoi widths of g(nodes) when there
    are neighbours, mapped cell endpoints for a single node."""
    gn = np.asarray(g(nodes), dtype=float)
    if nodes.size >= 2:
        return gn, voronoi_cell_widths(gn)
    h = cell_widths[0]
    lo, hi = nodes[0] - 0.5 * h, nodes[0] + 0.5 * h
    return gn, np.array([float(g(hi) - g(lo))])


def rate_I(m, cfg, cell_widths=None):
    """Discretized rate functional at a grid measure."""
    if m.nodes[0] <= 0:
        raise ValueError("rate_I requires nodes in (0, inf)")
    if cell_widths is None:
        cell_widths = voronoi_cell_widths(m.nodes) if m.n >= 2 else None
        if cell_widths is None:
            raise ValueError("single-node measures need explicit cell widths")
    else:
        cell_widths = np.asarray(cell_widths, dtype=float)
    gn, gw = _pushed_widths(m.nodes, cell_widths, cfg.g)
    e_x = log_energy_grid(m, cell_widths)
    e_g = float(m.weights @ energy_kernel(gn, gw) @ m.weights)
    return 0.5 * e_x + 0.5 * e_g + float(m.weights @ cfg.v(m.nodes))


def _quadratic_model(nodes, cfg):
    """(M, v) with objective w'Mw/2 + v'w and gradient Mw + v."""
    nodes = np.asarray(nodes, dtype=float)
    if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
        raise ValueError("grid must be strictly increasing in (0, inf)")
    h = voronoi_cell_widths(nodes)
    gn, gw = _pushed_widths(nodes, h, cfg.g)
    m = energy_kernel(nodes, h) + energy_kernel(gn, gw)
    return m, np.asarray(cfg.v(nodes), dtype=float)


def _kkt(grad, w, threshold):
    c = float(w @ grad)
    active = w > threshold
    res = c - float(grad.min())
    if active.any():
        res = max(res, float(np.max(np.abs(grad[active] - c))))
    return max(res, 0.0)


def kkt_residual(m, cfg):
    """First-order optimality residual of a grid measure for the discrete
    rate functional; 0 means exact discrete optimality."""
    mat, vv = _quadratic_model(m.nodes, cfg)
    grad = mat @ m.weights + vv
    return _kkt(grad, m.weights, SUPPORT_THRESHOLD_SCALE / m.n)


def minimize_I(cfg, grid, tol=1e-6, max_iter=200_000, w0=None):
    """Entropic mirror descent for the discrete rate functional.

    Returns a SolverReport; converged=False (iteration cap or stalled line
    search above tolerance) still carries the best iterate found.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    nodes = np.asarray(grid, dtype=float)
    mat, vv = _quadratic_model(nodes, cfg)
    m = nodes.size
    threshold = SUPPORT_THRESHOLD_SCALE / m
    if w0 is None:
        w = np.full(m, 1.0 / m)
    else:
        w = np.asarray(w0, dtype=float).copy()
        if w.size != m or np.any(w < 0):
            raise ValueError("w0 must be a nonnegative weight vector on the grid")
        w = np.maximum(w, 1e-300)
        w = w / w.sum()
    logw = np.log(w)
    obj = 0.5 * float(w @ (mat @ w)) + float(vv @ w)
    grad = mat @ w + vv
    eta = 1.0
    kkt = _kkt(grad, w, threshold)
    iterations = 0
    trace = [obj]
    converged = kkt <= tol
    while not converged and iterations < max_iter:
        iterations += 1
        accepted = False
        while eta >= _ETA_MIN:
            lw = logw - eta * grad
            lw -= lw.max()
            with np.errstate(under="ignore"):
                wn_raw = np.exp(lw)
            z = wn_raw.sum()
            wn = wn_raw / z
            obj_n = 0.5 * float(wn @ (mat @ wn)) + float(vv @ wn)
            if obj_n <= obj:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        logw = lw - np.log(z)
        w = wn
        obj = obj_n
        trace.append(obj)
        grad = mat @ w + vv
        kkt = _kkt(grad, w, threshold)
        converged = kkt <= tol
        eta = min(eta * 1.5, _ETA_MAX)
    minimizer = GridMeasure(nodes, w)
    b_eq = _support_endpoint(minimizer, threshold)
    kappa = _effective_potential(np.array([b_eq]), minimizer, cfg)[0]
    return SolverReport(minimizer=minimizer, objective=obj, kkt_residual=kkt,
                        b_eq=b_eq, kappa=kappa, iterations=iterations,
                        converged=converged, objective_trace=np.array(trace))


def _support_endpoint(mu, threshold=None):
    if threshold is None:
        threshold = SUPPORT_THRESHOLD_SCALE / mu.n
    idx = np.nonzero(mu.weights > threshold)[0]
    if idx.size == 0:
        raise ValueError("measure has no weight above the support threshold")
    return float(mu.nodes[idx[-1]])


def _antideriv(u):
    """G(u) = u log|u| - u with G(0) = 0, so that the exact cell integral is
    int_a^b log|x-y| dy = G(b-x) - G(a-x), finite for x inside [a, b]."""
    out = np.zeros_like(u)
    nz = u != 0
    out[nz] = u[nz] * np.log(np.abs(u[nz])) - u[nz]
    return out


def _cell_edges(nodes, widths):
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    return np.concatenate([[nodes[0] - 0.5 * widths[0]], mids,
                           [nodes[-1] + 0.5 * widths[-1]]])


def _effective_potential(x, mu, cfg):
    """U(x) = -0.5 * int [log|x-y| + log|g(x)-g(y)|] d(mu)(y) + V(x), the
    integral taken against mu spread piecewise-uniformly over its cells
    (semi-analytic, finite for x on the support)."""
    x = np.asarray(x, dtype=float)
    nodes, w = mu.nodes, mu.weights
    if mu.n >= 2:
        hx = voronoi_cell_widths(nodes)
        edges = _cell_edges(nodes, hx)
    else:
        raise ValueError("effective potential needs >= 2 nodes")
    gedges = np.asarray(cfg.g(edges), dtype=float)
    gx = np.asarray(cfg.g(x), dtype=float)

    lo, hi = edges[:-1], edges[1:]
    glo, ghi = gedges[:-1], gedges[1:]
    dens_x = w / (hi - lo)
    dens_g = w / (ghi - glo)

    lx = ((_antideriv(hi[None, :] - x[:, None])
           - _antideriv(lo[None, :] - x[:, None])) * dens_x[None, :]).sum(axis=1)
    lg = ((_antideriv(ghi[None, :] - gx[:, None])
           - _antideriv(glo[None, :] - gx[:, None])) * dens_g[None, :]).sum(axis=1)
    return -0.5 * (lx + lg) + np.asarray(cfg.v(x), dtype=float)


def rate_J_largest(x, mu_eq, cfg):
    """Largest-particle rate function J(x) = U(x) - U(b_eq) for x >= b_eq
    and +inf below b_eq; J(b_eq) = 0 exactly by construction."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    xs = np.atleast_1d(arr).astype(float)
    b_eq = _support_endpoint(mu_eq)
    kappa = _effective_potential(np.array([b_eq]), mu_eq, cfg)[0]
    out = np.full(xs.shape, np.inf)
    ge = xs >= b_eq
    if ge.any():
        out[ge] = _effective_potential(xs[ge], mu_eq, cfg) - kappa
    return float(out[0]) if scalar else out


def rate_I_empirical(m, cfg):
    """Rate functional of an empirical measure via off-diagonal energies."""
    if m.n and m.points[0] <= 0:
        raise ValueError("rate_I_empirical requires support in (0, inf)")
    e_x = log_energy_offdiag(m)
    e_g = log_energy_offdiag(pushforward(m, cfg.g))
    return 0.5 * e_x + 0.5 * e_g + float(np.mean(cfg.v(m.points)))
