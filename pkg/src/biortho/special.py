"""Principal-branch Lambert W on the real axis, the complex plane, and the cut.

W0 inverts w -> w*exp(w).  It is real on [-1/e, inf), analytic off the
half-line (-inf, -1/e], and acquires an imaginary part in (0, pi) when the
cut is approached from the upper half-plane.  All three views are needed
here: the real branch for monotone calculus, the complex branch for
Stieltjes-transform work, and the boundary values on the cut for spectral
densities.

Root refinement is Halley's method (cubic convergence) with
regime-dependent starting points, after Corless, Gonnet, Hare, Jeffrey and
Knuth, "On the Lambert W function", Adv. Comput. Math. 5 (1996):
a square-root expansion near the branch point -1/e, a short series near 0,
and log(z) - log(log(z)) for large arguments.  On the cut the branch
condition Im(w) in (0, pi) is enforced structurally: the starting point
comes from a monotone bisection of the boundary parametrization
w = -v*cot(v) + i*v with v in (0, pi), and Halley steps that would leave
the closed upper half-plane are damped.

All entry points accept scalars or numpy arrays and are pure.
"""

import numpy as np

BRANCH_POINT = -float(np.exp(-1.0))

_BRANCH_SLACK = 1e-15          # tolerated undershoot below -1/e on the real axis
_MAX_ITER = 100
_STEP_TOL = 1e-15              # |dw| <= tol*(1+|w|) declares convergence
_HUGE = 1e290                  # above this |z|, w*exp(w) can overflow; use log form


class LambertWError(RuntimeError):
    """Iteration cap reached without meeting the step tolerance."""


def _halley(w0, z, keep_upper=False):
    """Refine w0 toward w*exp(w) = z elementwise; raises on non-convergence.

    keep_upper halves steps that would leave the closed upper half-plane,
    which pins the branch choice for arguments on the cut.
    """
    w = np.array(w0, dtype=complex)
    z = np.asarray(z, dtype=complex)
    done = np.zeros(w.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        ew = np.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        wp1 = np.where(np.abs(wp1) < 1e-12, 1e-12 + 0j, wp1)
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        dw = np.where(done, 0.0, dw)
        if keep_upper:
            for _ in range(80):
                nxt = w - dw
                bad = ~done & ((nxt.imag < 0.0) | (nxt.imag > np.pi))
                if not bad.any():
                    break
                dw = np.where(bad, 0.5 * dw, dw)
        w = w - dw
        done |= np.abs(dw) <= _STEP_TOL * (1.0 + np.abs(w))
        if done.all():
            return w
    raise LambertWError("Halley iteration for Lambert W did not converge")


def _asymptotic_newton(z):
    """Solve w + log(w) = log(z); overflow-safe for very large |z|."""
    l1 = np.log(np.asarray(z, dtype=complex))
    w = l1 - np.log(l1)
    for _ in range(_MAX_ITER):
        dw = (l1 - w - np.log(w)) * w / (w + 1.0)
        w = w + dw
        if np.all(np.abs(dw) <= _STEP_TOL * (1.0 + np.abs(w))):
            return w
    raise LambertWError("asymptotic Newton iteration did not converge")


def lambert_w0_real(x):
    """W0 on the real domain [-1/e, inf): the root w >= -1 of w*exp(w) = x.

    Accepts a scalar or array; residual |w e^w - x| <= 1e-12*max(1, |x|).
    Raises ValueError for x < -1/e (beyond a 1e-15 slack at the branch
    point) and LambertWError if the iteration cap is hit.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    a = np.atleast_1d(arr).astype(float)
    if np.any(a < BRANCH_POINT - _BRANCH_SLACK):
        raise ValueError("lambert_w0_real requires x >= -1/e")
    w = np.empty_like(a)
    q = np.maximum(2.0 * (np.e * a + 1.0), 0.0)   # 2(e*x + 1), clipped at the slack
    near = q < 0.5
    p = np.sqrt(q[near])
    w[near] = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
    mid = ~near & (a < 10.0)
    w[mid] = np.log1p(a[mid])
    big = ~near & ~mid & (a < _HUGE)
    if big.any():
        l1 = np.log(a[big])
        w[big] = l1 - np.log(l1)
    huge = a >= _HUGE
    if huge.any():
        w[huge] = _asymptotic_newton(a[huge]).real
    refine = ~huge
    if refine.any():
        w[refine] = _halley(w[refine], a[refine]).real
    w = np.maximum(w, -1.0)
    return float(w[0]) if scalar else w


def lambert_w0_complex(z):
    """Principal branch W0(z) for complex z off the open cut (-inf, -1/e).

    For arguments exactly on the open cut (Im z == 0, Re z < -1/e) use
    lambert_w0_cut_above, which fixes the branch from the upper half-plane.
    For Im(z) > 0 the result satisfies Im(w) in (0, pi).
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    zc = np.atleast_1d(arr).astype(complex)
    if np.any((zc.imag == 0.0) & (zc.real < BRANCH_POINT)):
        raise ValueError(
            "argument on the open cut (-inf, -1/e); use lambert_w0_cut_above")
    w = np.empty_like(zc)
    zero = zc == 0
    w[zero] = 0.0
    near = ~zero & (np.abs(zc - BRANCH_POINT) <= 1.5)
    w[near] = np.sqrt(2.0 * np.e * (zc[near] - BRANCH_POINT)) - 1.0
    huge = np.abs(zc) >= _HUGE
    far = ~zero & ~near & ~huge
    if far.any():
        l1 = np.log(zc[far])
        w[far] = l1 - np.log(l1)
    if huge.any():
        w[huge] = _asymptotic_newton(zc[huge])
    refine = ~zero & ~huge
    if refine.any():
        w[refine] = _halley(w[refine], zc[refine])
    # the open upper half-plane maps into the strip 0 < Im w < pi; a stray
    # convergence to the reflected branch is repaired from a mirrored start
    up = zc.imag > 0
    bad = up & ((w.imag <= 0.0) | (w.imag >= np.pi))
    if bad.any():
        w[bad] = _halley(np.conj(w[bad]), zc[bad], keep_upper=True)
        still = up & ((w.imag <= 0.0) | (w.imag >= np.pi))
        if still.any():
            raise LambertWError("failed to locate the upper-half-plane branch")
    return complex(w[0]) if scalar else w


def lambert_w0_cut_above(x):
    """Boundary value lim_{eps->0+} W0(x + i*eps) for real x < -1/e.

    Returns the root w of w*exp(w) = x with Im(w) in (0, pi); residual
    <= 1e-12*|x|.  Raises ValueError for x >= -1/e.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    a = np.atleast_1d(arr).astype(float)
    if np.any(a >= BRANCH_POINT):
        raise ValueError("lambert_w0_cut_above requires x < -1/e")
    w = lambert_w0_cut_above_log(np.log(-a))
    safe = -a < _HUGE
    if safe.any():
        w[safe] = _halley(w[safe], a[safe].astype(complex), keep_upper=True)
    return complex(w[0]) if scalar else w


def lambert_w0_cut_above_log(tau):
    """Cut boundary value of W0 at x = -exp(tau), parametrized by tau = log|x|.

    Stable for tau far beyond float overflow of |x| itself (tau up to ~1e12),
    which is what integrating the 1/(x log^2 x)-type spectral singularity at
    the origin requires.  Requires tau > -1 (i.e. |x| > 1/e).

    On the cut the root satisfies w = -v*cot(v) + i*v for a unique
    v in (0, pi), and log|x| = log(v) - log(sin v) - v*cot(v) is strictly
    increasing in v, so a plain bisection pins v; it runs in delta = pi - v
    to keep full relative precision at both ends.
    """
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(t <= -1.0):
        raise ValueError("lambert_w0_cut_above_log requires tau > -1")
    if np.any(t > 1e12):
        raise ValueError("tau out of supported range (> 1e12)")
    dlo = np.full(t.shape, 1e-14)
    dhi = np.full(t.shape, np.pi - 1e-13)
    for _ in range(110):
        mid = 0.5 * (dlo + dhi)
        sn = np.sin(mid)
        h = np.log(np.pi - mid) - np.log(sn) + (np.pi - mid) * np.cos(mid) / sn
        gt = h > t          # h decreases in delta; root lies at larger delta
        dlo = np.where(gt, mid, dlo)
        dhi = np.where(gt, dhi, mid)
    d = 0.5 * (dlo + dhi)
    sn = np.sin(d)
    u = (np.pi - d) * np.cos(d) / sn
    v = np.pi - d
    return u + 1j * v
