"""Two-interaction log-gas on (0, inf)^n and its Metropolis sampler.

The target is the unnormalized density

    exp(-n sum V(x_i)) * prod x_j^(b-1) * prod_{i<j} |x_i-x_j| |g(x_i)-g(x_j)|

for an increasing interaction map g and a confining potential V that grows
faster than (b+1)*log at infinity (checked heuristically before sampling).
The sampler is single-coordinate Metropolis on log coordinates -- the state
space is (0, inf)^n and a multiplicative walk is scale-free there -- with
the log-coordinate Jacobian folded into the acceptance ratio.  Step sizes
adapt by Robbins-Monro during burn-in only and are frozen afterwards, so
retained samples come from a fixed reversible kernel.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .measures import EmpiricalMeasure

_G_KINDS = ("power", "log", "asinh2", "exp", "identity")
_COINCIDENCE_TOL = 1e-14
_GROWTH_CHECKPOINTS = (1e2, 1e4, 1e6, 1e8)


@dataclass(frozen=True)
class GFunction:
    """Increasing interaction map on (0, inf): x^theta, log, asinh(sqrt)^2,
    exp, or identity."""

    kind: str
    theta: float = 1.0

    def __post_init__(self):
        if self.kind not in _G_KINDS:
            raise ValueError(f"unknown interaction kind {self.kind!r}")
        if self.kind == "power" and not self.theta > 0:
            raise ValueError("power interaction needs theta > 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return x ** self.theta
        if self.kind == "log":
            return np.log(x)
        if self.kind == "asinh2":
            return np.arcsinh(np.sqrt(x)) ** 2
        if self.kind == "exp":
            return np.exp(x)
        return x + 0.0

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return self.theta * x ** (self.theta - 1.0)
        if self.kind == "log":
            return 1.0 / x
        if self.kind == "asinh2":
            r = np.sqrt(x)
            return np.arcsinh(r) / (r * np.sqrt(1.0 + x))
        if self.kind == "exp":
            return np.exp(x)
        return np.ones_like(x)

    def log_abs(self, x):
        """log|g(x)|, overflow-safe (log exp(x) = x without forming exp(x))."""
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return self.theta * np.log(x)
        if self.kind == "log":
            return np.log(np.abs(np.log(x)))
        if self.kind == "asinh2":
            return 2.0 * np.log(np.arcsinh(np.sqrt(x)))
        if self.kind == "exp":
            return x + 0.0
        return np.log(x)

    @classmethod
    def parse(cls, text):
        """Parse CLI syntax: power:2 | log | asinh2 | exp | id."""
        name, _, arg = text.partition(":")
        name = name.strip().lower()
        if name in ("id", "identity"):
            return cls("identity")
        if name == "power":
            return cls("power", float(arg)) if arg else cls("power", 1.0)
        if name in _G_KINDS:
            return cls(name)
        raise ValueError(f"cannot parse interaction map {text!r}")

    @property
    def label(self):
        if self.kind == "power":
            return f"power:{self.theta:g}"
        return self.kind


@dataclass(frozen=True)
class Potential:
    """Confining potential: linear a*x (a > 0) or a polynomial with positive
    leading coefficient, ascending coefficients."""

    kind: str
    coeffs: tuple

    def __post_init__(self):
        if self.kind == "linear":
            if len(self.coeffs) != 1 or not self.coeffs[0] > 0:
                raise ValueError("linear potential needs one coefficient a > 0")
        elif self.kind == "polynomial":
            if len(self.coeffs) < 2:
                raise ValueError("polynomial potential needs degree >= 1")
            if not self.coeffs[-1] > 0:
                raise ValueError("polynomial potential needs a positive leading "
                                 "coefficient")
        else:
            raise ValueError(f"unknown potential kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return self.coeffs[0] * x
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))

    @classmethod
    def linear(cls, a=1.0):
        return cls("linear", (float(a),))

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial", tuple(float(c) for c in coeffs))

    @classmethod
    def parse(cls, text):
        """Parse CLI syntax: linear:1 | poly:c0,c1,..."""
        name, _, arg = text.partition(":")
        name = name.strip().lower()
        if name == "linear":
            return cls.linear(float(arg) if arg else 1.0)
        if name in ("poly", "polynomial"):
            return cls.polynomial([float(c) for c in arg.split(",")])
        raise ValueError(f"cannot parse potential {text!r}")

    @property
    def label(self):
        if self.kind == "linear":
            return f"linear:{self.coeffs[0]:g}"
        return "poly:" + ",".join(f"{c:g}" for c in self.coeffs)


@dataclass(frozen=True)
class GasConfig:
    """Full gas specification: particle count, interaction map, potential,
    weight exponent."""

    n: int
    g: GFunction
    v: Potential
    b: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("particle count must be >= 1")
        if not self.b > 0:
            raise ValueError("weight exponent b must be > 0")


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of the confinement growth check at fixed checkpoints."""

    passed: bool
    checkpoints: tuple
    ratio_log_x: tuple
    ratio_log_g: tuple
    worst_ratio: float

    def __bool__(self):
        return self.passed


def check_growth(cfg):
    """Heuristic check that V dominates (b+1)*log x and (b+1)*log|g(x)| at
    x in {1e2, 1e4, 1e6, 1e8}; both ratios must exceed 1 everywhere.
    A bounded or sub-unit |g| puts no constraint (ratio is +inf there)."""
    beta = cfg.b + 1.0
    r1, r2 = [], []
    for x in _GROWTH_CHECKPOINTS:
        vx = float(cfg.v(x))
        r1.append(vx / (beta * np.log(x)))
        lg = float(cfg.g.log_abs(x))
        r2.append(vx / (beta * lg) if lg > 0 else np.inf)
    worst = min(min(r1), min(r2))
    return GrowthReport(passed=worst > 1.0,
                        checkpoints=_GROWTH_CHECKPOINTS,
                        ratio_log_x=tuple(r1),
                        ratio_log_g=tuple(r2),
                        worst_ratio=float(worst))


def log_gas_density(cfg, x):
    """Unnormalized log density of the gas at a configuration x in (0,inf)^n;
    -inf at coincident coordinates (in x or in g(x))."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != cfg.n:
        raise ValueError(f"configuration has {x.size} coordinates, expected {cfg.n}")
    if np.any(x <= 0):
        raise ValueError("coordinates must be positive")
    gx = cfg.g(x)
    iu, ju = np.triu_indices(cfg.n, k=1)
    dx = np.abs(x[iu] - x[ju])
    dg = np.abs(gx[iu] - gx[ju])
    if dx.size and (np.any(dx == 0.0) or np.any(dg == 0.0)):
        return -np.inf
    val = -cfg.n * float(np.sum(cfg.v(x))) + (cfg.b - 1.0) * float(np.sum(np.log(x)))
    if dx.size:
        val += float(np.sum(np.log(dx)) + np.sum(np.log(dg)))
    return val


@dataclass
class McmcDiagnostics:
    """Sampler diagnostics: post-burn-in acceptance rate, frozen step sizes,
    and (optionally) a thinned trace of configurations."""

    acceptance_rate: float
    step_sizes: np.ndarray
    sweeps: int
    burn_in: int
    trace: Optional[np.ndarray] = None


def mcmc_sample(cfg, steps, burn_in, seed, init=None, record_every=0,
                target_accept=0.35):
    """Single-coordinate Metropolis for the gas; returns the final
    configuration as an EmpiricalMeasure plus diagnostics.

    steps and burn_in count full sweeps (n proposals each).  Proposals are
    Gaussian steps on log coordinates; the acceptance ratio carries the
    Jacobian term, so the chain targets the gas density itself.  Proposals
    landing within 1e-14 of another coordinate are rejected outright.
    record_every > 0 stores every so-many post-burn-in sweeps in the
    diagnostics trace.
    """
    if steps < 1 or burn_in < 1:
        raise ValueError("steps and burn_in must be positive")
    growth = check_growth(cfg)
    if not growth.passed:
        raise ValueError(
            f"growth check failed (worst ratio {growth.worst_ratio:.4g} <= 1); "
            "the rate functional would not confine this gas")
    n = cfg.n
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2 ** 64 - 1)))
    if init is None:
        x = 2.0 * (np.arange(n) + 0.5) / n
    else:
        x = np.asarray(init, dtype=float).copy()
        if x.size != n or np.any(x <= 0):
            raise ValueError("init must be n positive coordinates")
    y = np.log(x)
    gx = np.asarray(cfg.g(x), dtype=float)
    vx = np.asarray(cfg.v(x), dtype=float)
    sig = np.full(n, 0.5)
    log_sig = np.log(sig)

    accepted_post = 0
    proposals_post = 0
    trace = []
    total = burn_in + steps
    for sweep in range(total):
        normals = rng.standard_normal(n)
        log_us = np.log(rng.random(n))
        adapt = sweep < burn_in
        gamma = (sweep + 1.0) ** -0.6 if adapt else 0.0
        for i in range(n):
            yi_new = y[i] + sig[i] * normals[i]
            xi_new = np.exp(yi_new)
            acc = False
            if np.isfinite(xi_new) and xi_new > 0.0:
                absdx_new = np.abs(xi_new - x)
                absdx_new[i] = 1.0
                if absdx_new.min() > _COINCIDENCE_TOL:
                    gi_new = float(cfg.g(xi_new))
                    absdg_new = np.abs(gi_new - gx)
                    absdg_new[i] = 1.0
                    absdx_old = np.abs(x[i] - x)
                    absdx_old[i] = 1.0
                    absdg_old = np.abs(gx[i] - gx)
                    absdg_old[i] = 1.0
                    vi_new = float(cfg.v(xi_new))
                    delta = (-n * (vi_new - vx[i])
                             + cfg.b * (yi_new - y[i])
                             + np.sum(np.log(absdx_new)) - np.sum(np.log(absdx_old))
                             + np.sum(np.log(absdg_new)) - np.sum(np.log(absdg_old)))
                    if log_us[i] < delta:
                        x[i] = xi_new
                        y[i] = yi_new
                        gx[i] = gi_new
                        vx[i] = vi_new
                        acc = True
            if adapt:
                log_sig[i] += gamma * ((1.0 if acc else 0.0) - target_accept)
                sig[i] = np.exp(log_sig[i])
            else:
                proposals_post += 1
                accepted_post += int(acc)
        if record_every and sweep >= burn_in and (sweep - burn_in) % record_every == 0:
            trace.append(x.copy())
    diag = McmcDiagnostics(
        acceptance_rate=accepted_post / max(proposals_post, 1),
        step_sizes=sig.copy(),
        sweeps=steps,
        burn_in=burn_in,
        trace=np.array(trace) if trace else None,
    )
    return EmpiricalMeasure(x), diag
