"""The shape cone the two-solution argument works inside.

Members are nonnegative, even, unimodal grid functions whose values on
the core interval U = (-a_half, a_half) stay above gamma times the sup
norm.  The Green operator maps the cone into itself, which is what makes
the fixed-point index machinery applicable; `verify_invariance` samples
that claim numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .greenop import Grid, GridFunction, apply_green, gamma_U, make_grid
from .kernels import KernelParams

__all__ = [
    "ConeSpec",
    "MembershipReport",
    "InvarianceReport",
    "check_membership",
    "sample_cone",
    "verify_invariance",
]


@dataclass(frozen=True)
class ConeSpec:
    """Parameters of the cone: core half-width, ratio floor, slack."""

    a_half: float = 0.5
    gamma: float = 0.0  # 0 marks the ratio constraint as unset
    tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.a_half < 1.0:
            raise ValueError(f"a_half must lie in (0,1), got {self.a_half}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0,1), got {self.gamma}")
        if self.tol < 0.0:
            raise ValueError("tol must be nonnegative")

    @classmethod
    def for_kernel(cls, kp: KernelParams, a_half: float = 0.5, tol: float = 1e-12):
        """Spec whose ratio floor is the kernel constant gamma_U."""
        return cls(a_half=a_half, gamma=gamma_U(a_half, kp), tol=tol)


@dataclass(frozen=True)
class MembershipReport:
    nonneg: bool
    symmetric: bool
    unimodal: bool
    ratio_ok: bool
    violations: dict

    @property
    def member(self) -> bool:
        return self.nonneg and self.symmetric and self.unimodal and self.ratio_ok

    def worst(self) -> float:
        return max(self.violations.values())


def check_membership(u: GridFunction, spec: ConeSpec) -> MembershipReport:
    """Test the four cone constraints with slack spec.tol times sup|u|.

    Violation magnitudes are reported in absolute units so callers can
    apply their own thresholds.  The zero function is a member.
    """
    v = u.values
    sup = u.sup_norm
    slack = spec.tol * sup

    neg = max(0.0, float(-v.min()))

    asym = float(np.abs(v - v[::-1]).max())

    # nondecreasing up to the center node, nonincreasing after
    mid = u.grid.n // 2
    rise = np.diff(v[: mid + 1])
    fall = np.diff(v[mid:])
    uni = max(0.0, float(-rise.min()) if rise.size else 0.0, float(fall.max()) if fall.size else 0.0)

    core = np.abs(u.grid.nodes) <= spec.a_half
    ratio_gap = max(0.0, float(spec.gamma * sup - v[core].min())) if spec.gamma > 0 else 0.0

    return MembershipReport(
        nonneg=neg <= slack,
        symmetric=asym <= slack,
        unimodal=uni <= slack,
        ratio_ok=ratio_gap <= slack,
        violations={"negative": neg, "asymmetry": asym, "unimodality": uni, "ratio": ratio_gap},
    )


def sample_cone(rho, count, seed, *, grid=None, kp=None, spec=None):
    """Random cone members with sup norm exactly rho.

    Each sample is a convex mixture of bump powers (1-x^2)^beta, so the
    shape constraints hold by construction and the value at the center
    node is exactly rho.  beta runs from alpha/2 (the boundary growth of
    the torsion function) up to 3, capped when a spec with a ratio floor
    is supplied so that steep bumps cannot dip under gamma on the core.
    """
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if grid is None:
        grid = make_grid(65)
    beta_lo = kp.alpha / 2 if kp is not None else 0.5
    beta_hi = 3.0
    if spec is not None and spec.gamma > 0:
        # (1-x^2)^beta >= gamma on |x| <= a_half forces beta below this cap
        cap = np.log(spec.gamma) / np.log1p(-spec.a_half**2)
        beta_hi = min(beta_hi, cap)
        if beta_hi <= beta_lo:
            # strict ratio floor: shift the whole range under the cap
            beta_lo, beta_hi = cap / 2, cap
    rng = np.random.default_rng(seed)
    bump = 1.0 - grid.nodes**2
    out = []
    for _ in range(count):
        betas = rng.uniform(beta_lo, beta_hi, size=3)
        weights = rng.dirichlet(np.ones(3))
        profile = (weights[:, None] * bump[None, :] ** betas[:, None]).sum(axis=0)
        values = rho * profile
        values[grid.n // 2] = rho  # mixture weights sum to 1; pin the sup exactly
        out.append(GridFunction(grid, values))
    return out


@dataclass(frozen=True)
class InvarianceReport:
    count: int
    failures: int
    worst_violation: float
    by_kind: dict

    @property
    def ok(self) -> bool:
        return self.failures == 0


def verify_invariance(p, spec: ConeSpec, kp: KernelParams, count, *, grid=None, seed=0):
    """Push random cone members through u -> G(u^p) and recheck membership.

    Sample amplitudes vary over two decades so the nonlinearity is probed
    both in its shallow and steep regimes.  Violations are measured
    relative to the sup of the image, with the slack of the supplied spec.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if grid is None:
        grid = make_grid(65)
    samples = sample_cone(1.0, count, seed, grid=grid, kp=kp, spec=spec)
    rng = np.random.default_rng(seed + 1)
    scales = 10.0 ** rng.uniform(-1.0, 1.0, size=count)
    failures = 0
    worst = 0.0
    by_kind = {"negative": 0.0, "asymmetry": 0.0, "unimodality": 0.0, "ratio": 0.0}
    for u, s in zip(samples, scales):
        image = apply_green(u.with_values(s * u.values**p), kp)
        rep = check_membership(image, spec)
        sup = image.sup_norm
        for kind, val in rep.violations.items():
            rel = val / sup if sup > 0 else 0.0
            by_kind[kind] = max(by_kind[kind], rel)
            worst = max(worst, rel)
        if not rep.member:
            failures += 1
    return InvarianceReport(count=count, failures=failures, worst_violation=worst, by_kind=by_kind)
