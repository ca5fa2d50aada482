"""Two solution branches of u = G(u^p) + G(h) and the fold in between.

The minimal branch is the monotone limit of Picard iteration from zero;
it exists whenever the scalar certificate passes, and the iteration is
increasing so any escape past the certified radius means divergence.
The second branch is found by Newton's method deflated away from the
minimal solution, started at the amplitude the scalar model predicts
for the larger root.  `fold_sweep` scales the forcing by lambda and
bisects for the amplitude where the second branch disappears.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .cone import ConeSpec, check_membership, sample_cone
from .greenop import GridFunction, apply_green, coercivity_a, get_operator, operator_norm_b
from .kernels import KernelParams, PVConfig, frac_laplacian_pv
from .scalar import CertificateFailure, Radii, critical_constant, radii_certificate

__all__ = [
    "CertificateReport",
    "SolveResult",
    "ProbeReport",
    "SweepPoint",
    "SweepResult",
    "certify",
    "picard_minimal",
    "newton_second",
    "krasnoselskii_probe",
    "residual_strong",
    "fold_sweep",
]


def _pow(u, p):
    # solutions of interest are nonnegative; clipping the base removes the
    # spurious sign-flipped fixed points an odd extension would admit
    return np.maximum(u, 0.0) ** p


def _dpow(u, p):
    return p * np.maximum(u, 0.0) ** (p - 1.0)


def _default_spec(kp: KernelParams) -> ConeSpec:
    return ConeSpec.for_kernel(kp)  # gamma_U is cached, so this is cheap


@dataclass(frozen=True)
class CertificateReport:
    """Constants and verdict of the scalar two-solution certificate."""

    b: float
    a_coerc: float
    c_p: float
    u0_sup: float
    lhs: float
    passed: bool
    margin: float
    radii: Radii | None = None
    failure: CertificateFailure | None = None

    def to_dict(self) -> dict:
        out = {
            "b": self.b,
            "a_coerc": self.a_coerc,
            "c_p": self.c_p,
            "u0_sup": self.u0_sup,
            "lhs": self.lhs,
            "pass": self.passed,
            "margin": self.margin,
        }
        if self.radii is not None:
            out["radii"] = {
                "rho1": self.radii.rho1,
                "rho2": self.radii.rho2,
                "rho3": self.radii.rho3,
            }
        if self.failure is not None:
            out["failure"] = self.failure.kind
        return out


def certify(h: GridFunction, p: float, spec: ConeSpec, kp: KernelParams) -> CertificateReport:
    """Run the radii certificate for the forcing h.

    h must itself have the cone shape (the ratio floor is not required
    of the forcing); otherwise the problem leaves the framework and a
    ValueError is raised.
    """
    shape_spec = ConeSpec(a_half=spec.a_half, gamma=0.0, tol=max(spec.tol, 1e-12))
    rep = check_membership(h, shape_spec)
    if not rep.member:
        raise ValueError(f"forcing must be nonnegative, even and unimodal: {rep.violations}")
    u0 = apply_green(h, kp)
    b = operator_norm_b(kp, p)
    a = coercivity_a(spec.a_half, p, kp)
    c_p = critical_constant(p)
    u0_sup = u0.sup_norm
    lhs = b * u0_sup ** (p - 1.0)
    res = radii_certificate(a, b, u0_sup, p)
    if isinstance(res, Radii):
        return CertificateReport(
            b=b, a_coerc=a, c_p=c_p, u0_sup=u0_sup, lhs=lhs,
            passed=True, margin=(c_p - lhs) / c_p, radii=res,
        )
    return CertificateReport(
        b=b, a_coerc=a, c_p=c_p, u0_sup=u0_sup, lhs=lhs,
        passed=False, margin=res.margin, failure=res,
    )


@dataclass
class SolveResult:
    u: GridFunction
    fixed_point_residual: float
    iterations: int
    branch: str
    in_cone: bool
    converged: bool
    status: str
    strong_residual: float | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "converged": self.converged,
            "status": self.status,
            "iterations": self.iterations,
            "sup_norm": self.u.sup_norm,
            "fixed_point_residual": self.fixed_point_residual,
            "strong_residual": self.strong_residual,
            "in_cone": self.in_cone,
        }


def _scalar_second_root(b: float, u0_sup: float, p: float):
    """Largest root of b s^p + u0_sup = s, or None past the fold.

    The gap function is convex with minimizer u_t; a negative value
    there is equivalent to two distinct roots, and the larger one lies
    to the right of u_t, which gives a safe bracket.
    """
    u_t = (1.0 / (p * b)) ** (1.0 / (p - 1.0))
    f = lambda s: b * s**p + u0_sup - s
    if f(u_t) >= 0.0:
        return None
    hi = 2.0 * u_t
    while f(hi) < 0.0:
        hi *= 10.0
    return brentq(f, u_t, hi, xtol=1e-300, rtol=1e-15)


def _picard(M, u0vec, p, tol, max_iter, guard):
    u = np.zeros_like(u0vec)
    for it in range(1, max_iter + 1):
        un = M @ _pow(u, p) + u0vec
        step = float(np.abs(un - u).max())
        u = un
        if np.abs(u).max() > guard:
            return u, it, "diverged"
        if step < tol:
            return u, it, "converged"
    return u, max_iter, "max_iter"


def _newton_deflated(M, u0vec, p, known, start, tol, max_iter):
    n = u0vec.size
    eye = np.eye(n)
    u = start.copy()
    for it in range(1, max_iter + 1):
        F = u - M @ _pow(u, p) - u0vec
        if not np.isfinite(F).all():
            return u, it, "diverged", np.inf
        J = eye - M * _dpow(u, p)[None, :]
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return u, it, "singular", np.inf
        diff = u - known
        nrm2 = float(diff @ diff)
        if nrm2 > 0.0:
            # deflation by eta = 1 + 1/|u - known|^2: the rank-one update of
            # the Jacobian reduces to scaling the plain step (Sherman-Morrison)
            eta = 1.0 + 1.0 / nrm2
            tau = float(-2.0 * (diff @ d) / nrm2**2)
            if abs(eta - tau) > 1e-300:
                d = d * (eta / (eta - tau))
        # keep the iterate from overflowing the power evaluation
        cap = 50.0 * max(1.0, float(np.abs(u).max()))
        dmax = float(np.abs(d).max())
        if dmax > cap:
            d = d * (cap / dmax)
        u = u + d
        if dmax < tol:
            F = u - M @ _pow(u, p) - u0vec
            return u, it, "converged", float(np.abs(F).max())
    return u, max_iter, "max_iter", np.nan


def picard_minimal(
    h: GridFunction,
    p: float,
    kp: KernelParams,
    tol: float = 1e-12,
    max_iter: int = 5000,
    spec: ConeSpec | None = None,
) -> SolveResult:
    """Minimal-branch solution by monotone iteration from zero.

    The iterates increase toward the smallest fixed point.  While the
    certificate holds they stay under rho2, so crossing that radius (or
    four times the scalar tangency amplitude when the certificate fails)
    is reported as divergence.
    """
    if spec is None:
        spec = _default_spec(kp)
    op = get_operator(h.grid, kp)
    u0vec = op.apply(h.values)
    u0_sup = float(np.abs(u0vec).max())
    if u0_sup == 0.0:
        u = h.with_values(np.zeros(h.grid.n))
        return SolveResult(
            u=u, fixed_point_residual=0.0, iterations=0, branch="minimal",
            in_cone=check_membership(u, spec).member, converged=True, status="converged",
        )
    b = operator_norm_b(kp, p)
    u_t = (1.0 / (p * b)) ** (1.0 / (p - 1.0))
    if b * u0_sup ** (p - 1.0) < critical_constant(p):
        # under the certificate the monotone iterates stay below rho2
        guard = (u0_sup / (b * (p - 1.0))) ** (1.0 / p) * (1.0 + 1e-9)
    else:
        guard = 4.0 * u_t
    vals, iters, status = _picard(M=op.matrix, u0vec=u0vec, p=p, tol=tol, max_iter=max_iter, guard=guard)
    u = h.with_values(vals)
    fp = float(np.abs(vals - op.matrix @ _pow(vals, p) - u0vec).max())
    return SolveResult(
        u=u, fixed_point_residual=fp, iterations=iters, branch="minimal",
        in_cone=check_membership(u, spec).member, converged=(status == "converged"),
        status=status,
    )


def newton_second(
    h: GridFunction,
    p: float,
    kp: KernelParams,
    known: "SolveResult | GridFunction",
    tol: float = 1e-12,
    max_iter: int = 80,
    spec: ConeSpec | None = None,
) -> SolveResult:
    """Second-branch solution by Newton iteration deflated off the known one.

    Starts are the known profile rescaled to candidate amplitudes: the
    larger root of the scalar model first (it predicts the second branch
    sup well), then half the outer certified radius, then spread factors
    around the scalar root.  A candidate is accepted only if it converged
    to something genuinely distinct, nonnegative and inside the cone,
    beyond rho2 when a certificate is available.
    """
    if spec is None:
        spec = _default_spec(kp)
    known_u = known.u if isinstance(known, SolveResult) else known
    op = get_operator(h.grid, kp)
    u0vec = op.apply(h.values)
    u0_sup = float(np.abs(u0vec).max())
    b = operator_norm_b(kp, p)
    c_p = critical_constant(p)
    sigma2 = _scalar_second_root(b, u0_sup, p)

    radii = None
    if 0.0 < b * u0_sup ** (p - 1.0) < c_p:
        res = radii_certificate(coercivity_a(spec.a_half, p, kp), b, u0_sup, p)
        if isinstance(res, Radii):
            radii = res

    u_t = (1.0 / (p * b)) ** (1.0 / (p - 1.0))
    base = sigma2 if sigma2 is not None else 2.0 * u_t
    scales = [base]
    if radii is not None:
        scales.append(radii.rho3 / 2.0)
    scales += [1.5 * base, 0.75 * base, 2.5 * base, 4.0 * base]

    profile = known_u.values
    if float(np.abs(profile).max()) <= 0.0:
        profile = (1.0 - h.grid.nodes**2) ** (kp.alpha / 2.0)
    psup = float(np.abs(profile).max())

    sep_floor = max(1e-7, 10.0 * tol)
    if radii is not None:
        sep_floor = max(sep_floor, (radii.rho2 - radii.rho1) / 2.0)

    last = None
    for scale in scales:
        start = profile * (scale / psup)
        vals, iters, status, fp = _newton_deflated(
            op.matrix, u0vec, p, known_u.values, start, tol, max_iter
        )
        u = h.with_values(vals)
        membership = check_membership(u, spec)
        sep = float(np.abs(vals - known_u.values).max())
        result = SolveResult(
            u=u, fixed_point_residual=fp, iterations=iters, branch="second",
            in_cone=membership.member, converged=(status == "converged"), status=status,
        )
        accepted = (
            status == "converged"
            and sep > sep_floor
            and vals.min() > -1e-10 * max(1.0, u.sup_norm)
            and membership.member
            and (radii is None or u.sup_norm > radii.rho2)
        )
        if accepted:
            return result
        last = result
    last.status = "not_found" if last.status == "converged" else last.status
    last.converged = False
    return last


@dataclass(frozen=True)
class ProbeReport:
    rho: float
    min_T: float
    max_T: float
    count: int


def krasnoselskii_probe(
    rho: float,
    h: GridFunction,
    p: float,
    kp: KernelParams,
    spec: ConeSpec,
    count: int,
    seed: int = 0,
) -> ProbeReport:
    """Range of sup|T(u)| over random cone members with sup|u| = rho.

    T(u) = G(u^p) + G(h).  On the certified radii the range must land
    strictly inside (rho1 side) or outside (rho2 side) of rho, which is
    the compression/expansion picture behind the two-solution count.
    """
    op = get_operator(h.grid, kp)
    u0vec = op.apply(h.values)
    sups = []
    for u in sample_cone(rho, count, seed, grid=h.grid, kp=kp, spec=spec):
        sups.append(float(np.abs(op.apply(_pow(u.values, p)) + u0vec).max()))
    return ProbeReport(rho=rho, min_T=min(sups), max_T=max(sups), count=count)


def residual_strong(
    result: SolveResult,
    h: GridFunction,
    p: float,
    kp: KernelParams,
    cfg: PVConfig | None = None,
    probes=(0.0, 0.25, -0.25, 0.5, -0.5),
) -> float:
    """Pointwise residual of the differential equation at the probe points.

    Evaluates the fractional Laplacian of the computed solution by the
    principal-value quadrature and compares with u^p + h.  The result is
    stored on the SolveResult and returned.
    """
    u = result.u
    su = CubicSpline(u.grid.nodes, u.values)
    sh = CubicSpline(h.grid.nodes, h.values)
    worst = 0.0
    for x in probes:
        lap = frac_laplacian_pv(u, x, kp, cfg)
        rhs = float(su(x)) ** p + float(sh(x))
        worst = max(worst, abs(lap - rhs))
    result.strong_residual = worst
    return worst


@dataclass(frozen=True)
class SweepPoint:
    lam: float
    n_found: int
    sup_minimal: float
    sup_second: float


@dataclass(frozen=True)
class SweepResult:
    points: list
    fold_estimate: float
    lambda_cert: float

    @property
    def bracketed(self) -> bool:
        return np.isfinite(self.fold_estimate)


def _solve_pair(M, u0vec, p, b, tol=1e-11, picard_max=200_000, newton_max=100):
    """(count, sup_minimal, sup_second) for u = M u^p + u0vec."""
    u0_sup = float(np.abs(u0vec).max())
    u_t = (1.0 / (p * b)) ** (1.0 / (p - 1.0))
    umin, _, st = _picard(M, u0vec, p, tol=tol, max_iter=picard_max, guard=4.0 * u_t)
    if st != "converged":
        return 0, np.nan, np.nan
    smin = float(np.abs(umin).max())
    if smin <= 0.0:
        return 1, 0.0, np.nan
    sigma2 = _scalar_second_root(b, u0_sup, p)
    scale = sigma2 if sigma2 is not None else 2.0 * u_t
    start = umin * (scale / smin)
    usec, _, st2, _ = _newton_deflated(M, u0vec, p, umin, start, tol=1e-12, max_iter=newton_max)
    distinct = float(np.abs(usec - umin).max()) >= 1e-7
    if st2 != "converged" or not distinct or (usec < -1e-10).any():
        return 1, smin, np.nan
    return 2, smin, float(np.abs(usec).max())


def fold_sweep(
    h_base: GridFunction,
    p: float,
    kp: KernelParams,
    lambda_lo: float,
    lambda_hi: float,
    steps: int,
    scalar_model: bool = False,
    rel_width: float | None = None,
) -> SweepResult:
    """Scan u = G(u^p) + lambda G(h_base) for the loss of the second branch.

    Counts branches on a coarse lambda grid, then bisects the largest
    two-branch/one-branch bracket down to the requested relative width
    (1e-4 by default, 1e-7 in scalar mode where each solve is a pair of
    scalar root findings and the fold has a closed form to compare with).
    fold_estimate is NaN when the scan never saw two branches or never
    lost them.
    """
    if not (0.0 < lambda_lo < lambda_hi):
        raise ValueError(f"need 0 < lambda_lo < lambda_hi, got [{lambda_lo}, {lambda_hi}]")
    if steps < 2:
        raise ValueError(f"need at least 2 sweep steps, got {steps}")
    if rel_width is None:
        rel_width = 1e-7 if scalar_model else 1e-4
    b = operator_norm_b(kp, p)
    u0_base = apply_green(h_base, kp)
    u0_base_sup = u0_base.sup_norm
    if u0_base_sup == 0.0:
        raise ValueError("base forcing is identically zero; nothing to sweep")
    if scalar_model:
        M = np.array([[b]])
        base = np.array([u0_base_sup])
    else:
        M = get_operator(h_base.grid, kp).matrix
        base = u0_base.values
    lam_cert = (critical_constant(p) / b) ** (1.0 / (p - 1.0)) / u0_base_sup

    count_at = lambda lam: _solve_pair(M, lam * base, p, b)
    points = []
    for lam in np.linspace(lambda_lo, lambda_hi, steps):
        nf, s1, s2 = count_at(lam)
        points.append(SweepPoint(lam=float(lam), n_found=nf, sup_minimal=s1, sup_second=s2))

    two = [pt.lam for pt in points if pt.n_found == 2]
    fold = np.nan
    if two:
        lo = max(two)
        above = [pt.lam for pt in points if pt.lam > lo and pt.n_found < 2]
        if above:
            hi = min(above)
            while (hi - lo) / hi > rel_width:
                mid = 0.5 * (lo + hi)
                if count_at(mid)[0] == 2:
                    lo = mid
                else:
                    hi = mid
            fold = 0.5 * (lo + hi)
    return SweepResult(points=points, fold_estimate=float(fold), lambda_cert=float(lam_cert))
