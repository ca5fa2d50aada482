"""The solution cone and why the solver may trust it.

Membership means four things at once: nonnegative, even, unimodal, and
never dipping under gamma times the peak on the core interval.  The
fixed-point argument needs the integral operator to keep all four, which
verify_invariance checks on random members.
"""

import numpy as np

from bifrac import ConeSpec, GridFunction, KernelParams, check_membership, make_grid, sample_cone, verify_invariance

kp = KernelParams(alpha=1.5)
spec = ConeSpec.for_kernel(kp)
grid = make_grid(65)
print(f"cone parameters: core |x| <= {spec.a_half}, ratio floor gamma = {spec.gamma:.6f}")

candidates = {
    "bump (1-x^2)": (1 - grid.nodes**2),
    "tilted bump": (1 - grid.nodes**2) * (1 + 0.05 * grid.nodes),
    "twin peaks": (1 - grid.nodes**2) * (0.3 + grid.nodes**2),
    "steep bump (1-x^2)^6": (1 - grid.nodes**2) ** 6,
}
for name, vals in candidates.items():
    rep = check_membership(GridFunction(grid, vals), spec)
    verdict = "in the cone" if rep.member else f"rejected ({max(rep.violations, key=rep.violations.get)})"
    print(f"  {name:22s} -> {verdict}")

samples = sample_cone(rho=1.0, count=400, seed=2, grid=grid, kp=kp, spec=spec)
assert all(check_membership(u, spec).member for u in samples)
sups = {float(u.sup_norm) for u in samples}
print(f"\n400 random members generated, every sup norm equals {sups} exactly")

for p in (2.0, 3.0):
    rep = verify_invariance(p, spec, kp, count=200, seed=0)
    print(f"p = {p:g}: {rep.count} images checked, failures = {rep.failures}, worst drift = {rep.worst_violation:.2e}")
