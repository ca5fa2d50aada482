"""Where the scalar equation u = b u^p + u0 gains and loses its roots.

The whole two-solution story compresses into one picture: the line u and
the shifted power b u^p + u0 either cross twice, touch once, or miss.
The crossover happens exactly at b u0^(p-1) = c_p.
"""

from bifrac import ScalarProblem, critical_constant, radii_certificate, scalar_roots

p, b = 2.0, 1.0
c_p = critical_constant(p)
print(f"critical constant c_{p:g} = {c_p}")

for scale in (0.5, 0.999999, 1.0, 1.000001, 2.0):
    u0 = scale * c_p / b
    roots = scalar_roots(ScalarProblem(b=b, u0=u0, p=p))
    tag = {0: "no root", 1: "tangent", 2: "two roots"}[len(roots)]
    print(f"  u0 = {scale:>9.7g} * threshold  ->  {tag:9s}  {[f'{r:.6f}' for r in roots]}")

# below threshold the certificate also hands back three radii: the small
# ball capturing the minimal root, the sphere separating it from the
# second one, and an outer sphere past which nothing returns
res = radii_certificate(0.05, b, 0.1, p)
print(f"\nradii at u0 = 0.1: rho1 = {res.rho1:.6f}, rho2 = {res.rho2:.6f}, rho3 = {res.rho3:.6f}")
roots = scalar_roots(ScalarProblem(b=b, u0=0.1, p=p))
print(f"roots {roots[0]:.6f} < rho2 < {roots[1]:.6f} as the ordering demands")
assert roots[0] < res.rho2 < roots[1]
