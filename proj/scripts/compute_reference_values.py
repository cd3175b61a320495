#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Everything here is computed symbolically (sympy) or from closed-form
monomial integrals, independent of the C++ implementation. The printed
values are frozen into tests/.
"""

import sympy as sp
from fractions import Fraction

x, y = sp.symbols("x y", real=True)


# ---------------------------------------------------------------------------
# 1. Monomial integrals over the reference triangle {xi,eta>=0, xi+eta<=1}
#    int xi^a eta^b = a! b! / (a+b+2)!
# ---------------------------------------------------------------------------
def ref_monomial(a, b):
    import math
    return Fraction(math.factorial(a) * math.factorial(b),
                    math.factorial(a + b + 2))


print("== reference-triangle monomial integrals ==")
for (a, b) in [(0, 0), (1, 0), (2, 2), (3, 3), (4, 2), (6, 0), (5, 1)]:
    v = ref_monomial(a, b)
    print(f"  int xi^{a} eta^{b} = {v} = {float(v):.17g}")


# ---------------------------------------------------------------------------
# 2. EMAC trilinear form c(a,b,c) = int 2 D(a) b . c + (div a) b . c
#    over the unit square, for polynomial fields of degree <= 2
#    (exactly representable in P2, so the assembled value must match
#    to rounding).
# ---------------------------------------------------------------------------
def emac_trilinear(avec, bvec, cvec):
    a1, a2 = avec
    b1, b2 = bvec
    c1, c2 = cvec
    D11 = sp.diff(a1, x)
    D22 = sp.diff(a2, y)
    D12 = (sp.diff(a1, y) + sp.diff(a2, x)) / 2
    diva = sp.diff(a1, x) + sp.diff(a2, y)
    r1 = 2 * (D11 * b1 + D12 * b2) + diva * b1
    r2 = 2 * (D12 * b1 + D22 * b2) + diva * b2
    integrand = r1 * c1 + r2 * c2
    return sp.integrate(sp.integrate(integrand, (y, 0, 1)), (x, 0, 1))


cases = [
    ("A", (y, sp.Integer(0)), (x, sp.Integer(0)), (sp.Integer(1), sp.Integer(0))),
    ("B", (x**2, x * y), (y, x), (x, y**2)),
    ("C", (x + 2 * y, x**2 - y), (x * y, 3 - x), (y**2, x - y)),
]

print("\n== EMAC trilinear values on [0,1]^2 ==")
for name, a, b, c in cases:
    v = emac_trilinear(a, b, c)
    print(f"  case {name}: c(a,b,c) = {v} = {float(v):.17g}")

# convective trilinear (u.grad v, w) and ((div u) v, w) for the same cases,
# used to cross-check the identity test helpers
def conv_trilinear(u, v, w):
    t1 = (u[0] * sp.diff(v[0], x) + u[1] * sp.diff(v[0], y)) * w[0]
    t2 = (u[0] * sp.diff(v[1], x) + u[1] * sp.diff(v[1], y)) * w[1]
    return sp.integrate(sp.integrate(t1 + t2, (y, 0, 1)), (x, 0, 1))


print("\n== convective trilinear values on [0,1]^2 ==")
for name, a, b, c in cases:
    v = conv_trilinear(a, b, c)
    print(f"  case {name}: (a.grad b, c) = {v} = {float(v):.17g}")


# ---------------------------------------------------------------------------
# 3. Structured-mesh load integrals for the benchmark forcing at t=0.
#    Mesh convention replicated: nx=ny=4 on [0,1]^2, vertices row-major
#    (iy*(nx+1)+ix), each cell split along the lower-left -> upper-right
#    diagonal into (v00,v10,v11) and (v00,v11,v01).
# ---------------------------------------------------------------------------
fx = 2 * sp.cos(y) - sp.sin(x) * sp.sin(y) + 1
fy = 2 * sp.sin(x) + sp.cos(x) * sp.cos(y) - 1

nx = ny = 4
h = Fraction(1, 4)
verts = [(Fraction(ix, 4), Fraction(iy, 4)) for iy in range(ny + 1) for ix in range(nx + 1)]
tris = []
for iy in range(ny):
    for ix in range(nx):
        v00 = iy * (nx + 1) + ix
        v10 = v00 + 1
        v01 = v00 + (nx + 1)
        v11 = v01 + 1
        tris.append((v00, v10, v11))
        tris.append((v00, v11, v01))


def tri_integral(tri, integrand):
    """Integrate integrand(x,y) over physical triangle via reference map."""
    xi, eta = sp.symbols("xi eta", positive=True)
    (x0, y0), (x1, y1), (x2, y2) = [verts[i] for i in tri]
    X = x0 + (x1 - x0) * xi + (x2 - x0) * eta
    Y = y0 + (y1 - y0) * xi + (y2 - y0) * eta
    J = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    f = integrand.subs({x: X, y: Y}) * abs(J)
    inner = sp.integrate(f, (eta, 0, 1 - xi))
    return sp.integrate(inner, (xi, 0, 1))


def p2_vertex_basis(tri, local_vertex):
    """P2 basis of the local vertex node on a physical triangle, as f(x,y)."""
    (x0, y0), (x1, y1), (x2, y2) = [verts[i] for i in tri]
    det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    lam1 = ((x - x0) * (y2 - y0) - (y - y0) * (x2 - x0)) / det
    lam2 = ((y - y0) * (x1 - x0) - (x - x0) * (y1 - y0)) / det
    lam0 = 1 - lam1 - lam2
    lam = [lam0, lam1, lam2][local_vertex]
    return lam * (2 * lam - 1)


def p2_edge_basis(tri, va, vb):
    """P2 mid-edge basis for edge (va,vb) of a physical triangle."""
    (x0, y0), (x1, y1), (x2, y2) = [verts[i] for i in tri]
    det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    lam1 = ((x - x0) * (y2 - y0) - (y - y0) * (x2 - x0)) / det
    lam2 = ((y - y0) * (x1 - x0) - (x - x0) * (y1 - y0)) / det
    lam0 = 1 - lam1 - lam2
    lams = {tri[0]: lam0, tri[1]: lam1, tri[2]: lam2}
    return 4 * lams[va] * lams[vb]


# vertex node at (0.5, 0.5): global vertex 12; support = triangles containing it
target_v = 12
print("\n== forcing load integrals, h=1/4 mesh, t=0 ==")
for comp, f in (("x", fx), ("y", fy)):
    total = sp.Integer(0)
    for tri in tris:
        if target_v in tri:
            phi = p2_vertex_basis(tri, tri.index(target_v))
            total += tri_integral(tri, f * phi)
    print(f"  vertex (0.5,0.5), {comp}-component: {sp.nsimplify(total)}")
    print(f"    = {float(total.evalf(30)):.17g}")

# mid-edge node on edge between vertices 12 and 13 (midpoint (0.625, 0.5))
va, vb = 12, 13
for comp, f in (("x", fx), ("y", fy)):
    total = sp.Integer(0)
    for tri in tris:
        if va in tri and vb in tri:
            phi = p2_edge_basis(tri, va, vb)
            total += tri_integral(tri, f * phi)
    print(f"  midedge (0.625,0.5), {comp}-component: ")
    print(f"    = {float(total.evalf(30)):.17g}")


# ---------------------------------------------------------------------------
# 4. Misc closed forms used in tests
# ---------------------------------------------------------------------------
print("\n== misc ==")
r = sp.symbols("r", positive=True)
E_gresho = sp.pi * (sp.integrate(25 * r**3, (r, 0, sp.Rational(1, 5)))
                    + sp.integrate((2 - 5 * r)**2 * r, (r, sp.Rational(1, 5), sp.Rational(2, 5))))
print(f"  analytic kinetic energy of the vortex field: {E_gresho} = {float(E_gresho):.17g}")

AM_gresho = -2 * sp.pi * (sp.integrate(5 * r**4 / r, (r, 0, sp.Rational(1, 5))) * r**0
                          )
# angular functional int (u1*y - u2*x) = -int v_theta * r dA = -2 pi int v r^2 dr
AM_gresho = -2 * sp.pi * (sp.integrate(5 * r * r**2, (r, 0, sp.Rational(1, 5)))
                          + sp.integrate((2 - 5 * r) * r**2, (r, sp.Rational(1, 5), sp.Rational(2, 5))))
print(f"  angular functional of the vortex field: {AM_gresho} = {float(AM_gresho):.17g}")

import math
rates1 = [2.32618e-6, 5.80867e-7, 1.44272e-7, 3.5518e-8, 9.56472e-9]
rates2 = [0.0281784, 0.00693954, 0.00124549, 0.000227284, 4.08335e-5]
print("  spatial-table rates from printed errors:",
      [f"{math.log(rates1[i-1]/rates1[i])/math.log(2):.6f}" for i in range(1, 5)])
print("  temporal-table rates from printed errors:",
      [f"{math.log(rates2[i-1]/rates2[i])/math.log(2):.6f}" for i in range(1, 5)])
