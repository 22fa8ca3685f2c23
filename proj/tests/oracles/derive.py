"""Independent derivations of the constants frozen into the C++ tests.

Run with: python3 tests/oracles/derive.py
Everything here is symbolic (sympy) or high precision (mpmath) and shares no
code with the library.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30
x1, x2, x3, r, m, a = sp.symbols("x1 x2 x3 r m a", positive=True)
X = [x1, x2, x3]
R = sp.sqrt(x1**2 + x2**2 + x3**2)


def show(label, value):
    print(f"{label:55s} {sp.N(value, 20)}")


# Half-Schwarzschild, n = 3: g = phi^4 delta, phi = 1 + m / (2 r).
phi = 1 + m / (2 * R)
psi = phi**4
show("g at r=2, m=1", psi.subs({m: 1, x1: 0, x2: 2, x3: 0}))
show("d g_11 / d x2 at (0,2,0), m=1", sp.diff(psi, x2).subs({m: 1, x1: 0, x2: 2, x3: 0}))
show("d2 g_11 / d x2^2 at (0,2,0), m=1", sp.diff(psi, x2, 2).subs({m: 1, x1: 0, x2: 2, x3: 0}))
show("d2 g_11 / d x1 d x2 at (1,2,2), m=1", sp.diff(psi, x1, x2).subs({m: 1, x1: 1, x2: 2, x3: 2}))

# Mean curvature of the coordinate sphere: H = div_g(nu), nu = x / (r phi^2).
sqrtg = psi ** sp.Rational(3, 2)
nu = [xi / (R * phi**2) for xi in X]
H = sum(sp.diff(sqrtg * nu[i], X[i]) for i in range(3)) / sqrtg
for rv in (2, 5, 10):
    show(f"H of coordinate sphere r={rv}, m=1", sp.simplify(H.subs({m: 1, x1: 0, x2: rv, x3: 0})))

# Areas of the hemisphere: 2 pi r^2 phi^4.
for rv in (2, 10):
    show(f"hemisphere area r={rv}, m=1", 2 * sp.pi * rv**2 * (1 + sp.Rational(1, 2 * rv)) ** 4)

# Flux integrand: (g_ij,j - g_jj,i) x^i / r, integrated over the hemisphere.
flux_density = sum((sp.diff(psi, X[i]) - 3 * sp.diff(psi, X[i])) * X[i] / R for i in range(3))
flux_density = sp.simplify(flux_density.subs({x1: 0, x2: r, x3: 0}))
show("flux density * r^2 / (4 phi^3) (expect m)", sp.simplify(flux_density * r**2 / (4 * (1 + m / (2 * r)) ** 3)))
for rv in (2, 10, 100):
    show(f"adm-flux r={rv}, m=1: phi^3", (1 + sp.Rational(1, 2 * rv)) ** 3)

# Conformal family psi = 1 + a (1 + r^2)^{-1/2}: flux = a r^3 / (2 (1 + r^2)^{3/2}).
psi_c = 1 + a / sp.sqrt(1 + R**2)
dens = sum((sp.diff(psi_c, X[i]) - 3 * sp.diff(psi_c, X[i])) * X[i] / R for i in range(3))
flux_c = sp.simplify(dens.subs({x1: 0, x2: r, x3: 0}) * 2 * sp.pi * r**2 / (8 * sp.pi))
show("conformal flux closed form (a=2, r=500)", flux_c.subs({a: 2, r: 500}))
show("conformal flux closed form (a=2, r=10)", flux_c.subs({a: 2, r: 10}))

# Christoffel symbol of the conformal family at (1, 2, 2), a = 1, tau = 1.
g = sp.diag(psi_c, psi_c, psi_c)
ginv = g.inv()
pt = {a: 1, x1: 1, x2: 2, x3: 2}
def gamma(k, i, j):
    return sum(ginv[k, l] * (sp.diff(g[l, i], X[j]) + sp.diff(g[l, j], X[i]) - sp.diff(g[i, j], X[l])) / 2
               for l in range(3))
show("Gamma^1_12 conformal a=1 at (1,2,2)", sp.simplify(gamma(0, 0, 1).subs(pt)))
show("Gamma^2_11 conformal a=1 at (1,2,2)", sp.simplify(gamma(1, 0, 0).subs(pt)))

# Scalar curvature of g = psi delta in 3D: R = -(4/psi^{5/4})... use the
# general conformal formula for g = u^4 delta: R = -8 u^{-5} Laplacian(u).
u = psi_c ** sp.Rational(1, 4)
lap = sum(sp.diff(u, xi, 2) for xi in X)
show("scalar curvature conformal a=1 at (1,2,2)", sp.N((-8 * lap / u**5).subs(pt), 20))

# Graph formula: (n-1) int_{|X|=rho} d_rho(a/|X|) = -8 pi a for n = 3.
show("graph mass a=-1/(8 pi)", 2 * 4 * sp.pi * (-(-1 / (8 * sp.pi))))

# Euclidean closed forms used by the quadrature tests.
show("flat shell volume r0=1 r=2", sp.Rational(2, 3) * sp.pi * (8 - 1))
show("int x1/r over hemisphere r=3", sp.pi * 9)
show("int x2^2/r^2 over circle r=5", sp.pi * 5)
show("unit S^3 hemisphere area", sp.pi**2)
