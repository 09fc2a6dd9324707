# Independent symbolic oracle for the analytic benchmark cases.
# Verifies div-free + momentum residuals symbolically and freezes constants.
import sympy as sp

x, y = sp.symbols("x1 x2", real=True)


def stokes_residual(u1, u2, p, nu, conv=None):
    """Momentum residual of -div(2 nu grad_s u - p I) + div(u x a) - s with s=0."""
    e11 = sp.diff(u1, x)
    e22 = sp.diff(u2, y)
    e12 = (sp.diff(u1, y) + sp.diff(u2, x)) / 2
    # sigma = 2 nu grad_s u - p I
    s11 = 2 * nu * e11 - p
    s12 = 2 * nu * e12
    s22 = 2 * nu * e22 - p
    r1 = -(sp.diff(s11, x) + sp.diff(s12, y))
    r2 = -(sp.diff(s12, x) + sp.diff(s22, y))
    if conv is not None:
        a1, a2 = conv
        r1 += sp.diff(u1 * a1, x) + sp.diff(u1 * a2, y)
        r2 += sp.diff(u2 * a1, x) + sp.diff(u2 * a2, y)
    return sp.simplify(r1), sp.simplify(r2), sp.simplify(sp.diff(u1, x) + sp.diff(u2, y))


print("=== Wang flow (a=b=1, lambda=10, nu=1, p=0) ===")
lam = 10
u1 = 2 * y - lam * sp.cos(lam * x) * sp.exp(-lam * y)
u2 = lam * sp.sin(lam * x) * sp.exp(-lam * y)
r1, r2, dv = stokes_residual(u1, u2, sp.Integer(0), sp.Integer(1))
print("momentum residual:", r1, r2, " div:", dv)
print("u(0,0) =", (u1.subs({x: 0, y: 0}), u2.subs({x: 0, y: 0})))

print("=== Kovasznay (Re=100) ===")
Re = 100
lamK = sp.Rational(Re, 2) - sp.sqrt(sp.Rational(Re, 2) ** 2 + 4 * sp.pi**2)
C = (1 + sp.exp(4 * lamK) - (1 / (2 * lamK)) * (1 - sp.exp(4 * lamK))) / 8
print("lambda =", sp.N(lamK, 20))
print("C      =", sp.N(C, 20))
u1 = 1 - sp.exp(2 * lamK * x) * sp.cos((4 * y - 1) * sp.pi)
u2 = (lamK / (2 * sp.pi)) * sp.exp(2 * lamK * x) * sp.sin((4 * y - 1) * sp.pi)
p = -sp.Rational(1, 2) * sp.exp(4 * lamK * x) + C
for nu_try, name in [(sp.Rational(1, Re), "nu=1/Re"), (sp.Rational(1, 2 * Re), "nu=1/(2Re)")]:
    r1, r2, dv = stokes_residual(u1, u2, p, nu_try, conv=(u1, u2))
    pt = {x: sp.Rational(1, 3), y: sp.Rational(2, 7)}
    print(name, "-> residual at sample:", sp.N(r1.subs(pt), 8), sp.N(r2.subs(pt), 8), "div:", sp.simplify(dv))
# sample values for freezing (nu = 1/(2Re) if that is the consistent one)
pt = {x: sp.Rational(1, 4), y: sp.Rational(3, 4)}
print("u(0.25,0.75) =", sp.N(u1.subs(pt), 17), sp.N(u2.subs(pt), 17))
print("p(0.25,0.75) =", sp.N(p.subs(pt), 17))
print("max|u| hint u1(0,1/2) =", sp.N(u1.subs({x: 0, y: sp.Rational(1, 2)}), 17))

print("=== Poiseuille (V=1, nu=1) ===")
V, nu = 1, 1
u1 = 4 * V * y * (1 - y)
u2 = sp.Integer(0)
p = -8 * nu * V * x + 80 * nu * V
r1, r2, dv = stokes_residual(u1, u2, p, nu, conv=(u1, u2))
print("momentum residual:", sp.simplify(r1), sp.simplify(r2), " div:", dv)
print("u(x,1/2) =", u1.subs({y: sp.Rational(1, 2)}), " p(0,.) =", p.subs({x: 0}))
print("p(10,.) =", p.subs({x: 10}))

print("=== Wang Dirichlet-data boundary integral (compatibility) ===")
lam = 10
u1 = 2 * y - lam * sp.cos(lam * x) * sp.exp(-lam * y)
u2 = lam * sp.sin(lam * x) * sp.exp(-lam * y)
# full boundary outward flux must vanish for div-free field
flux = (
    sp.integrate(u1.subs({x: 1}), (y, 0, 1))   # right, n=+x
    - sp.integrate(u1.subs({x: 0}), (y, 0, 1))  # left
    + sp.integrate(u2.subs({y: 1}), (x, 0, 1))  # top
    - sp.integrate(u2.subs({y: 0}), (x, 0, 1))  # bottom
)
print("total boundary flux:", sp.simplify(flux))
