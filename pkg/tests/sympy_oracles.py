"""Independent sympy computations used to cross-check the package."""

import itertools

import sympy as sp


def _expr(poly, names):
    return sp.sympify(str(poly).replace("^", "**"), locals={v: sp.Symbol(v) for v in names})


def affine_colength(gens, symbols):
    """Number of standard monomials of a zero-dimensional ideal (None if not zero-dimensional)."""
    G = sp.groebner([g for g in gens if g != 0], *symbols, order="grevlex", domain=sp.QQ)
    if list(G.exprs) == [1]:
        return 0
    lead = [sp.Poly(g, *symbols).monoms(order="grevlex")[0] for g in G.exprs]
    bounds = []
    for i in range(len(symbols)):
        pure = [m[i] for m in lead if all(e == 0 for j, e in enumerate(m) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    return sum(1 for m in itertools.product(*(range(b) for b in bounds))
               if not any(all(a >= b for a, b in zip(m, l)) for l in lead))


def _restricted(F, M):
    names = F.ring.names
    xs = [sp.Symbol(v) for v in names]
    y = sp.symbols("y0 y1 y2")
    images = [sum(M[i][j] * y[j] for j in range(3)) for i in range(len(xs))]
    coeffs = [_expr(A, names).subs(dict(zip(xs, images)), simultaneous=True) for A in F.coefficients()]
    return y, coeffs


def deg_z2_oracle(F, M):
    """Length of Z ∩ L on the chart y2 = 1 of the plane x = M y."""
    y, coeffs = _restricted(F, M)
    return affine_colength([sp.expand(c.subs(y[2], 1)) for c in coeffs], y[:2])


def delta_oracle(F, M):
    """Length of the scheme cut out by the coefficients of w|L and d(w|L), chart y2 = 1."""
    y, coeffs = _restricted(F, M)
    w = [sp.expand(sum(coeffs[i] * M[i][j] for i in range(len(coeffs)))) for j in range(3)]
    dw = [sp.expand(sp.diff(w[b], y[a]) - sp.diff(w[a], y[b])) for a, b in ((0, 1), (0, 2), (1, 2))]
    return affine_colength([sp.expand(c.subs(y[2], 1)) for c in w + dw], y[:2])
