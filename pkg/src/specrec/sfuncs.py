"""The sinh-kernel series S(ζ) = (e^{ζ/2} - e^{-ζ/2})/ζ and formal shift
operators S(scale·∂_θ) acting on series and polynomials."""

from __future__ import annotations

from .mseries import MSeries
from .poly import Poly
from .rationals import Rat
from .series import LSeries


def sinhc_coeff(j: int):
    """Coefficient of ζ^(2j) in S(ζ): 1 / (4^j (2j+1)!)."""
    fact = 1
    for i in range(2, 2 * j + 2):
        fact *= i
    return Rat(1, 4 ** j * fact)


def sinhc_series(order: int) -> LSeries:
    """S(ζ) truncated at ζ^order (inclusive); S is even with S(0)=1."""
    if order < 1:
        order = 0
    coeffs = []
    for k in range(order + 1):
        coeffs.append(sinhc_coeff(k // 2) if k % 2 == 0 else Rat(0))
    return LSeries(0, coeffs, order)


def sinhc_of(arg: MSeries, order: int) -> MSeries:
    """S evaluated on a nilpotent-in-windows argument (e.g. ħ·u)."""
    acc = MSeries.const(Rat(1), arg.vars, arg.windows)
    power = MSeries.const(Rat(1), arg.vars, arg.windows)
    j = 1
    while True:
        power = power * arg * arg
        if not power.terms or 2 * j > order:
            break
        acc = acc + power.scale(sinhc_coeff(j))
        j += 1
    return acc


def theta_derivative(ms: MSeries, var: str, order: int = 1) -> MSeries:
    """∂_var^order on a multivariate series (exponents shift down)."""
    i = ms.vars.index(var)
    lo, hi = ms.window(var)
    out = {}
    for e, c in ms.terms.items():
        k = e[i]
        if k < order:
            continue
        f = 1
        for j in range(order):
            f *= (k - j)
        ee = list(e)
        ee[i] = k - order
        out[tuple(ee)] = c * f
    win = list(ms.windows)
    win[i] = (max(lo - order, 0) if lo >= 0 else lo - order,
              None if hi is None else hi - order)
    return MSeries(ms.vars, tuple(win), out)


def apply_shift_series(op: LSeries, scale: MSeries, target: MSeries, theta_var: str) -> MSeries:
    """Apply op(scale·∂_θ) to target: Σ_j op[j]·scale^j·∂_θ^j target.

    op is a series in one formal slot (ζ); scale is typically a monomial like
    ħ or v·ħ.  Division by such an operator is done by passing op.inverse().
    """
    if op.lo < 0:
        raise ValueError("operator series must have no negative part")
    acc = None
    power = MSeries.const(Rat(1), scale.vars, scale.windows)
    hi = op.hi if op.hi is not None else (len(op.coeffs) + op.lo - 1)
    for j in range(hi + 1):
        c = op[j]
        if j > 0:
            power = power * scale
            if not power.terms:
                break
        if not c:
            continue
        term = theta_derivative(target, theta_var, j) * power
        term = term.scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        acc = MSeries.zero(target.vars, target.windows)
    return acc


def poly_as_mseries(p: Poly, var: str, hi=None) -> MSeries:
    return MSeries((var,), ((0, hi),), {(k,): c for k, c in enumerate(p.coeffs) if c})
