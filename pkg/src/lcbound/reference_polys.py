"""Reference polynomials that the certificates reproduce coefficient-for-coefficient.

Each constant is written exactly as displayed in the source derivation, so a
single typo here turns the matching certificate red.  Bivariate entries use
the variable pair ``("u", "h")``: ``u`` is the location of the density's peak
and ``h = delta - u``.  The linear-in-delta gap polynomial uses ``("u", "d")``.
"""

from __future__ import annotations

from fractions import Fraction

from .poly_exact import BiPoly, Poly

UH = ("u", "h")
UD = ("u", "d")


def _bi(terms: dict, vars=UH) -> BiPoly:
    return BiPoly(terms, vars)


def _uni(coeffs_high_first: list, var: str) -> Poly:
    return Poly(list(reversed(coeffs_high_first)), var)


_u = BiPoly.var("u", UH)
_h = BiPoly.var("h", UH)

# Cleared gap on the first branch of the shifted bound, quadratic in h.
D1 = (
    419 * (1 - 4 * _u) ** 3 * _h**2
    - 2 * _u * (13408 * _u**3 - 6856 * _u**2 + 114 * _u + 181) * _h
    + 419 * _u**2
)

# Factors of disc_h(D1): 16 u^2 * D1_DISC_QUADRATIC * D1_DISC_QUARTIC.
D1_DISC_QUADRATIC = _uni([16, -12, 3], "u")
D1_DISC_QUARTIC = _uni([2808976, -765932, -318917, 131400, -11900], "u")
D1_DISC = Poly([0, 0, 16], "u") * D1_DISC_QUADRATIC * D1_DISC_QUARTIC

# Cubic whose sign controls the vertex of D1 for u in [24/100, 1/4).
D1_VERTEX_CUBIC = _uni([13408, -6856, 114, 181], "u")
D1_DISC_CUTOFF = Fraction(24, 100)

# Cleared gap on the middle branch, cubic in h.
D2 = (
    27 * _h**3 * (419 * _u - 100)
    + 3771 * _h**2 * (3 * _u**2 - 1024 * _u + 256)
    - 256 * _h * (15084 * _u**2 - 171 * _u + 12508)
    - 8192 * (419 * _u + 100)
)

D21 = (
    11313 * _h**3 + 22626 * _h**2 * _u - 3861504 * _h**2 - 7723008 * _h * _u
    + 43776 * _h - 3432448
)

D22 = (
    33939 * _h**2 * _u - 8100 * _h**2 + 22626 * _h * _u**2 - 7723008 * _h * _u
    + 1930752 * _h - 3861504 * _u**2 + 43776 * _u - 3202048
)

# res_u(D21, D22) and res_h(D21, D22), up to a nonzero rational factor.
R1 = _uni(
    [
        -383951907, 360127950804, -111582387392256, 11376013014678528,
        7495868032745472, -5874950492651520, 17672548909056, -3016115013812224,
    ],
    "h",
)
R2 = _uni(
    [
        -1807585595653280832, -847701988664287064715, -78523365776753581860762,
        44892310928843299875696, 43252111127403174064608, -35398357322310505259136,
        29165745137518115033088, -5192266514139579318272,
    ],
    "u",
)

# Decimal roots quoted alongside R1 (roots above 16/3) and R2 (root in (0, 1/4)).
R1_ROOTS_QUOTED = ("255.934", "341.325", "341.342")
R2_ROOT_QUOTED = "0.218271"
CRITICAL_VALUE_FLOOR = 3 * 10**9

# Specialisations of D2 on the boundary of its domain.
D2_AT_U0 = 4 * _uni([-675, 241344, -800512, -204800], "h")
D2_AT_R1_FACTOR = Fraction(-4096, 27)
D2_AT_R1_QUARTIC = _uni([1448064, -725364, -2565795, 1302526, -159896], "u")
D2_AT_R2_FACTOR = Fraction(-256, 3)
D2_AT_R2_QUARTIC = _uni([1287168, -643092, -1709051, 875488, -107264], "u")

_uu = BiPoly.var("u", UD)
_d = BiPoly.var("d", UD)

# Cleared gap on the third branch, linear in delta (variable "d").
D3_SLOPE = _uni([40224, -19693, 2414], "u")
D3_INTERCEPT = 100 * _uni([96, -47, 6], "u")
D3 = (40224 * _uu**2 - 19693 * _uu + 2414) * _d + 100 * (96 * _uu**2 - 47 * _uu + 6)

# Second derivative of the middle branch of p1/p: RATIO_D2_SCALE * q(d) / d^5,
# with q(d) = 3 c d^2 + (9 - 32 c) d - 64.
RATIO_D2_SCALE = Fraction(512, 9)


def ratio_concavity_quadratic(c: Fraction) -> Poly:
    return Poly([-64, 9 - 32 * c, 3 * c], "d")


ALL = {
    "D1": D1,
    "D1_DISC": D1_DISC,
    "D2": D2,
    "D21": D21,
    "D22": D22,
    "R1": R1,
    "R2": R2,
    "D2_AT_U0": D2_AT_U0,
    "D2_AT_R1_QUARTIC": D2_AT_R1_QUARTIC,
    "D2_AT_R2_QUARTIC": D2_AT_R2_QUARTIC,
    "D3": D3,
}
