"""Exact transformations between 1/pi series formulas.

A Formula packages one identity  sum_n K_n (lin0 + lin1*n) arg**n = rhs/pi,
where K_n are the coefficients of its family.  The transforms map a
hypergeometric-family formula to the rebalanced, binomial-product,
squared-binomial, or squared-Gauss families, and the hat transform maps
a squared-Gauss formula at w0 to its companion at w1 = 1 - w0.  All
outputs are exact SurdExpr values; every transform also admits a formal
power-series witness identity, checked to a finite order.

Argument storage convention: hypergeometric-family (HYP) and rebalanced
(PROP1) formulas store the rescaled argument (the variable in which the
family's terms carry M**n); the other families store their argument
directly.  Transforms that are stated in the unscaled variable multiply
by M internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .families import FamilySpec, family_rate, generating_series
from .series import TruncSeries, compose, hyp3f2, pow_rational, theta
from .surd import ONE, SurdExpr, sqrt_denest

__all__ = [
    "TransformError",
    "PoleAtArgument",
    "MissingTau",
    "DivergentCompanion",
    "Formula",
    "SIN_PI_S_SQUARED_X4",
    "is_convergent",
    "prop1_transform",
    "prop4_transform",
    "prop5_transform",
    "prop7_transform",
    "appendix_hat_transform",
    "same_normalized_row",
    "transform_series_witness",
]

F = Fraction
HALF = F(1, 2)


class TransformError(Exception):
    """Base class for transform errors."""


class PoleAtArgument(TransformError):
    """A denominator in the transform vanishes at this argument."""


class MissingTau(TransformError):
    """The hat transform needs tau0_im_sq on its input formula."""


class DivergentCompanion(TransformError):
    """The companion series argument w1 does not satisfy |w1| < 1."""


def _as_surd(v: Union[SurdExpr, Fraction, int]) -> SurdExpr:
    if isinstance(v, SurdExpr):
        return v
    return SurdExpr.rational(Fraction(v))


# 4*sin(pi*s)**2 is rational for the supported s; 1/C_s**2 equals it.
SIN_PI_S_SQUARED_X4 = {
    F(1, 2): F(4),
    F(1, 3): F(3),
    F(1, 4): F(2),
    F(1, 6): F(1),
}


@dataclass(frozen=True)
class Formula:
    """One exact series-for-1/pi identity."""

    id: str
    s: Fraction
    family: FamilySpec
    arg: SurdExpr
    lin0: SurdExpr
    lin1: SurdExpr
    rhs: SurdExpr
    tau0_im_sq: Optional[Fraction] = None
    convergent: bool = True
    provenance: str = ""
    notes: str = ""
    raw: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", Fraction(self.s))
        if self.s != self.family.s:
            raise ValueError(f"formula s={self.s} disagrees with family s={self.family.s}")
        for name in ("arg", "lin0", "lin1", "rhs"):
            object.__setattr__(self, name, _as_surd(getattr(self, name)))
        if self.rhs.is_zero:
            raise ValueError("rhs must be nonzero")
        if self.tau0_im_sq is not None:
            tau = Fraction(self.tau0_im_sq)
            if tau <= 0:
                raise ValueError("tau0_im_sq must be positive")
            object.__setattr__(self, "tau0_im_sq", tau)


def is_convergent(family: FamilySpec, arg: SurdExpr) -> bool:
    """Strict geometric convergence test |rate * arg| < 1, where rate is
    the family's coefficient growth rate.  Boundary cases count as not
    convergent: the numeric evaluator only certifies geometric tails."""
    scaled = arg * family_rate(family)
    return abs(scaled) < 1


def _derived(src: Formula, suffix: str, family: FamilySpec, arg, lin0, lin1, rhs) -> Formula:
    return Formula(
        id=f"{src.id}#{suffix}",
        s=src.s,
        family=family,
        arg=arg,
        lin0=lin0,
        lin1=lin1,
        rhs=rhs,
        tau0_im_sq=src.tau0_im_sq,
        convergent=is_convergent(family, _as_surd(arg)),
        provenance=f"transformed from {src.id}",
        notes="",
    )


def _require_kind(f: Formula, kind: str, op: str) -> None:
    if f.family.kind != kind:
        raise ValueError(f"{op} expects a {kind}-family formula, got {f.family.kind}")


# ---------------------------------------------------------------------------
# The four family transforms.
# ---------------------------------------------------------------------------


def prop1_transform(f: Formula) -> Formula:
    """Rebalance: w0 = -x0/(1-M*x0), A = {b*M*x0/2 + a(1-M*x0)} (1-M*x0)^(-3/2),
    B = b (1-M*x0)^(-3/2); rhs carried over unchanged."""
    _require_kind(f, "HYP", "prop1_transform")
    M = f.family.M
    x0 = f.arg
    den = ONE - x0 * M
    if den.is_zero:
        raise PoleAtArgument("1 - M*x0 vanishes")
    root = sqrt_denest(den)  # NegativeRadicand / NotDenestable propagate
    inv32 = (den * root).inverse()
    w0 = -x0 / den
    A = (f.lin1 * (F(M) * HALF) * x0 + f.lin0 * den) * inv32
    B = f.lin1 * inv32
    out_family = FamilySpec("PROP1", f.s)
    return _derived(f, "p1", out_family, w0, A, B, f.rhs)


def _poch_argument(f: Formula) -> SurdExpr:
    """The unscaled argument of a HYP formula (terms without M**n)."""
    return f.arg * f.family.M


def prop4_transform(f: Formula, sign: Union[str, int]) -> Formula:
    """To the binomial-product family: w0 = (-x0 +- sqrt(x0**2-x0))/2,
    A = sqrt(1+4w0) {a + b*w0/(1+2w0)}, B = b (1+4w0)^(3/2) / (2(1+2w0)),
    with x0 the unscaled argument."""
    _require_kind(f, "HYP", "prop4_transform")
    if sign in ("+", 1):
        sgn = 1
    elif sign in ("-", -1):
        sgn = -1
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    x0 = _poch_argument(f)
    root = sqrt_denest(x0 * x0 - x0)  # NegativeRadicand when 0 < x0 < 1
    w0 = (-x0 + root * sgn) * HALF
    den2 = ONE + w0 * 2
    if den2.is_zero:
        raise PoleAtArgument("1 + 2*w0 vanishes")
    quad = ONE + w0 * 4
    quad_root = sqrt_denest(quad)
    A = quad_root * (f.lin0 + f.lin1 * w0 / den2)
    B = f.lin1 * quad * quad_root / (den2 * 2)
    out_family = FamilySpec("PROP3", f.s)
    return _derived(f, "p4+" if sgn > 0 else "p4-", out_family, w0, A, B, f.rhs)


def prop5_transform(f: Formula) -> Formula:
    """To the squared-binomial family: w0 = 1 - (2/x0)(1 - sqrt(1-x0)),
    A = (1-w0)(a - b*w0/(1+w0)), B = b (1-w0)**2/(1+w0), with x0 the
    unscaled argument."""
    _require_kind(f, "HYP", "prop5_transform")
    x0 = _poch_argument(f)
    if x0.is_zero:
        raise PoleAtArgument("x0 = 0 has no transform")
    root = sqrt_denest(ONE - x0)
    w0 = ONE - (ONE - root) * 2 / x0
    den = ONE + w0
    if den.is_zero:
        raise PoleAtArgument("1 + w0 vanishes")
    om = ONE - w0
    A = om * (f.lin0 - f.lin1 * w0 / den)
    B = f.lin1 * om * om / den
    out_family = FamilySpec("PROP5", f.s)
    return _derived(f, "p5", out_family, w0, A, B, f.rhs)


def prop7_transform(f: Formula) -> Formula:
    """To the squared-Gauss family: w0 = (1 - sqrt(1-x0))/2, A = a,
    B = b (1-w0)/(1-2w0), with x0 the unscaled argument."""
    _require_kind(f, "HYP", "prop7_transform")
    x0 = _poch_argument(f)
    om = ONE - x0
    if om.is_zero:
        raise PoleAtArgument("x0 = 1 puts w0 at the branch point 1/2")
    root = sqrt_denest(om)  # NegativeRadicand when x0 > 1
    w0 = (ONE - root) * HALF
    B = f.lin1 * (ONE - w0) / root  # 1 - 2*w0 = sqrt(1-x0)
    out_family = FamilySpec("PROP7", f.s)
    return _derived(f, "p7", out_family, w0, f.lin0, B, f.rhs)


def appendix_hat_transform(f: Formula) -> Formula:
    """Companion at w1 = 1-w0:  A^ = A,  B^ = -B w0/w1,
    C^ = C (tau0/i)**2 / C_s**2 - B (tau0/i)/(C_s**2 w1),
    with C_s = 1/(2 sin(pi*s)) so 1/C_s**2 = 4 sin(pi*s)**2 rational."""
    _require_kind(f, "PROP7", "appendix_hat_transform")
    if f.tau0_im_sq is None:
        raise MissingTau(f"formula {f.id} carries no tau0_im_sq")
    w0 = f.arg
    w1 = ONE - w0
    if not abs(w1) < 1:
        raise DivergentCompanion(f"|w1| >= 1 for formula {f.id}")
    y = sqrt_denest(_as_surd(f.tau0_im_sq))  # tau0/i
    inv_cs2 = SIN_PI_S_SQUARED_X4[f.s]
    B_hat = -(f.lin1 * w0 / w1)
    C_hat = f.rhs * Fraction(f.tau0_im_sq) * inv_cs2 - f.lin1 * y * inv_cs2 / w1
    return _derived(f, "hat", f.family, w1, f.lin0, B_hat, C_hat)


# ---------------------------------------------------------------------------
# Row comparison.
# ---------------------------------------------------------------------------


def same_normalized_row(f: Formula, g: Formula) -> bool:
    """Whether two formulas assert the same identity up to overall
    scaling: equal family and argument, and equal lin0/rhs and lin1/rhs
    (compared by cross-multiplication, so no division is needed)."""
    if f.family != g.family:
        return False
    if f.arg != g.arg:
        return False
    return f.lin0 * g.rhs == g.lin0 * f.rhs and f.lin1 * g.rhs == g.lin1 * f.rhs


# ---------------------------------------------------------------------------
# Formal series witnesses: each transform's defining identity, checked in
# the truncated ring with SurdExpr coefficients.
# ---------------------------------------------------------------------------


def _geometric(order: int, ratio) -> TruncSeries:
    c = F(1)
    coeffs = []
    for _ in range(order + 1):
        coeffs.append(c)
        c *= ratio
    return TruncSeries(coeffs)


def _linear_poly(c0, c1, order: int) -> TruncSeries:
    coeffs = [c0, c1] + [F(0)] * (order - 1)
    return TruncSeries(coeffs[: order + 1])


def _weighted(gf: TruncSeries, lin0: SurdExpr, lin1: SurdExpr) -> TruncSeries:
    """sum K_n (lin0 + lin1*n) x**n from gf = sum K_n x**n."""
    return gf.scale(lin0) + theta(gf).scale(lin1)


def transform_series_witness(f: Formula, which: str, order: int = 20) -> bool:
    """Check, as an identity of formal power series with exact surd
    coefficients, that the weighted source series equals the weighted
    transformed series composed through the substitution — the content
    of each transform's proof.  `which` selects the transform: '1', '4',
    '5', or '7'.

    The identity is linear in the weights (lin0, lin1), so this witness
    pins down the substitution and the derivative factor, not the
    weights themselves; those are checked separately by exact table
    reproduction and by numeric evaluation of the finished formula."""
    _require_kind(f, "HYP", "transform_series_witness")
    s, a, b = f.s, f.lin0, f.lin1
    M = f.family.M
    if which == "1":
        gf = generating_series(f.family, order)
        lhs = _weighted(gf, a, b)
        gf1 = generating_series(FamilySpec("PROP1", s), order)
        u = _geometric(order, F(M)).shift_mul(1, -1)  # -x/(1-Mx)
        inv32 = pow_rational(_linear_poly(F(1), F(-M), order), F(-3, 2))
        A_x = _linear_poly(a, b * F(M, 2) - a * M, order) * inv32
        B_x = inv32.scale(b)
        rhs = A_x * compose(gf1, u) + B_x * compose(theta(gf1), u)
        return lhs == rhs
    src = hyp3f2(HALF, s, 1 - s, 1, 1, order + 1)
    weighted_src = _weighted(src, a, b)
    if which == "4":
        # Witness in the w variable: x(w) = -4w**2/(1+4w).
        xw = _geometric(order + 1, F(-4)).shift_mul(2, -4)
        lhs = compose(weighted_src, xw)
        gf3 = generating_series(FamilySpec("PROP3", s), order + 1)
        quad = _linear_poly(F(1), F(4), order + 1)
        quad_root = pow_rational(quad, HALF)
        w_over = _geometric(order + 1, F(-2)).shift_mul(1, 1)  # w/(1+2w)
        A_w = quad_root * (w_over.scale(b).add_constant(a))
        B_w = (quad * quad_root * _geometric(order + 1, F(-2))).scale(b * HALF)
        rhs = A_w * gf3 + B_w * theta(gf3)
        return lhs.truncate(order) == rhs.truncate(order)
    if which == "5":
        n1 = order + 1
        sq = pow_rational(_linear_poly(F(1), F(-1), n1), HALF)
        t = TruncSeries.one(n1) - sq  # (1-sqrt(1-x)), zero constant
        t_down = TruncSeries(t.coeffs[1:])  # divide by x, order n1-1 = order
        w = TruncSeries.one(order) - t_down.scale(F(2))
        gf5 = generating_series(FamilySpec("PROP5", s), order)
        om = TruncSeries.one(order) - w
        den = TruncSeries.one(order) + w
        A_x = om * (TruncSeries.constant(a, order) - (w.scale(b)) / den)
        B_x = (om * om / den).scale(b)
        rhs = A_x * compose(gf5, w) + B_x * compose(theta(gf5), w)
        return weighted_src.truncate(order) == rhs
    if which == "7":
        sq = pow_rational(_linear_poly(F(1), F(-1), order + 1), HALF).truncate(order)
        w = (TruncSeries.one(order) - sq).scale(HALF)
        gf7 = generating_series(FamilySpec("PROP7", s), order)
        om = TruncSeries.one(order) - w
        B_x = (om / sq).scale(b)
        rhs = compose(gf7, w).scale(a) + B_x * compose(theta(gf7), w)
        return weighted_src.truncate(order) == rhs
    raise ValueError(f"unknown transform key {which!r}")
