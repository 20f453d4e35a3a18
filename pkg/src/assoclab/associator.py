"""Associators, their defining equations, the twist action and the t-flow.

An associator is a group-like series Phi(X, Y); the pentagon and hexagon
equations are decided inside the tangential automorphism groups of arity 4
and 3, never through a PBW normal form.  The one-parameter family of
associators is produced by integrating d/dt Phi^t = tau^t . Phi^t exactly in
polynomial-in-t arithmetic, degree by degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .ncalg import (LieSeries, NCSeries, is_grouplike, lie_to_nc,
                    lie_coords_from_nc, nc_project_lie)
from .scalars import (Dual, PolyInT, coeff_abs, is_zero, iterated_word_integral,
                      s_one_minus_s_power)
from .tangent import (TAutElem, TDerElem, center_decompose_t3, duplicate_slot,
                      duplicate_slot_aut, exp_tder, log_taut, pad_left,
                      pad_left_aut, pad_right, pad_right_aut, sym_action_aut,
                      t3_embed, taut_compose, taut_distance, taut_inverse,
                      tk_generator)


class AssociatorError(ValueError):
    pass


@dataclass
class Associator:
    """Group-like series in two generators with constant term 1."""

    series: NCSeries
    origin: str = "unspecified"

    def __post_init__(self):
        if self.series.k != 2:
            raise AssociatorError("associators live in two generators")
        if not is_zero(self.series.constant_term() - 1):
            raise AssociatorError("constant term must be 1")

    @property
    def order(self) -> int:
        return self.series.order

    def grouplike_residual(self) -> float:
        return is_grouplike(self.series)

    def lie_log_residual(self) -> float:
        """Distance of log(series) from the free Lie algebra."""
        lg = self.series.log()
        ell = nc_project_lie(lg)
        return lie_to_nc(ell, self.order).distance(lg)

    def log_lie(self) -> LieSeries:
        return nc_project_lie(self.series.log())

    def flip_signs(self) -> "Associator":
        terms = {w: (c if len(w) % 2 == 0 else -c) for w, c in self.series.terms.items()}
        return Associator(self.series.copy_with(terms), origin=f"sign-flip({self.origin})")

    def swap_arguments(self) -> NCSeries:
        swap = {1: 2, 2: 1}
        terms = {}
        for w, c in self.series.terms.items():
            w2 = tuple(swap[a] for a in w)
            terms[w2] = terms.get(w2, 0) + c
        return self.series.copy_with(terms)

    def duality_residual(self) -> float:
        prod = self.series * self.swap_arguments()
        return (prod - NCSeries.unit(2, self.order)).max_abs()

    def to_json(self) -> dict:
        d = self.series.to_json()
        d["kind"] = "associator"
        d["origin"] = self.origin
        return d

    @staticmethod
    def from_json(obj: dict) -> "Associator":
        return Associator(NCSeries.from_json(obj), origin=obj.get("origin", "file"))

    @staticmethod
    def one(order: int) -> "Associator":
        return Associator(NCSeries.unit(2, order), origin="identity")


def to_taut3(phi: Associator, tol: float = 1e-9) -> TAutElem:
    """Realize Phi inside the arity-3 tangential automorphism group."""
    res = phi.lie_log_residual()
    if res > tol:
        raise AssociatorError(f"log is not Lie within tolerance ({res:.3e} > {tol:.1e})")
    ell = phi.log_lie()
    return exp_tder(t3_embed(ell, phi.order))


def check_pentagon(phi: Associator, tol: float = 1e-9) -> float:
    """Extensional residual of the five-term equation in arity 4."""
    g = to_taut3(phi, tol)
    lhs = taut_compose(duplicate_slot_aut(g, 3), duplicate_slot_aut(g, 1))
    rhs = taut_compose(pad_left_aut(g),
                       taut_compose(duplicate_slot_aut(g, 2), pad_right_aut(g)))
    return taut_distance(lhs, rhs)


def strand_permute_aut(g: TAutElem, strands: Sequence[int]) -> TAutElem:
    """Superscript notation: move the element onto the listed strands.

    An element built from the pair generators on strands (1, .., k) is sent
    to the same expression with strand i renamed strands[i-1]; this is the
    symmetric-group action by the inverse of the one-line list.
    """
    inv = [0] * len(strands)
    for pos, s in enumerate(strands, start=1):
        inv[s - 1] = pos
    return sym_action_aut(inv, g)


def check_hexagon(phi: Associator, tol: float = 1e-9) -> float:
    """Extensional residual of the hexagon equation in arity 3."""
    n = phi.order
    g = to_taut3(phi, tol)
    t13 = tk_generator(1, 3, 3, n)
    t23 = tk_generator(2, 3, 3, n)
    half = Fraction(1, 2)
    lhs = exp_tder((t13 + t23).scale(half))
    rhs = taut_compose(
        strand_permute_aut(g, [3, 1, 2]),
        taut_compose(
            exp_tder(t13.scale(half)),
            taut_compose(
                taut_inverse(strand_permute_aut(g, [1, 3, 2])),
                taut_compose(exp_tder(t23.scale(half)), g))))
    return taut_distance(lhs, rhs)


# -- the grt side --------------------------------------------------------------

@dataclass
class GrtElem:
    """Candidate element psi(X, Y) of the associator symmetry Lie algebra.

    Optionally carries the special-derivation avatar it was computed from.
    """

    psi: LieSeries
    pair: "TDerElem | None" = None

    def __post_init__(self):
        if self.psi.k != 2:
            raise AssociatorError("grt elements live in two generators")

    def min_word_length(self) -> int:
        return min((len(w) for w in self.psi.coords), default=0)

    def avatar(self) -> TDerElem:
        return self.pair if self.pair is not None else nu_embedding(self.psi)


def nu_embedding(psi: LieSeries) -> TDerElem:
    """The special-derivation avatar (psi(x,z), psi(y,z)) with z = -x-y."""
    order = psi.order
    nc = lie_to_nc(psi)
    x1 = NCSeries.generator(2, order, 1)
    x2 = NCSeries.generator(2, order, 2)
    z = -(x1 + x2)
    comp1 = nc.substitute({1: x1, 2: z})
    comp2 = nc.substitute({1: x2, 2: z})
    return TDerElem(2, order, (comp1, comp2))


def nu_extract(u: TDerElem) -> LieSeries:
    """Inverse of nu_embedding: psi(x,y) = u_2(-x-y, x)."""
    order = u.order
    x1 = NCSeries.generator(2, order, 1)
    x2 = NCSeries.generator(2, order, 2)
    nc = u.comps[1].substitute({1: -(x1 + x2), 2: x1})
    return lie_coords_from_nc(nc)


def _twisted_group_element(avatar: TDerElem, g3: TAutElem) -> TAutElem:
    """exp(a^{2,3}) exp(a^{1,23}) g exp(-a^{12,3}) exp(-a^{1,2}) in arity 3."""
    w = taut_compose(
        exp_tder(pad_left(avatar)),
        taut_compose(
            exp_tder(duplicate_slot(avatar, 2)),
            taut_compose(
                g3,
                taut_compose(exp_tder(-duplicate_slot(avatar, 1)),
                             exp_tder(-pad_right(avatar))))))
    return w


def twist_by_avatar(avatar: TDerElem, phi: Associator,
                    tol: float = 1e-9) -> Associator:
    """Twist action computed entirely inside the arity-3 automorphism group."""
    w = _twisted_group_element(avatar, to_taut3(phi, tol))
    logw = log_taut(w)
    split = center_decompose_t3(logw, tol)
    if coeff_abs(split.alpha) > tol:
        raise AssociatorError(f"central anomaly {coeff_abs(split.alpha):.3e} in twist result")
    out = lie_to_nc(split.reduced, phi.order).exp()
    return Associator(out, origin=f"twisted({phi.origin})")


def grt_twist_act(f: NCSeries, phi: Associator, tol: float = 1e-9) -> Associator:
    """Act on an associator by a group-like series exp(psi), psi in grt."""
    if not is_zero(f.constant_term() - 1):
        raise AssociatorError("twists need constant term 1")
    psi = nc_project_lie(f.log())
    lowest = min((len(w) for w in psi.coords), default=3)
    if lowest < 2:
        raise AssociatorError("twist log must start in degree >= 2")
    return twist_by_avatar(nu_embedding(psi), phi, tol)


def _lift_dual_aut(g: TAutElem) -> TAutElem:
    lift = lambda c: Dual(c, 0)
    out = TAutElem(g.k, g.order, tuple(c.map_coefficients(lift) for c in g.comps))
    if g._action is not None:
        out._action = tuple(c.map_coefficients(lift) for c in g.action())
    return out


def grt_infinitesimal_act(psi: LieSeries, phi: Associator,
                          tol: float = 1e-9) -> NCSeries:
    """Tangent of the twist action, extracted with dual numbers.

    The group element of the associator is computed over the plain scalar
    ring and only then lifted; the twist factors are exponentials of the
    eps-scaled avatar images, so the whole first-order computation stays
    exact over the dual ring.
    """
    eps = Dual(Fraction(0), Fraction(1))
    psi_eps = psi.scale(eps)
    g3 = _lift_dual_aut(to_taut3(phi, tol))
    w = _twisted_group_element(nu_embedding(psi_eps), g3)
    logw = log_taut(w)
    split = center_decompose_t3(logw, tol)
    if coeff_abs(split.alpha) > tol:
        raise AssociatorError(f"central anomaly {coeff_abs(split.alpha):.3e} in tangent")
    out = lie_to_nc(split.reduced, phi.order).exp()
    return out.map_coefficients(lambda c: c.tangent if isinstance(c, Dual) else 0)


# -- the interpolation flow ----------------------------------------------------

@dataclass
class TauFamily:
    """Odd-degree generators tau_{2j+1}; tau^t = sum (t(1-t))^{2j} tau_{2j+1}."""

    generators: list[tuple[int, LieSeries]] = field(default_factory=list)

    def __post_init__(self):
        for deg, ell in self.generators:
            if deg < 3 or deg % 2 == 0:
                raise AssociatorError("family degrees must be odd and >= 3")
            for w in ell.coords:
                if len(w) != deg:
                    raise AssociatorError(f"generator tagged {deg} has a word of length {len(w)}")

    def lowest_degree(self) -> int:
        return min((d for d, _ in self.generators), default=0)


def interpolate(phi_init: Associator, t0: Fraction, t1: Fraction,
                fam: TauFamily, order: int | None = None,
                tol: float = 1e-9) -> Associator:
    """Solve d/dt Phi^t = tau^t . Phi^t exactly and evaluate at t1.

    Word coefficients of Phi^t are polynomials in t.  The family starts in
    degree 3, so the system is triangular in the word length: the degree-n
    right side only uses lower parts of Phi^t, and one exact polynomial
    integration per degree produces the flow.  The tangent at each degree
    comes from the dual-number twist on the polynomial-coefficient ring.
    """
    order = phi_init.order if order is None else order
    if fam.generators and max(d for d, _ in fam.generators) > order:
        raise AssociatorError("truncation too small for the family degrees")
    if not fam.generators or t0 == t1:
        return Associator(phi_init.series.truncate(order), origin=phi_init.origin)

    tpolys = {deg: s_one_minus_s_power(deg - 1) for deg, _ in fam.generators}
    poly_phi = phi_init.series.truncate(order).map_coefficients(
        lambda c: PolyInT((c,)))

    lowest = fam.lowest_degree()
    for n in range(lowest, order + 1):
        current = Associator(poly_phi + NCSeries.zero(2, order), origin="flow")
        rhs = NCSeries.zero(2, order)
        for deg, ell in fam.generators:
            if deg > n:
                continue
            tangent = grt_infinitesimal_act(ell, current, tol).degree_part(n)
            rhs = rhs + tangent.map_coefficients(lambda c, tp=tpolys[deg]: tp * c)
        increment = rhs.map_coefficients(
            lambda p: (lambda q: q - PolyInT.constant(q(t0)))(p.antiderivative()))
        poly_phi = poly_phi + increment
    value = poly_phi.map_coefficients(lambda p: p(t1) if isinstance(p, PolyInT) else p)
    return Associator(value + NCSeries.zero(2, order),
                      origin=f"interpolated(t={t1})")


def unit_tangent(psi: LieSeries, order: int) -> NCSeries:
    """Tangent of the twist action at the trivial associator (exact)."""
    return grt_infinitesimal_act(psi, Associator.one(order), tol=0.0)


def pin_lambda(phi_kz: Associator, psi3: LieSeries) -> tuple[complex, float]:
    """Normalize tau_3 = lambda * psi3 by matching Phi^1 to the sign flip at degree 3.

    The degree-3 tangent of the flow is independent of the associator, so
    lambda solves a one-dimensional exact linear equation; the returned
    residual measures its consistency across all degree-3 words.
    """
    order = phi_kz.order
    d3 = unit_tangent(psi3, max(3, min(order, 4))).degree_part(3).truncate(order)
    base = s_one_minus_s_power(2).integral(Fraction(0), Fraction(1))  # 1/30
    target = (phi_kz.flip_signs().series - phi_kz.series).degree_part(3)
    best_w, best_mag = None, 0.0
    for w, c in d3.terms.items():
        if coeff_abs(c) > best_mag:
            best_w, best_mag = w, coeff_abs(c)
    if best_w is None:
        raise AssociatorError("degree-3 action vanishes; cannot pin the normalization")
    lam = complex(target.coefficient(best_w)) / (complex(base) * complex(d3.coefficient(best_w)))
    resid = d3.map_coefficients(lambda c: lam * complex(base) * c).distance(
        target.map_coefficients(complex))
    return lam, resid


# -- exact path-ordered exponential coefficients --------------------------------

def pexp_word_coefficient(word: Sequence[int], t0: Fraction, t1: Fraction,
                          half_normalized: bool = True) -> Fraction:
    """Coefficient of an abstract generator word in the flow's ordered exponential.

    ``word`` lists odd degrees, e.g. (3, 5) for the product of the degree-3
    and degree-5 generators, earliest time leftmost.  With ``half_normalized``
    the length-2 values carry the extra 1/2 used for the published product
    coefficients; the raw values satisfy the Chen concatenation identity.
    """
    for d in word:
        if d < 3 or d % 2 == 0:
            raise AssociatorError("word letters must be odd degrees >= 3")
    polys = [s_one_minus_s_power(d - 1) for d in word]
    val = iterated_word_integral(polys, t0, t1)
    if half_normalized and len(word) == 2:
        val = val * Fraction(1, 2)
    return val


def etingof_coefficients() -> tuple[Fraction, Fraction]:
    """The two exact product coefficients that separate the half flows."""
    c_a = pexp_word_coefficient((3, 5), Fraction(0), Fraction(1, 2))
    c_b = pexp_word_coefficient((3, 5), Fraction(1, 2), Fraction(1))
    return c_a, c_b
