"""Tangential derivations and automorphisms of free Lie algebras.

A tangential derivation of the free Lie algebra on X_1..X_k acts by
``u(X_i) = [X_i, u_i]`` and is stored as the k-tuple of its components
(normalized so that u_i has no X_i term).  The pro-unipotent group
integrating them is realized by tuples of group-like series ``g_i`` acting
as ``X_i -> g_i^{-1} X_i g_i``; group elements are compared extensionally,
by their action on the generators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .ncalg import (LieSeries, NCSeries, SeriesError, lie_coords_from_nc,
                    lie_to_nc, lyndon_words, bracketing_of)
from .scalars import coeff_abs, is_zero


class ArityError(ValueError):
    pass


def _strip_gauge(comps: Sequence[NCSeries]) -> tuple[NCSeries, ...]:
    out = []
    for i, c in enumerate(comps, start=1):
        t = dict(c.terms)
        t.pop((i,), None)
        out.append(c.copy_with(t))
    return tuple(out)


class TDerElem:
    """Tangential derivation, components as NC series that are Lie elements."""

    __slots__ = ("k", "order", "comps")

    def __init__(self, k: int, order: int, comps: Sequence[NCSeries], gauge: bool = True):
        if len(comps) != k:
            raise ArityError(f"expected {k} components, got {len(comps)}")
        for c in comps:
            if c.k != k or c.order != order:
                raise ArityError("component alphabet/truncation mismatch")
        self.k = k
        self.order = order
        self.comps = _strip_gauge(comps) if gauge else tuple(comps)

    @staticmethod
    def zero(k: int, order: int) -> "TDerElem":
        return TDerElem(k, order, tuple(NCSeries.zero(k, order) for _ in range(k)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def max_abs(self) -> float:
        return max((c.max_abs() for c in self.comps), default=0.0)

    def __add__(self, other: "TDerElem") -> "TDerElem":
        self._check(other)
        return TDerElem(self.k, self.order,
                        tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __neg__(self):
        return TDerElem(self.k, self.order, tuple(-c for c in self.comps))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TDerElem":
        return TDerElem(self.k, self.order, tuple(x.scale(c) for x in self.comps))

    def map_coefficients(self, f) -> "TDerElem":
        return TDerElem(self.k, self.order,
                        tuple(x.map_coefficients(f) for x in self.comps), gauge=False)

    def _check(self, other: "TDerElem"):
        if self.k != other.k or self.order != other.order:
            raise ArityError("arity/truncation mismatch")

    def __eq__(self, other):
        if not isinstance(other, TDerElem):
            return NotImplemented
        return self.k == other.k and all(a == b for a, b in zip(self.comps, other.comps))

    def __hash__(self):  # pragma: no cover
        return hash((self.k, self.order, self.comps))

    def distance(self, other: "TDerElem") -> float:
        self._check(other)
        return max(a.distance(b) for a, b in zip(self.comps, other.comps))

    def apply_nc(self, s: NCSeries) -> NCSeries:
        """Extend the derivation by Leibniz to the free associative algebra."""
        out = NCSeries.zero(self.k, self.order)
        images = [NCSeries.generator(self.k, self.order, i + 1).bracket(self.comps[i])
                  for i in range(self.k)]
        for w, c in s.terms.items():
            for j, a in enumerate(w):
                img = images[a - 1]
                if img.is_zero():
                    continue
                left = NCSeries(self.k, self.order, {w[:j]: 1})
                right = NCSeries(self.k, self.order, {w[j + 1:]: 1})
                out = out + (left * img * right).scale(c)
        return out

    def apply_lie(self, ell: LieSeries) -> LieSeries:
        return lie_coords_from_nc(self.apply_nc(lie_to_nc(ell)))

    def to_json(self) -> dict:
        return {"arity": self.k, "order": self.order,
                "components": [c.to_json() for c in self.comps]}

    def __repr__(self):
        return f"TDerElem(k={self.k}, N={self.order}, comps={list(self.comps)!r})"


def tk_generator(i: int, j: int, k: int, order: int) -> TDerElem:
    """The arity-k tangential derivation with X_j in slot i and X_i in slot j."""
    if not (1 <= i <= k and 1 <= j <= k) or i == j:
        raise ArityError(f"bad generator indices ({i},{j}) for arity {k}")
    comps = [NCSeries.zero(k, order) for _ in range(k)]
    comps[i - 1] = NCSeries.generator(k, order, j, Fraction(1))
    comps[j - 1] = NCSeries.generator(k, order, i, Fraction(1))
    return TDerElem(k, order, comps)


def center_element(k: int, order: int) -> TDerElem:
    """Sum of all pair generators; central in their span."""
    out = TDerElem.zero(k, order)
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            out = out + tk_generator(i, j, k, order)
    return out


def tder_bracket(u: TDerElem, v: TDerElem) -> TDerElem:
    u._check(v)
    comps = []
    for i in range(u.k):
        comps.append(u.apply_nc(v.comps[i]) - v.apply_nc(u.comps[i])
                     + u.comps[i].bracket(v.comps[i]))
    return TDerElem(u.k, u.order, comps)


def is_sder(u: TDerElem, tol: float = 0.0) -> bool:
    acc = NCSeries.zero(u.k, u.order)
    for i in range(u.k):
        acc = acc + NCSeries.generator(u.k, u.order, i + 1).bracket(u.comps[i])
    return acc.max_abs() <= tol


def tder_apply(u: TDerElem, ell: LieSeries) -> LieSeries:
    return u.apply_lie(ell)


# -- substitution helpers ------------------------------------------------------

def _relabel_series(s: NCSeries, k_new: int, order: int, letter_map: Mapping[int, int]) -> NCSeries:
    terms = {}
    for w, c in s.terms.items():
        w2 = tuple(letter_map[a] for a in w)
        terms[w2] = terms.get(w2, 0) + c
    return NCSeries(k_new, order, terms)


def _split_letter_series(s: NCSeries, k_new: int, order: int, i: int) -> NCSeries:
    """Substitute X_i -> X_i + X_{i+1} and shift letters above i up by one."""
    terms: dict[tuple[int, ...], object] = {}
    for w, c in s.terms.items():
        expansions = [()]
        for a in w:
            if a < i:
                expansions = [e + (a,) for e in expansions]
            elif a == i:
                expansions = [e + (b,) for e in expansions for b in (i, i + 1)]
            else:
                expansions = [e + (a + 1,) for e in expansions]
        for w2 in expansions:
            terms[w2] = terms.get(w2, 0) + c
    return NCSeries(k_new, order, terms)


def pad_right(u: TDerElem) -> TDerElem:
    """Simplicial map keeping slots 1..k and appending an untouched slot."""
    k2 = u.k + 1
    ident = {a: a for a in range(1, u.k + 1)}
    comps = [_relabel_series(c, k2, u.order, ident) for c in u.comps]
    comps.append(NCSeries.zero(k2, u.order))
    return TDerElem(k2, u.order, comps)


def pad_left(u: TDerElem) -> TDerElem:
    """Simplicial map shifting everything to slots 2..k+1."""
    k2 = u.k + 1
    shift = {a: a + 1 for a in range(1, u.k + 1)}
    comps = [NCSeries.zero(k2, u.order)]
    comps.extend(_relabel_series(c, k2, u.order, shift) for c in u.comps)
    return TDerElem(k2, u.order, comps)


def duplicate_slot(u: TDerElem, i: int) -> TDerElem:
    """Coproduct map doubling slot i (components get X_i -> X_i + X_{i+1})."""
    if not (1 <= i <= u.k):
        raise ArityError(f"slot {i} out of range for arity {u.k}")
    k2 = u.k + 1
    subs = [_split_letter_series(c, k2, u.order, i) for c in u.comps]
    comps = subs[:i] + [subs[i - 1]] + subs[i:]
    return TDerElem(k2, u.order, comps)


def sym_action(sigma: Sequence[int], u: TDerElem) -> TDerElem:
    """Right action of a permutation sigma (1-based image list) on tder."""
    inv = {sigma[j - 1]: j for j in range(1, u.k + 1)}
    comps = [_relabel_series(u.comps[sigma[i - 1] - 1], u.k, u.order, inv)
             for i in range(1, u.k + 1)]
    return TDerElem(u.k, u.order, comps)


# -- tangential automorphisms --------------------------------------------------

def substitute_many(images: Sequence[NCSeries], series_list: Sequence[NCSeries]) -> list[NCSeries]:
    """Apply the algebra endomorphism X_i -> images[i-1] to several series.

    Prefix products are shared across all inputs through one trie walk,
    which is what makes group computations at desk scale affordable.
    """
    if not images:
        return [s for s in series_list]
    k, order = images[0].k, images[0].order
    prefix_cache: dict[tuple[int, ...], NCSeries] = {(): NCSeries.unit(k, order)}

    def product_for(w):
        got = prefix_cache.get(w)
        if got is not None:
            return got
        p = product_for(w[:-1]) * images[w[-1] - 1]
        prefix_cache[w] = p
        return p

    out = []
    for s in series_list:
        acc = NCSeries.zero(k, order)
        for w, c in sorted(s.terms.items()):
            acc = acc + product_for(w).scale(c)
        out.append(acc)
    return out


class TAutElem:
    """Tangential automorphism as a tuple of group-like series."""

    __slots__ = ("k", "order", "comps", "_action")

    def __init__(self, k: int, order: int, comps: Sequence[NCSeries]):
        if len(comps) != k:
            raise ArityError(f"expected {k} components, got {len(comps)}")
        self.k = k
        self.order = order
        self.comps = tuple(comps)
        self._action: tuple[NCSeries, ...] | None = None

    @staticmethod
    def identity(k: int, order: int) -> "TAutElem":
        return TAutElem(k, order, tuple(NCSeries.unit(k, order) for _ in range(k)))

    def _check(self, other: "TAutElem"):
        if self.k != other.k or self.order != other.order:
            raise ArityError("arity/truncation mismatch")

    def action(self) -> tuple[NCSeries, ...]:
        """Images of the generators, X_i -> g_i^{-1} X_i g_i."""
        if self._action is None:
            imgs = []
            for i, g in enumerate(self.comps, start=1):
                gi = g.inverse()
                imgs.append(gi * NCSeries.generator(self.k, self.order, i) * g)
            self._action = tuple(imgs)
        return self._action

    def apply(self, s: NCSeries) -> NCSeries:
        return substitute_many(self.action(), [s])[0]

    def apply_many(self, series: Sequence[NCSeries]) -> list[NCSeries]:
        return substitute_many(self.action(), series)

    def to_json(self) -> dict:
        return {"arity": self.k, "order": self.order,
                "components": [c.to_json() for c in self.comps]}

    def __repr__(self):
        return f"TAutElem(k={self.k}, N={self.order})"


def taut_compose(g: TAutElem, h: TAutElem) -> TAutElem:
    """Composition g then h read as automorphisms: (g o h)(x) = g(h(x))."""
    g._check(h)
    gh = g.apply_many(list(h.comps))
    comps = tuple(g.comps[i] * gh[i] for i in range(g.k))
    out = TAutElem(g.k, g.order, comps)
    return out


def inverse_action(g: TAutElem) -> tuple[NCSeries, ...]:
    """Generator images of g^{-1}, solved degree by degree."""
    k, order = g.k, g.order
    gens = [NCSeries.generator(k, order, i) for i in range(1, k + 1)]
    sol = list(gens)
    for _ in range(order):
        applied = g.apply_many(sol)
        sol = [sol[i] - (applied[i] - gens[i]) for i in range(k)]
    return tuple(sol)


def taut_inverse(g: TAutElem) -> TAutElem:
    inv_imgs = inverse_action(g)
    comps = substitute_many(inv_imgs, [c.inverse() for c in g.comps])
    out = TAutElem(g.k, g.order, tuple(comps))
    out._action = inv_imgs
    return out


def taut_distance(g: TAutElem, h: TAutElem) -> float:
    """Extensional distance: compare the actions on all generators."""
    g._check(h)
    ga, ha = g.action(), h.action()
    return max(a.distance(b) for a, b in zip(ga, ha))


def taut_equal(g: TAutElem, h: TAutElem, tol: float = 0.0) -> bool:
    return taut_distance(g, h) <= tol


def pad_right_aut(g: TAutElem) -> TAutElem:
    k2 = g.k + 1
    ident = {a: a for a in range(1, g.k + 1)}
    comps = [_relabel_series(c, k2, g.order, ident) for c in g.comps]
    comps.append(NCSeries.unit(k2, g.order))
    return TAutElem(k2, g.order, comps)


def pad_left_aut(g: TAutElem) -> TAutElem:
    k2 = g.k + 1
    shift = {a: a + 1 for a in range(1, g.k + 1)}
    comps = [NCSeries.unit(k2, g.order)]
    comps.extend(_relabel_series(c, k2, g.order, shift) for c in g.comps)
    return TAutElem(k2, g.order, comps)


def duplicate_slot_aut(g: TAutElem, i: int) -> TAutElem:
    if not (1 <= i <= g.k):
        raise ArityError(f"slot {i} out of range for arity {g.k}")
    k2 = g.k + 1
    subs = [_split_letter_series(c, k2, g.order, i) for c in g.comps]
    comps = subs[:i] + [subs[i - 1]] + subs[i:]
    return TAutElem(k2, g.order, comps)


def sym_action_aut(sigma: Sequence[int], g: TAutElem) -> TAutElem:
    inv = {sigma[j - 1]: j for j in range(1, g.k + 1)}
    comps = [_relabel_series(g.comps[sigma[i - 1] - 1], g.k, g.order, inv)
             for i in range(1, g.k + 1)]
    return TAutElem(g.k, g.order, comps)


# -- exp and log ---------------------------------------------------------------

def _compositions_upto(total: int):
    """All tuples of parts >= 1 with sum <= total (including the empty one)."""
    out = [()]
    stack = [((), 0)]
    while stack:
        prefix, s = stack.pop()
        for p in range(1, total - s + 1):
            item = prefix + (p,)
            out.append(item)
            stack.append((item, s + p))
    return out


def exp_tder(u: TDerElem) -> TAutElem:
    """Exponential of a tangential derivation.

    The component tuple solves g_i'(s) = g_i(s) * exp(s u)(u_i), g_i(0) = 1;
    its value at s = 1 has the closed form

        g_i = sum over compositions (p_1..p_m) of  prod_j 1/(p_1+..+p_j)
              * A_{p_1-1} ... A_{p_m-1},     A_a := u^a(u_i)/a!,

    which is exact whenever u is.
    """
    k, order = u.k, u.order

    # derivation powers: powers[a][i] = u^a(u_i)/a!
    powers = [list(u.comps)]
    for a in range(1, order + 1):
        prev = powers[-1]
        powers.append([u.apply_nc(c).scale(Fraction(1, a)) for c in prev])

    comps = []
    for i in range(k):
        g = NCSeries.unit(k, order)
        for parts in _compositions_upto(order):
            if not parts:
                continue
            coeff = Fraction(1)
            b = 0
            for p in parts:
                b += p
                coeff /= b
            term = None
            dead = False
            for p in parts:
                factor = powers[p - 1][i]
                if factor.is_zero():
                    dead = True
                    break
                term = factor if term is None else term * factor
                if term.is_zero():
                    dead = True
                    break
            if dead or term is None:
                continue
            g = g + term.scale(coeff)
        comps.append(g)

    out = TAutElem(k, order, tuple(comps))
    # the action has a direct exact formula: sum_m u^m(X_i)/m!
    imgs = []
    for i in range(1, k + 1):
        x = NCSeries.generator(k, order, i)
        acc, term, fact = x, x, 1
        for m in range(1, order + 1):
            term = u.apply_nc(term)
            if term.is_zero():
                break
            fact *= m
            acc = acc + term.scale(Fraction(1, fact))
        imgs.append(acc)
    out._action = tuple(imgs)
    return out


def normalize_tuple_gauge(g: TAutElem) -> TAutElem:
    """Remove the exp(c X_i) left-factor ambiguity from the component tuple.

    Components of the same automorphism differ by group-like left factors
    commuting with their generator; requiring log(g_i) to have no X_i term
    makes the tuple unique and equal to the exp_tder closed form.
    """
    comps = []
    changed = False
    for i, gi in enumerate(g.comps, start=1):
        li = gi.log()
        c = li.coefficient((i,))
        if is_zero(c):
            comps.append(gi)
            continue
        changed = True
        corr = NCSeries.generator(g.k, g.order, i, -c).exp()
        comps.append(corr * gi)
    if not changed:
        return g
    out = TAutElem(g.k, g.order, tuple(comps))
    out._action = g._action
    return out


def log_taut(g: TAutElem) -> TDerElem:
    """Inverse of exp_tder up to extensional equality.

    Works on the gauge-normalized component tuple, where the closed-form
    exponential tuple is reproduced exactly; the components of the logarithm
    are then read off degree by degree.
    """
    for c in g.comps:
        if not is_zero(c.constant_term() - 1):
            raise SeriesError("log of a non-unipotent tangential automorphism")
    k, order = g.k, g.order
    gn = normalize_tuple_gauge(g)
    u = TDerElem.zero(k, order)
    for d in range(1, order + 1):
        e = exp_tder(u)
        corr = [(gn.comps[i] - e.comps[i]).degree_part(d) for i in range(k)]
        delta = TDerElem(k, order, corr, gauge=(d == 1))
        if not delta.is_zero():
            u = u + delta
    return u


def tder_bch(u: TDerElem, v: TDerElem) -> TDerElem:
    """Baker-Campbell-Hausdorff series evaluated on tangential derivations.

    Computed independently of exp/log by expanding log(exp(A)exp(B)) in the
    free associative algebra on two symbols and evaluating the Lyndon
    bracketings through tder_bracket.
    """
    u._check(v)
    n = u.order
    A = NCSeries.generator(2, n, 1, Fraction(1))
    B = NCSeries.generator(2, n, 2, Fraction(1))
    word_series = (A.exp() * B.exp()).log()
    coords = lie_coords_from_nc(word_series)
    return evaluate_lie_in_tder(coords, {1: u, 2: v})


def evaluate_lie_in_tder(ell: LieSeries, images: Mapping[int, TDerElem]) -> TDerElem:
    """Evaluate a Lie series on tder images of its generators."""
    any_img = images[next(iter(images))]
    out = TDerElem.zero(any_img.k, any_img.order)

    def eval_bracketing(b) -> TDerElem:
        if isinstance(b, int):
            return images[b]
        l, r = b
        return tder_bracket(eval_bracketing(l), eval_bracketing(r))

    for w, c in ell.coords.items():
        out = out + eval_bracketing(bracketing_of(w)).scale(c)
    return out


# -- the center decomposition in arity 3 ---------------------------------------

class NotInT3Error(ValueError):
    def __init__(self, degree: int, residual: float):
        super().__init__(f"not in the t3 image at degree {degree} (residual {residual:.3e})")
        self.degree = degree
        self.residual = residual


class CenterSplit:
    """alpha * (t12+t13+t23) + reduced(t12, t23) decomposition of a tder3 element."""

    __slots__ = ("alpha", "reduced", "order")

    def __init__(self, alpha, reduced: LieSeries, order: int):
        self.alpha = alpha
        self.reduced = reduced
        self.order = order


def _gauss_solve_rational(columns: list[dict], rhs: dict, tol: float):
    """Solve sum_j x_j col_j = rhs where columns are exact rational.

    Row operations use only rational multipliers, so the rhs entries may
    live in any commutative ring containing the rationals.  Returns
    (solution list, residual float).
    """
    rows = sorted(set().union(*columns) | set(rhs)) if columns else sorted(rhs)
    m, n = len(rows), len(columns)
    A = [[columns[j].get(r, Fraction(0)) for j in range(n)] for r in rows]
    b = [rhs.get(r, 0) for r in rows]
    piv_rows = []
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, m):
            if A[r][col] != 0:
                sel = r
                break
        if sel is None:
            raise NotInT3Error(-1, float("inf"))
        A[row], A[sel] = A[sel], A[row]
        b[row], b[sel] = b[sel], b[row]
        inv = Fraction(1, 1) / A[row][col]
        A[row] = [a * inv for a in A[row]]
        b[row] = b[row] * inv
        for r in range(m):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * p for a, p in zip(A[r], A[row])]
                b[r] = b[r] - f * b[row]
        piv_rows.append(row)
        row += 1
    residual = 0.0
    for r in range(row, m):
        residual = max(residual, coeff_abs(b[r]))
    if residual > tol:
        raise NotInT3Error(-1, residual)
    return [b[piv_rows[j]] for j in range(n)], residual


def _t3_basis_elements(d: int, order: int) -> list[tuple[tuple, TDerElem]]:
    t12 = tk_generator(1, 2, 3, order)
    t23 = tk_generator(2, 3, 3, order)
    out = []
    for w in lyndon_words(2, d):
        img = evaluate_lie_in_tder(LieSeries(2, order, {w: Fraction(1)}), {1: t12, 2: t23})
        out.append((w, img))
    return out


def center_decompose_t3(u: TDerElem, tol: float = 0.0) -> CenterSplit:
    """Write u = alpha*c + ell(t12, t23), solving degree by degree.

    Raises NotInT3Error (with the offending degree) when u is not in the
    image of the pair-generator Lie algebra at the requested tolerance.
    """
    if u.k != 3:
        raise ArityError("center decomposition is defined in arity 3")
    order = u.order
    alpha = 0
    coords: dict[tuple[int, ...], object] = {}
    for d in range(1, order + 1):
        rhs: dict = {}
        for i in range(3):
            for w, c in u.comps[i].degree_part(d).terms.items():
                rhs[(i,) + w] = c
        basis = _t3_basis_elements(d, order)
        columns = []
        labels = []
        if d == 1:
            cen = center_element(3, order)
            col = {}
            for i in range(3):
                for w, c in cen.comps[i].degree_part(1).terms.items():
                    col[(i,) + w] = Fraction(c)
            columns.append(col)
            labels.append(None)
        for w, img in basis:
            col = {}
            for i in range(3):
                for ww, c in img.comps[i].degree_part(d).terms.items():
                    col[(i,) + ww] = Fraction(c)
            columns.append(col)
            labels.append(w)
        if not rhs and not columns:
            continue
        try:
            sol, _ = _gauss_solve_rational(columns, rhs, tol)
        except NotInT3Error as e:
            raise NotInT3Error(d, e.residual) from None
        for lab, x in zip(labels, sol):
            if lab is None:
                alpha = x
            elif not is_zero(x):
                coords[lab] = x
    return CenterSplit(alpha, LieSeries(2, order, coords), order)


def t3_embed(ell: LieSeries, order: int | None = None) -> TDerElem:
    """Evaluate a two-letter Lie series on (t12, t23) inside tder3."""
    order = ell.order if order is None else order
    t12 = tk_generator(1, 2, 3, order)
    t23 = tk_generator(2, 3, 3, order)
    ell2 = LieSeries(2, order, ell.coords)
    return evaluate_lie_in_tder(ell2, {1: t12, 2: t23})
