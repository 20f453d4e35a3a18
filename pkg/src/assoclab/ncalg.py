"""Truncated noncommutative series and free Lie algebra machinery.

Words are tuples of 1-based generator indices.  An :class:`NCSeries` is a
sparse coefficient map word -> scalar, truncated at a hard order ``order``;
every operation silently drops words above the truncation.  Lie elements are
carried either as NC series (for computation) or as :class:`LieSeries` in
Lyndon-basis coordinates (for normal forms and linear algebra).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

from .scalars import coeff_abs, is_zero

Word = tuple[int, ...]


class AlphabetError(ValueError):
    pass


class SeriesError(ValueError):
    pass


# -- Lyndon words -------------------------------------------------------------

@lru_cache(maxsize=None)
def lyndon_words(k: int, d: int) -> tuple[Word, ...]:
    """All Lyndon words of length exactly ``d`` over letters 1..k (Duval)."""
    if k < 1 or d < 1:
        raise AlphabetError("need k >= 1 and d >= 1")
    out: list[Word] = []
    w = [1]
    while w:
        if len(w) == d:
            out.append(tuple(w))
        # extend periodically to length d, then increment
        m = len(w)
        while len(w) < d:
            w.append(w[len(w) - m])
        while w and w[-1] == k:
            w.pop()
        if w:
            w[-1] += 1
    return tuple(sorted(out))


def witt_dimension(k: int, d: int) -> int:
    """Number of Lyndon words of length d over k letters (Witt's formula)."""
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _moebius(d // e) * k**e
    return total // d


def _moebius(n: int) -> int:
    if n == 1:
        return 1
    m, out = n, 1
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    if m > 1:
        out = -out
    return out


@lru_cache(maxsize=None)
def standard_factorization(w: Word) -> tuple[Word, Word]:
    """Chen-Fox-Lyndon factorization w = u v, v the longest proper Lyndon suffix."""
    if len(w) < 2:
        raise SeriesError("single letters have no factorization")
    for i in range(1, len(w)):
        v = w[i:]
        if _is_lyndon(v):
            return w[:i], v
    raise SeriesError(f"{w} is not a Lyndon word")


def _is_lyndon(w: Word) -> bool:
    return all(w < w[i:] for i in range(1, len(w)))


def lyndon_basis(k: int, d: int) -> tuple[tuple[Word, object], ...]:
    """Lyndon words of length d with their standard bracketings.

    The bracketing is a nested tuple: a bare letter for length 1, otherwise
    ``(left, right)`` following the standard factorization.
    """
    def bracketing(w: Word):
        if len(w) == 1:
            return w[0]
        u, v = standard_factorization(w)
        return (bracketing(u), bracketing(v))

    return tuple((w, bracketing(w)) for w in lyndon_words(k, d))


# -- NC series ----------------------------------------------------------------

class NCSeries:
    """Truncated series in the free associative algebra on k generators."""

    __slots__ = ("k", "order", "terms")

    def __init__(self, k: int, order: int, terms: Mapping[Word, object] | None = None):
        self.k = k
        self.order = order
        data: dict[Word, object] = {}
        if terms:
            for w, c in terms.items():
                if len(w) > order:
                    continue
                if any(not (1 <= a <= k) for a in w):
                    raise AlphabetError(f"letter out of range in {w}")
                if not is_zero(c):
                    data[w] = c
        self.terms = data

    # construction helpers
    @staticmethod
    def zero(k: int, order: int) -> "NCSeries":
        return NCSeries(k, order)

    @staticmethod
    def unit(k: int, order: int, c=1) -> "NCSeries":
        return NCSeries(k, order, {(): c})

    @staticmethod
    def generator(k: int, order: int, i: int, c=1) -> "NCSeries":
        return NCSeries(k, order, {(i,): c})

    def copy_with(self, terms: dict) -> "NCSeries":
        s = NCSeries.__new__(NCSeries)
        s.k, s.order = self.k, self.order
        s.terms = {w: c for w, c in terms.items() if len(w) <= self.order and not is_zero(c)}
        return s

    def coefficient(self, w: Word):
        return self.terms.get(tuple(w), 0)

    def constant_term(self):
        return self.terms.get((), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((coeff_abs(c) for c in self.terms.values()), default=0.0)

    def degree_part(self, d: int) -> "NCSeries":
        return self.copy_with({w: c for w, c in self.terms.items() if len(w) == d})

    def degree_range(self, lo: int, hi: int) -> "NCSeries":
        return self.copy_with({w: c for w, c in self.terms.items() if lo <= len(w) <= hi})

    def truncate(self, order: int) -> "NCSeries":
        s = NCSeries.__new__(NCSeries)
        s.k, s.order = self.k, order
        s.terms = {w: c for w, c in self.terms.items() if len(w) <= order}
        return s

    def map_coefficients(self, f: Callable) -> "NCSeries":
        return self.copy_with({w: f(c) for w, c in self.terms.items()})

    def _check_compatible(self, other: "NCSeries"):
        if self.k != other.k or self.order != other.order:
            raise SeriesError(
                f"alphabet/truncation mismatch: ({self.k},{self.order}) vs ({other.k},{other.order})")

    def __add__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = NCSeries.unit(self.k, self.order, other)
        self._check_compatible(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return self.copy_with(out)

    __radd__ = __add__

    def __neg__(self):
        return self.copy_with({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = NCSeries.unit(self.k, self.order, other)
        return self + (-other)

    def scale(self, c) -> "NCSeries":
        return self.copy_with({w: c * x for w, x in self.terms.items()})

    def __mul__(self, other):
        """Concatenation product, truncated; scalars multiply coefficientwise."""
        if not isinstance(other, NCSeries):
            return self.scale(other)
        self._check_compatible(other)
        out: dict[Word, object] = {}
        N = self.order
        for u, a in self.terms.items():
            rem = N - len(u)
            for v, b in other.terms.items():
                if len(v) > rem:
                    continue
                w = u + v
                out[w] = out.get(w, 0) + a * b
        return self.copy_with(out)

    def __rmul__(self, other):
        if isinstance(other, NCSeries):  # pragma: no cover - handled by __mul__
            return other.__mul__(self)
        return self.scale(other)

    def bracket(self, other: "NCSeries") -> "NCSeries":
        return self * other - other * self

    def exp(self) -> "NCSeries":
        if not is_zero(self.constant_term()):
            raise SeriesError("exp needs zero constant term")
        out = NCSeries.unit(self.k, self.order)
        power = NCSeries.unit(self.k, self.order)
        fact = 1
        for n in range(1, self.order + 1):
            power = power * self
            if power.is_zero():
                break
            fact *= n
            out = out + power.scale(Fraction(1, fact))
        return out

    def log(self) -> "NCSeries":
        c0 = self.constant_term()
        if is_zero(c0 - 1):
            pass
        else:
            raise SeriesError("log needs constant term 1")
        x = self - 1
        out = NCSeries.zero(self.k, self.order)
        power = NCSeries.unit(self.k, self.order)
        for n in range(1, self.order + 1):
            power = power * x
            if power.is_zero():
                break
            out = out + power.scale(Fraction((-1) ** (n + 1), n))
        return out

    def inverse(self) -> "NCSeries":
        """Inverse of a series with invertible (unit-like) constant term."""
        c0 = self.constant_term()
        if is_zero(c0):
            raise SeriesError("series with zero constant term is not invertible")
        if isinstance(c0, (int, Fraction)):
            c0inv = Fraction(1, 1) / Fraction(c0)
        elif hasattr(c0, "inverse"):
            c0inv = c0.inverse()
        else:
            c0inv = 1 / c0
        x = (self.scale(c0inv) - 1).scale(-1)  # self*c0inv = 1 - x
        out = NCSeries.unit(self.k, self.order)
        power = NCSeries.unit(self.k, self.order)
        for _ in range(self.order):
            power = power * x
            if power.is_zero():
                break
            out = out + power
        return out.scale(c0inv)

    def substitute(self, images: Mapping[int, "NCSeries"]) -> "NCSeries":
        """Algebra homomorphism sending generator i to images[i], truncated."""
        if not self.terms:
            if images:
                any_img = next(iter(images.values()))
                return NCSeries.zero(any_img.k, any_img.order)
            return NCSeries.zero(self.k, self.order)
        any_img = next(iter(images.values()))
        target_k, order = any_img.k, min(self.order, any_img.order)
        out = NCSeries.zero(target_k, order)
        # shared-prefix evaluation over the trie of words
        words = sorted(self.terms)
        prefix_cache: dict[Word, NCSeries] = {(): NCSeries.unit(target_k, order)}

        def product_for(w: Word) -> NCSeries:
            if w in prefix_cache:
                return prefix_cache[w]
            p = product_for(w[:-1]) * images[w[-1]]
            prefix_cache[w] = p
            return p

        for w in words:
            c = self.terms[w]
            out = out + product_for(w).scale(c)
        return out

    def distance(self, other: "NCSeries") -> float:
        self._check_compatible(other)
        keys = set(self.terms) | set(other.terms)
        return max((coeff_abs(self.terms.get(w, 0) - other.terms.get(w, 0)) for w in keys),
                   default=0.0)

    def __eq__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        if self.k != other.k or self.order != other.order:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(is_zero(self.terms.get(w, 0) - other.terms.get(w, 0)) for w in keys)

    def __hash__(self):  # pragma: no cover - series are not dict keys in practice
        return hash((self.k, self.order, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"NCSeries(k={self.k}, N={self.order}, 0)"
        parts = [f"({c})*{''.join(map(str, w)) or '1'}"
                 for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))[:8]]
        more = "" if len(self.terms) <= 8 else f" ... [{len(self.terms)} terms]"
        return f"NCSeries(k={self.k}, N={self.order}, {' + '.join(parts)}{more})"

    def to_json(self) -> dict:
        from .scalars import scalar_to_json
        return {
            "alphabet": self.k,
            "order": self.order,
            "terms": [{"word": list(w), "coeff": scalar_to_json(c)}
                      for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))],
        }

    @staticmethod
    def from_json(obj: dict) -> "NCSeries":
        from .scalars import scalar_from_json
        return NCSeries(obj["alphabet"], obj["order"],
                        {tuple(t["word"]): scalar_from_json(t["coeff"]) for t in obj["terms"]})


def nc_mul(a: NCSeries, b: NCSeries) -> NCSeries:
    return a * b


def nc_add(a: NCSeries, b: NCSeries) -> NCSeries:
    return a + b


def nc_scale(c, a: NCSeries) -> NCSeries:
    return a.scale(c)


def nc_exp(a: NCSeries) -> NCSeries:
    return a.exp()


def nc_log(g: NCSeries) -> NCSeries:
    return g.log()


# -- Lie elements -------------------------------------------------------------

@lru_cache(maxsize=None)
def lyndon_bracket_nc(k: int, order: int, w: Word) -> NCSeries:
    """NC expansion of the standard Lyndon bracketing of ``w`` (rational)."""
    if len(w) == 1:
        return NCSeries.generator(k, order, w[0], Fraction(1))
    u, v = standard_factorization(w)
    return lyndon_bracket_nc(k, order, u).bracket(lyndon_bracket_nc(k, order, v))


class LieSeries:
    """Free-Lie-algebra element in Lyndon coordinates, truncated at ``order``."""

    __slots__ = ("k", "order", "coords")

    def __init__(self, k: int, order: int, coords: Mapping[Word, object] | None = None):
        self.k = k
        self.order = order
        data: dict[Word, object] = {}
        if coords:
            for w, c in coords.items():
                if len(w) > order or is_zero(c):
                    continue
                if not _is_lyndon(tuple(w)):
                    raise SeriesError(f"{w} is not a Lyndon word")
                data[tuple(w)] = c
        self.coords = data

    @staticmethod
    def zero(k: int, order: int) -> "LieSeries":
        return LieSeries(k, order)

    @staticmethod
    def generator(k: int, order: int, i: int, c=1) -> "LieSeries":
        return LieSeries(k, order, {(i,): c})

    def is_zero(self) -> bool:
        return not self.coords

    def max_abs(self) -> float:
        return max((coeff_abs(c) for c in self.coords.values()), default=0.0)

    def degree_part(self, d: int) -> "LieSeries":
        return LieSeries(self.k, self.order,
                         {w: c for w, c in self.coords.items() if len(w) == d})

    def __add__(self, other: "LieSeries") -> "LieSeries":
        out = dict(self.coords)
        for w, c in other.coords.items():
            out[w] = out.get(w, 0) + c
        return LieSeries(self.k, min(self.order, other.order), out)

    def __neg__(self):
        return LieSeries(self.k, self.order, {w: -c for w, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LieSeries":
        return LieSeries(self.k, self.order, {w: c * x for w, x in self.coords.items()})

    def __eq__(self, other):
        if not isinstance(other, LieSeries):
            return NotImplemented
        keys = set(self.coords) | set(other.coords)
        return all(is_zero(self.coords.get(w, 0) - other.coords.get(w, 0)) for w in keys)

    def __hash__(self):  # pragma: no cover
        return hash((self.k, self.order, frozenset(self.coords.items())))

    def __repr__(self):
        parts = [f"({c})*L{''.join(map(str, w))}"
                 for w, c in sorted(self.coords.items(), key=lambda t: (len(t[0]), t[0]))[:8]]
        more = "" if len(self.coords) <= 8 else " ..."
        return f"LieSeries(k={self.k}, N={self.order}, {' + '.join(parts) or '0'}{more})"

    def to_json(self) -> dict:
        from .scalars import scalar_to_json
        return {
            "alphabet": self.k,
            "order": self.order,
            "terms": [{"word": list(w), "coeff": scalar_to_json(c)}
                      for w, c in sorted(self.coords.items(), key=lambda t: (len(t[0]), t[0]))],
        }


def lie_to_nc(ell: LieSeries, order: int | None = None) -> NCSeries:
    order = ell.order if order is None else order
    out = NCSeries.zero(ell.k, order)
    for w, c in ell.coords.items():
        out = out + lyndon_bracket_nc(ell.k, order, w).scale(c)
    return out


def nc_project_lie(a: NCSeries) -> LieSeries:
    """Dynkin-Specht-Wever projection, expressed in the Lyndon basis.

    A word of length d maps to 1/d times its left-iterated bracketing;
    Lie elements are fixed, so the projection residual measures failure
    to be Lie.
    """
    if not is_zero(a.constant_term()):
        raise SeriesError("nonzero constant term")
    projected = NCSeries.zero(a.k, a.order)
    for w, c in a.terms.items():
        d = len(w)
        br = _left_bracketing_nc(a.k, a.order, w)
        projected = projected + br.scale(c * Fraction(1, d) if isinstance(c, (int, Fraction))
                                         else c / d)
    # the projected series is Lie by construction; only float dust can remain
    coords, residual = _lyndon_extract(projected)
    if residual > 1e-6:
        raise SeriesError(f"Dynkin projection produced a non-Lie series ({residual:.3e})")
    return LieSeries(a.k, a.order, coords)


@lru_cache(maxsize=None)
def _left_bracketing_nc(k: int, order: int, w: Word) -> NCSeries:
    out = NCSeries.generator(k, order, w[0], Fraction(1))
    for a in w[1:]:
        out = out.bracket(NCSeries.generator(k, order, a, Fraction(1)))
    return out


def _lyndon_extract(a: NCSeries) -> tuple[dict, float]:
    coords: dict[Word, object] = {}
    rest = dict(a.terms)
    for d in range(1, a.order + 1):
        for w in lyndon_words(a.k, d):
            c = rest.get(w, 0)
            if is_zero(c):
                continue
            coords[w] = c
            for v, b in lyndon_bracket_nc(a.k, a.order, w).terms.items():
                rest[v] = rest.get(v, 0) - c * b
                if is_zero(rest[v]):
                    del rest[v]
    residual = max((coeff_abs(c) for c in rest.values()), default=0.0)
    return coords, residual


def lie_coords_from_nc(a: NCSeries, tol: float = 0.0) -> LieSeries:
    """Lyndon coordinates of an NC series assumed to be a Lie element.

    Uses the triangularity of Lyndon bracketings (each expands as its word
    plus lexicographically larger words) and raises if the residual exceeds
    ``tol``, i.e. if the input was not Lie.
    """
    coords, residual = _lyndon_extract(a)
    if residual > tol:
        raise SeriesError(f"series is not Lie (residual {residual:.3e})")
    return LieSeries(a.k, a.order, coords)


def lie_projection_residual(a: NCSeries) -> float:
    """How far an NC series is from the free Lie algebra (0 means Lie)."""
    ell = nc_project_lie(a)
    return lie_to_nc(ell, a.order).distance(a)


def lie_bracket(x: LieSeries, y: LieSeries) -> LieSeries:
    nx, ny = lie_to_nc(x), lie_to_nc(y)
    return lie_coords_from_nc(nx.bracket(ny))


def lie_substitute(ell: LieSeries, images: Mapping[int, "LieSeries"]) -> LieSeries:
    """Lie algebra homomorphism given by generator images (Lie series)."""
    nc_images = {i: lie_to_nc(s) for i, s in images.items()}
    any_img = nc_images[next(iter(nc_images))]
    out = NCSeries.zero(any_img.k, min(ell.order, any_img.order))

    def eval_bracketing(b) -> NCSeries:
        if isinstance(b, int):
            return nc_images[b]
        l, r = b
        return eval_bracketing(l).bracket(eval_bracketing(r))

    for w, c in ell.coords.items():
        if len(w) == 1:
            out = out + nc_images[w[0]].scale(c)
        else:
            u, v = standard_factorization(w)
            bl = _bracketing_tuple(u), _bracketing_tuple(v)
            out = out + eval_bracketing(bl).scale(c)
    return lie_coords_from_nc(out)


@lru_cache(maxsize=None)
def _bracketing_tuple(w: Word):
    if len(w) == 1:
        return w[0]
    u, v = standard_factorization(w)
    return (_bracketing_tuple(u), _bracketing_tuple(v))


def bracketing_of(w: Word):
    """Standard-factorization bracketing of a Lyndon word, as nested tuples."""
    return _bracketing_tuple(tuple(w))


# -- shuffles and group-likeness ----------------------------------------------

@lru_cache(maxsize=None)
def shuffle_words(u: Word, v: Word) -> tuple[tuple[Word, int], ...]:
    """Shuffle product of two words as (word, multiplicity) pairs."""
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    acc: dict[Word, int] = {}
    for w, m in shuffle_words(u[:-1], v):
        w2 = w + (u[-1],)
        acc[w2] = acc.get(w2, 0) + m
    for w, m in shuffle_words(u, v[:-1]):
        w2 = w + (v[-1],)
        acc[w2] = acc.get(w2, 0) + m
    return tuple(acc.items())


def is_grouplike(g: NCSeries) -> float:
    """Max shuffle residual |c(u)c(v) - sum_{w in u sh v} c(w)| over word pairs."""
    if not is_zero(g.constant_term() - 1):
        raise SeriesError("group-like test needs constant term 1")
    worst = 0.0
    words_by_len: dict[int, list[Word]] = {}
    for w in _all_words(g.k, g.order):
        words_by_len.setdefault(len(w), []).append(w)
    for lu in range(1, g.order):
        for lv in range(1, g.order - lu + 1):
            for u in words_by_len[lu]:
                cu = g.terms.get(u, 0)
                for v in words_by_len[lv]:
                    cv = g.terms.get(v, 0)
                    acc = cu * cv
                    for w, m in shuffle_words(u, v):
                        cw = g.terms.get(w, 0)
                        if not is_zero(cw):
                            acc = acc - m * cw
                    r = coeff_abs(acc)
                    if r > worst:
                        worst = r
    return worst


@lru_cache(maxsize=None)
def _all_words(k: int, order: int) -> tuple[Word, ...]:
    out: list[Word] = [()]
    layer: list[Word] = [()]
    for _ in range(order):
        layer = [w + (a,) for w in layer for a in range(1, k + 1)]
        out.extend(layer)
    return tuple(out)


def all_words(k: int, order: int) -> tuple[Word, ...]:
    return _all_words(k, order)
