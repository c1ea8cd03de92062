"""Truncated power series in (x, y, z, eps) with exact rational coefficients.

A series is truncated by two rules: a monomial x^i y^j z^k eps^l is kept only
when ``i + j + k + l <= D`` and ``l <= E``.  Counting eps in the total degree
makes the truncation ideal stable under every coordinate change whose images
vanish at x = y = z = eps = 0, including eps-dependent shifts of the origin,
so that composition and inversion of families stay exact modulo D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import ConfigurationError, DegreeOverflowError, NonInvertibleChangeError

VARS = ("x", "y", "z", "eps")
_ALIASES = {"x": 0, "y": 1, "z": 2, "eps": 3, "e": 3, "ε": 3, 0: 0, 1: 1, 2: 2, 3: 3}

DEFAULT_D = 6
DEFAULT_E = 2

_S = 64  # packing base; exponents of stored monomials stay below 32
_SH = (3 * 6, 2 * 6, 6, 0)
_MASK = _S - 1


def _pack(e: Sequence[int]) -> int:
    return (((e[0] << 6) | e[1]) << 6 | e[2]) << 6 | e[3]


def _unpack(k: int) -> tuple[int, int, int, int]:
    return (k >> 18) & _MASK, (k >> 12) & _MASK, (k >> 6) & _MASK, k & _MASK


def _wdeg(k: int) -> int:
    return ((k >> 18) & _MASK) + ((k >> 12) & _MASK) + ((k >> 6) & _MASK) + (k & _MASK)


_UNIT = (1 << 18, 1 << 12, 1 << 6, 1)


def to_rational(value) -> mpq:
    """Coerce int, Fraction, mpq or a 'p/q' string to an exact rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float coefficient {value!r}")
    if isinstance(value, str):
        text = value.strip()
        try:
            num, _, den = text.partition("/")
            if not den:
                return mpq(int(num))
            return mpq(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational {value!r}") from exc
    return mpq(value)


def _resolve(var) -> int:
    try:
        return _ALIASES[var]
    except (KeyError, TypeError):
        raise ValueError(f"unknown variable {var!r}") from None


class TruncatedSeries:
    """Immutable truncated series; see the module docstring for the truncation rule."""

    __slots__ = ("_c", "D", "E", "_sorted")

    def __init__(self, coeffs: Mapping | None = None, D: int = DEFAULT_D, E: int = DEFAULT_E,
                 *, strict: bool = False):
        if D < 0 or E < 0 or D >= 32 or E >= 32:
            raise ConfigurationError(f"unsupported truncation (D={D}, E={E})")
        self.D = D
        self.E = E
        self._sorted = None
        c: dict[int, mpq] = {}
        if coeffs:
            for powers, value in coeffs.items():
                powers = tuple(int(p) for p in powers)
                if len(powers) == 3:
                    powers = powers + (0,)
                if len(powers) != 4 or min(powers) < 0:
                    raise ValueError(f"bad multidegree {powers!r}")
                q = to_rational(value)
                if q == 0:
                    continue
                if sum(powers) > D or powers[3] > E:
                    if strict:
                        raise DegreeOverflowError(
                            f"monomial {list(powers)} exceeds truncation (D={D}, E={E})")
                    continue
                key = _pack(powers)
                c[key] = c.get(key, 0) + q
        self._c = {k: v for k, v in c.items() if v != 0}

    # -- construction -------------------------------------------------------------
    @classmethod
    def _raw(cls, c: dict, D: int, E: int) -> "TruncatedSeries":
        obj = cls.__new__(cls)
        obj._c = c
        obj.D = D
        obj.E = E
        obj._sorted = None
        return obj

    @classmethod
    def zero(cls, D=DEFAULT_D, E=DEFAULT_E) -> "TruncatedSeries":
        return cls._raw({}, D, E)

    @classmethod
    def constant(cls, value, D=DEFAULT_D, E=DEFAULT_E) -> "TruncatedSeries":
        q = to_rational(value)
        return cls._raw({0: q} if q != 0 else {}, D, E)

    @classmethod
    def var(cls, name, D=DEFAULT_D, E=DEFAULT_E) -> "TruncatedSeries":
        i = _resolve(name)
        if (i == 3 and E < 1) or D < 1:
            return cls.zero(D, E)
        return cls._raw({_UNIT[i]: mpq(1)}, D, E)

    @classmethod
    def monomial(cls, powers, coeff=1, D=DEFAULT_D, E=DEFAULT_E) -> "TruncatedSeries":
        return cls({tuple(powers): coeff}, D, E)

    @classmethod
    def variables(cls, D=DEFAULT_D, E=DEFAULT_E):
        """Return (x, y, z, eps) at the given truncation."""
        return tuple(cls.var(v, D, E) for v in VARS)

    def like(self, coeffs: Mapping | None = None) -> "TruncatedSeries":
        return TruncatedSeries(coeffs, self.D, self.E)

    # -- inspection -----------------------------------------------------------------
    @property
    def trunc(self) -> tuple[int, int]:
        return self.D, self.E

    def items(self):
        """(powers, coefficient) pairs in canonical order."""
        for k in self._canonical_keys():
            yield _unpack(k), self._c[k]

    def to_dict(self) -> dict[tuple[int, int, int, int], mpq]:
        return {_unpack(k): v for k, v in self._c.items()}

    def __getitem__(self, powers) -> mpq:
        powers = tuple(powers)
        if len(powers) == 3:
            powers = powers + (0,)
        if max(powers) >= 32:
            return mpq(0)
        return self._c.get(_pack(powers), mpq(0))

    def __len__(self) -> int:
        return len(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.trunc == other.trunc and self._c == other._c
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return self._c == ({0: mpq(other)} if other != 0 else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.D, self.E, frozenset(self._c.items())))

    def _canonical_keys(self):
        # graded lexicographic, x > y > z > eps
        return sorted(self._c, key=lambda k: (_wdeg(k), -k))

    def _terms(self):
        if self._sorted is None:
            self._sorted = sorted(((_wdeg(k), k & _MASK, k, v) for k, v in self._c.items()),
                                  key=lambda t: t[0])
        return self._sorted

    def order(self) -> int | None:
        """Lowest weighted degree present, None for the zero series."""
        if not self._c:
            return None
        return min(_wdeg(k) for k in self._c)

    def max_degree(self) -> int:
        return max((_wdeg(k) for k in self._c), default=-1)

    # -- arithmetic -----------------------------------------------------------------
    def _check(self, other: "TruncatedSeries") -> None:
        if self.D != other.D or self.E != other.E:
            raise ConfigurationError(
                f"mismatched truncation {self.trunc} vs {other.trunc}")

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return TruncatedSeries.constant(other, self.D, self.E)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s == 0:
                c.pop(k, None)
            else:
                c[k] = s
        return TruncatedSeries._raw(c, self.D, self.E)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw({k: -v for k, v in self._c.items()}, self.D, self.E)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "TruncatedSeries":
        q = to_rational(factor)
        if q == 0:
            return TruncatedSeries.zero(self.D, self.E)
        return TruncatedSeries._raw({k: v * q for k, v in self._c.items()}, self.D, self.E)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return self.mul_trunc(other, self.D)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return self.scale(1 / to_rational(other))

    def mul_trunc(self, other: "TruncatedSeries", cap: int) -> "TruncatedSeries":
        """Product keeping weighted degrees <= cap (cap <= D)."""
        E = self.E
        a, b = self._terms(), other._terms()
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, mpq] = {}
        get = out.get
        for da, la, ka, ca in a:
            room = cap - da
            if room < 0:
                break
            lroom = E - la
            for db, lb, kb, cb in b:
                if db > room:
                    break
                if lb > lroom:
                    continue
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return TruncatedSeries._raw({k: v for k, v in out.items() if v != 0}, self.D, self.E)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = TruncatedSeries.constant(1, self.D, self.E)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def reciprocal(self) -> "TruncatedSeries":
        """1/s for a series whose constant coefficient at eps = 0 is nonzero."""
        c0 = self._c.get(0)
        if not c0:
            raise ZeroDivisionError("series is not invertible (zero constant term)")
        inv0 = 1 / c0
        rest = self.scale(inv0) - 1  # weighted order >= 1
        result = TruncatedSeries.constant(1, self.D, self.E)
        term = result
        for _ in range(self.D):
            term = -(term * rest)
            if term.is_zero():
                break
            result = result + term
        return result.scale(inv0)

    # -- calculus -------------------------------------------------------------------
    def partial(self, var) -> "TruncatedSeries":
        i = _resolve(var)
        sh = _SH[i]
        unit = _UNIT[i]
        out = {}
        for k, v in self._c.items():
            p = (k >> sh) & _MASK
            if p:
                out[k - unit] = v * p
        return TruncatedSeries._raw(out, self.D, self.E)

    def antiderivative(self, var) -> "TruncatedSeries":
        """Formal integral in one variable with zero integration constant."""
        i = _resolve(var)
        sh = _SH[i]
        unit = _UNIT[i]
        out = {}
        for k, v in self._c.items():
            if _wdeg(k) + 1 > self.D or (i == 3 and (k & _MASK) + 1 > self.E):
                continue
            p = (k >> sh) & _MASK
            out[k + unit] = v / (p + 1)
        return TruncatedSeries._raw(out, self.D, self.E)

    def div_var(self, var, n: int = 1) -> "TruncatedSeries":
        """Exact division by var**n; every monomial must be divisible."""
        i = _resolve(var)
        sh = _SH[i]
        step = _UNIT[i] * n
        out = {}
        for k, v in self._c.items():
            if ((k >> sh) & _MASK) < n:
                raise ArithmeticError(f"series is not divisible by {VARS[i]}^{n}")
            out[k - step] = v
        return TruncatedSeries._raw(out, self.D, self.E)

    def mul_var(self, var, n: int = 1) -> "TruncatedSeries":
        """Multiplication by var**n, truncated."""
        i = _resolve(var)
        step = _UNIT[i] * n
        out = {}
        for k, v in self._c.items():
            if _wdeg(k) + n > self.D or (i == 3 and (k & _MASK) + n > self.E):
                continue
            out[k + step] = v
        return TruncatedSeries._raw(out, self.D, self.E)

    # -- selection ------------------------------------------------------------------
    def select(self, predicate) -> "TruncatedSeries":
        """Keep the monomials whose powers (i, j, k, l) satisfy ``predicate``."""
        return TruncatedSeries._raw(
            {k: v for k, v in self._c.items() if predicate(_unpack(k))}, self.D, self.E)

    def truncated(self, cap: int) -> "TruncatedSeries":
        """Drop weighted degrees above cap (the truncation parameters stay)."""
        return TruncatedSeries._raw(
            {k: v for k, v in self._c.items() if _wdeg(k) <= cap}, self.D, self.E)

    def at_eps0(self) -> "TruncatedSeries":
        return TruncatedSeries._raw({k: v for k, v in self._c.items() if not k & _MASK},
                                    self.D, self.E)

    def eps_coefficient(self, l: int) -> "TruncatedSeries":
        """Coefficient of eps^l as a series without eps."""
        return TruncatedSeries._raw(
            {k - l: v for k, v in self._c.items() if k & _MASK == l}, self.D, self.E)

    def with_trunc(self, D: int, E: int) -> "TruncatedSeries":
        return TruncatedSeries(self.to_dict(), D, E)

    def value_at_origin(self) -> mpq:
        return self._c.get(0, mpq(0))

    def linear_coefficients(self) -> list[mpq]:
        """Coefficients of x, y, z at eps = 0."""
        return [self._c.get(u, mpq(0)) for u in _UNIT[:3]]

    def depends_on(self, var) -> bool:
        sh = _SH[_resolve(var)]
        return any((k >> sh) & _MASK for k in self._c)

    # -- composition ----------------------------------------------------------------
    def substitute(self, images) -> "TruncatedSeries":
        """Compose with ``images`` = (X, Y, Z) replacing x, y, z; eps is kept.

        ``images`` may be a CoordinateChange or a sequence of three series; each
        image must vanish at x = y = z = eps = 0.
        """
        if isinstance(images, CoordinateChange):
            images = images.images
        images = tuple(images)
        if len(images) != 3:
            raise ValueError("need three images")
        for im in images:
            self._check(im)
            if im.value_at_origin() != 0:
                raise NonInvertibleChangeError(
                    "substitution images must vanish at the origin for eps = 0")
        return _compose(self, images)

    # -- evaluation -----------------------------------------------------------------
    def evaluate(self, x=0, y=0, z=0, eps=0):
        """Exact value when the arguments are rational, float otherwise."""
        total = 0
        for k, v in self._c.items():
            i, j, kk, l = _unpack(k)
            total = total + v * (x ** i) * (y ** j) * (z ** kk) * (eps ** l)
        return total

    def float_terms(self):
        """(powers array, float coefficients) for vectorised numerical evaluation."""
        import numpy as np
        if not self._c:
            return np.zeros((0, 4), dtype=int), np.zeros(0)
        keys = list(self._c)
        powers = np.array([_unpack(k) for k in keys], dtype=int)
        coeffs = np.array([float(self._c[k]) for k in keys])
        return powers, coeffs

    # -- serialization ----------------------------------------------------------------
    def to_records(self) -> list[dict]:
        return [{"powers": list(p), "coeff": rational_str(c)} for p, c in self.items()]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], D=DEFAULT_D, E=DEFAULT_E) -> "TruncatedSeries":
        coeffs: dict[tuple, mpq] = {}
        for n, rec in enumerate(records):
            if not isinstance(rec, Mapping) or set(rec) != {"powers", "coeff"}:
                raise ValueError(f"record {n}: expected keys 'powers' and 'coeff'")
            powers = rec["powers"]
            if (not isinstance(powers, list) or len(powers) != 4
                    or not all(isinstance(p, int) and not isinstance(p, bool) and p >= 0
                               for p in powers)):
                raise ValueError(f"record {n}: powers must be four non-negative integers")
            coeff = rec["coeff"]
            if not isinstance(coeff, (str, int)) or isinstance(coeff, bool):
                raise ValueError(f"record {n}: coeff must be an integer or a 'p/q' string")
            try:
                q = to_rational(coeff)
            except ValueError as exc:
                raise ValueError(f"record {n}: {exc}") from None
            if sum(powers) > D or powers[3] > E:
                raise DegreeOverflowError(
                    f"record {n}: monomial {powers} exceeds truncation (D={D}, E={E})")
            key = tuple(powers)
            coeffs[key] = coeffs.get(key, 0) + q
        return cls(coeffs, D, E)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self}, D={self.D}, E={self.E})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for powers, c in self.items():
            mono = "*".join(f"{v}^{p}" if p > 1 else v for v, p in zip(VARS, powers) if p)
            if not mono:
                parts.append(rational_str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{rational_str(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def rational_str(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _compose(s: TruncatedSeries, images: tuple) -> TruncatedSeries:
    """Truncation-aware Horner evaluation of s(X, Y, Z, eps)."""
    D, E = s.D, s.E
    # nested grouping: x-power -> y-power -> z-power -> eps-only coefficient dict
    tree: dict = {}
    for k, v in s._c.items():
        i, j, kk, l = _unpack(k)
        tree.setdefault(i, {}).setdefault(j, {}).setdefault(kk, {})[l] = v
    X, Y, Z = images

    def eps_poly(d):
        return TruncatedSeries._raw({l: v for l, v in d.items()}, D, E)

    def horner(levels: dict, img: TruncatedSeries, inner, cap: int) -> TruncatedSeries:
        top = max(levels)
        acc = None
        for p in range(top, -1, -1):
            part = inner(levels[p], cap - p) if p in levels else None
            if acc is None:
                acc = part if part is not None else TruncatedSeries.zero(D, E)
            else:
                acc = acc.mul_trunc(img, cap - p)
                if part is not None:
                    acc = acc + part
        return acc.truncated(cap) if cap < D else acc

    def z_level(d, cap):
        return horner(d, Z, lambda e, c: eps_poly(e), cap)

    def y_level(d, cap):
        return horner(d, Y, z_level, cap)

    if not tree:
        return TruncatedSeries.zero(D, E)
    return horner(tree, X, y_level, D)


def rational_matrix_inverse(m: Sequence[Sequence]) -> list[list[mpq]]:
    """Exact inverse of a small square rational matrix by Gauss-Jordan elimination."""
    n = len(m)
    a = [[mpq(v) for v in row] + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise NonInvertibleChangeError("singular linear part")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return [row[n:] for row in a]


@dataclass(frozen=True, eq=False)
class CoordinateChange:
    """New coordinates (x', y', z') written as series in the old ones.

    The eps-free constant terms must vanish; eps-dependent constant terms move
    the origin for eps != 0 and are allowed.
    """

    images: tuple
    label: str = ""
    _inverse: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != 3:
            raise ValueError("a coordinate change needs three images")
        D, E = images[0].trunc
        for im in images:
            if im.trunc != (D, E):
                raise ConfigurationError("images have mismatched truncation")
            if im.value_at_origin() != 0:
                raise NonInvertibleChangeError("change must fix the origin at eps = 0")
        object.__setattr__(self, "images", images)
        if not self._inverse:
            self.linear_matrix()  # validates invertibility

    @property
    def trunc(self):
        return self.images[0].trunc

    @classmethod
    def identity(cls, D=DEFAULT_D, E=DEFAULT_E) -> "CoordinateChange":
        return cls(TruncatedSeries.variables(D, E)[:3], "identity")

    @classmethod
    def linear(cls, matrix, D=DEFAULT_D, E=DEFAULT_E, label="linear") -> "CoordinateChange":
        xs = TruncatedSeries.variables(D, E)[:3]
        images = []
        for row in matrix:
            acc = TruncatedSeries.zero(D, E)
            for coef, v in zip(row, xs):
                acc = acc + v.scale(coef)
            images.append(acc)
        return cls(tuple(images), label)

    @classmethod
    def from_inverse(cls, old_in_new, label="") -> "CoordinateChange":
        """Build the change whose inverse (old coordinates in terms of new) is given."""
        inv = cls(tuple(old_in_new), label + ":inverse" if label else "")
        fwd = invert_change(inv)
        return cls(fwd.images, label, [inv])

    def linear_matrix(self) -> list[list[mpq]]:
        """Linear part at eps = 0; raises if it is singular."""
        m = [im.linear_coefficients() for im in self.images]
        rational_matrix_inverse(m)
        return m

    def inverse(self) -> "CoordinateChange":
        if not self._inverse:
            self._inverse.append(invert_change(self))
        return self._inverse[0]

    def then(self, other: "CoordinateChange") -> "CoordinateChange":
        """Apply self first, then other."""
        images = tuple(_compose(im, self.images) for im in other.images)
        return CoordinateChange(images, f"{self.label}|{other.label}")

    def jacobian(self) -> list[list[TruncatedSeries]]:
        return [[im.partial(v) for v in range(3)] for im in self.images]

    def is_identity(self) -> bool:
        D, E = self.trunc
        return all(im == v for im, v in zip(self.images, TruncatedSeries.variables(D, E)))

    def __eq__(self, other):
        if not isinstance(other, CoordinateChange):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def to_record(self) -> dict:
        return {"label": self.label,
                "images": {v: im.to_records() for v, im in zip(VARS, self.images)}}

    @classmethod
    def from_record(cls, rec: Mapping, D=DEFAULT_D, E=DEFAULT_E) -> "CoordinateChange":
        images = tuple(TruncatedSeries.from_records(rec["images"][v], D, E) for v in VARS[:3])
        return cls(images, rec.get("label", ""))


def substitute(s: TruncatedSeries, ch) -> TruncatedSeries:
    return s.substitute(ch)


def invert_change(ch: CoordinateChange) -> CoordinateChange:
    """Formal inverse, built one weighted degree per fixed-point sweep."""
    D, E = ch.trunc
    lin = [im.linear_coefficients() for im in ch.images]
    linv = rational_matrix_inverse(lin)
    xs = TruncatedSeries.variables(D, E)[:3]

    def apply_linv(vec):
        out = []
        for row in linv:
            acc = TruncatedSeries.zero(D, E)
            for c, v in zip(row, vec):
                if c != 0:
                    acc = acc + v.scale(c)
            out.append(acc)
        return tuple(out)

    # nonlinear remainder N = ch - L x
    rest = []
    for row, im in zip(lin, ch.images):
        acc = im
        for c, v in zip(row, xs):
            if c != 0:
                acc = acc - v.scale(c)
        rest.append(acc)
    psi = apply_linv(xs)
    if all(r.is_zero() for r in rest):
        return CoordinateChange(psi, f"inverse({ch.label})", [ch])
    for sweep in range(1, D + 1):
        # after ``sweep`` sweeps the result is exact through weighted degree sweep
        comp = [(_compose(r, psi)).truncated(sweep) for r in rest]
        psi = apply_linv(tuple((x - c).truncated(sweep) for x, c in zip(xs, comp)))
    return CoordinateChange(psi, f"inverse({ch.label})", [ch])


# ---------------------------------------------------------------------------------
# exterior calculus on R^3 with fixed bases
#   1-forms   (dx, dy, dz)       2-forms   (dy^dz, dz^dx, dx^dy)
#   vectors   (dx_, dy_, dz_)    bivectors (dy_^dz_, dz_^dx_, dx_^dy_)

_FORM_DEGREE = {"function": 0, "1-form": 1, "2-form": 2, "3-form": 3}
_MULTI_DEGREE = {"function": 0, "vector": 1, "bivector": 2, "trivector": 3}
_COUNT = {"function": 1, "1-form": 3, "2-form": 3, "3-form": 1,
          "vector": 3, "bivector": 3, "trivector": 1}


@dataclass(frozen=True)
class DifferentialObject:
    kind: str
    components: tuple

    def __post_init__(self):
        if self.kind not in _COUNT:
            raise ValueError(f"unknown kind {self.kind!r}")
        comps = tuple(self.components)
        if len(comps) != _COUNT[self.kind]:
            raise ValueError(f"{self.kind} needs {_COUNT[self.kind]} components")
        object.__setattr__(self, "components", comps)

    @property
    def trunc(self):
        return self.components[0].trunc

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def truncated(self, cap: int) -> "DifferentialObject":
        return DifferentialObject(self.kind, tuple(c.truncated(cap) for c in self.components))

    def __add__(self, other):
        if self.kind != other.kind:
            raise ValueError("kinds differ")
        return DifferentialObject(self.kind, tuple(a + b for a, b in zip(self.components,
                                                                          other.components)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        return DifferentialObject(self.kind, tuple(c * factor for c in self.components))


def function(s: TruncatedSeries) -> DifferentialObject:
    return DifferentialObject("function", (s,))


def exterior_derivative(form: DifferentialObject) -> DifferentialObject:
    c = form.components
    if form.kind == "function":
        f = c[0]
        return DifferentialObject("1-form", (f.partial(0), f.partial(1), f.partial(2)))
    if form.kind == "1-form":
        a, b, cc = c
        return DifferentialObject("2-form", (cc.partial(1) - b.partial(2),
                                             a.partial(2) - cc.partial(0),
                                             b.partial(0) - a.partial(1)))
    if form.kind == "2-form":
        p, q, r = c
        return DifferentialObject("3-form", (p.partial(0) + q.partial(1) + r.partial(2),))
    raise ValueError(f"exterior derivative not defined for {form.kind}")


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def wedge(a: DifferentialObject, b: DifferentialObject) -> DifferentialObject:
    """Wedge product of two forms, or of two multivectors."""
    if a.kind in _FORM_DEGREE and b.kind in _FORM_DEGREE:
        table, names = _FORM_DEGREE, {0: "function", 1: "1-form", 2: "2-form", 3: "3-form"}
    elif a.kind in _MULTI_DEGREE and b.kind in _MULTI_DEGREE:
        table, names = _MULTI_DEGREE, {0: "function", 1: "vector", 2: "bivector", 3: "trivector"}
    else:
        raise ValueError(f"cannot wedge {a.kind} with {b.kind}")
    da, db = table[a.kind], table[b.kind]
    if da + db > 3:
        raise ValueError(f"degree overflow: {da} + {db} > 3")
    kind = names[da + db]
    if da == 0:
        return DifferentialObject(kind, tuple(a.components[0] * c for c in b.components))
    if db == 0:
        return DifferentialObject(kind, tuple(b.components[0] * c for c in a.components))
    if da == 1 and db == 1:
        return DifferentialObject(kind, _cross(a.components, b.components))
    return DifferentialObject(kind, (_dot(a.components, b.components),))
