"""Classes in the L-subring of a localized Grothendieck ring of varieties.

Every class produced by a toric computation lies in the subring generated by
L = [A^1] and the denominators L^a - 1, so a class is stored as a reduced
fraction of integer polynomials in a variable t with L = t^N.  Fractional
powers of L (from non-integral boundary coefficients) become integral powers
of t.  Canonical forms are unique, so equality is comparison of fields.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

from sympy.polys.densearith import dup_add, dup_div, dup_exquo, dup_mul
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd
from sympy.polys.factortools import dup_zz_cyclotomic_poly

from .errors import KequivError
from .toric import Fan, ToricPair, is_smooth

Poly = tuple[int, ...]  # dense, highest degree first


def _zz(p: Iterable[int]) -> list:
    return [ZZ(int(c)) for c in p]


def _strip(p: Sequence) -> Poly:
    p = [int(c) for c in p]
    while p and p[0] == 0:
        p.pop(0)
    return tuple(p)


def _exponents(p: Poly) -> list[int]:
    d = len(p) - 1
    return [d - i for i, c in enumerate(p) if c]


def _stretch(p: Poly, k: int) -> Poly:
    """p(t) -> p(t^k)."""
    if k == 1 or not p:
        return p
    d = len(p) - 1
    out = [0] * (d * k + 1)
    for i, c in enumerate(p):
        out[(d - i) * k] = c
    return tuple(reversed(out))


def _compress(p: Poly, k: int) -> Poly:
    """p(t^k) -> p(t); every exponent of p must be divisible by k."""
    if k == 1 or not p:
        return p
    d = len(p) - 1
    return tuple(p[i] for i in range(len(p)) if (d - i) % k == 0)


def _eval(p: Poly, x: int) -> int:
    acc = 0
    for c in p:
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class GrothClass:
    """``numerator / denominator`` in t, where L = t**root."""

    root: int
    numerator: Poly
    denominator: Poly

    @classmethod
    def make(cls, numerator: Sequence[int], denominator: Sequence[int] = (1,), root: int = 1) -> "GrothClass":
        num = _strip(numerator)
        den = _strip(denominator)
        if not den:
            raise KequivError("zero_denominator", "class with zero denominator")
        if not num:
            return cls(1, (), (1,))
        g = dup_gcd(_zz(num), _zz(den), ZZ)
        num = _strip(dup_exquo(_zz(num), g, ZZ))
        den = _strip(dup_exquo(_zz(den), g, ZZ))
        return cls._normalized(num, den, root)

    @classmethod
    def _normalized(cls, num: Poly, den: Poly, root: int) -> "GrothClass":
        """Sign, content and root normalization of an already coprime fraction."""
        if not num:
            return cls(1, (), (1,))
        if den[0] < 0:
            num = tuple(-c for c in num)
            den = tuple(-c for c in den)
        content = 0
        for c in num + den:
            content = gcd(content, c)
        if content > 1:
            num = tuple(c // content for c in num)
            den = tuple(c // content for c in den)
        k = root
        for e in _exponents(num) + _exponents(den):
            k = gcd(k, e)
        if k > 1:
            num, den, root = _compress(num, k), _compress(den, k), root // k
        return cls(root, num, den)

    @classmethod
    def integer(cls, n: int) -> "GrothClass":
        return cls.make((n,))

    @classmethod
    def lefschetz(cls, power: Fraction | int = 1) -> "GrothClass":
        """L**power for a nonnegative rational power."""
        power = Fraction(power)
        if power < 0:
            raise KequivError("negative_power", "negative powers of L are not constructed")
        root = power.denominator
        e = power.numerator
        return cls.make((1,) + (0,) * e, (1,), root)

    # -- arithmetic ---------------------------------------------------------

    def at_root(self, root: int) -> tuple[Poly, Poly]:
        if root % self.root:
            raise ValueError("root must be a multiple of the class's root")
        k = root // self.root
        return _stretch(self.numerator, k), _stretch(self.denominator, k)

    def _common(self, other: "GrothClass"):
        m = lcm(self.root, other.root)
        return m, self.at_root(m), other.at_root(m)

    def __add__(self, other):
        other = _coerce(other)
        m, (a, b), (c, d) = self._common(other)
        num = dup_add(dup_mul(_zz(a), _zz(d), ZZ), dup_mul(_zz(c), _zz(b), ZZ), ZZ)
        return GrothClass.make(num, dup_mul(_zz(b), _zz(d), ZZ), m)

    __radd__ = __add__

    def __neg__(self):
        return GrothClass(self.root, tuple(-c for c in self.numerator), self.denominator)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        m, (a, b), (c, d) = self._common(other)
        return GrothClass.make(dup_mul(_zz(a), _zz(c), ZZ), dup_mul(_zz(b), _zz(d), ZZ), m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if not other.numerator:
            raise KequivError("division_by_zero", "division by the zero class")
        m, (a, b), (c, d) = self._common(other)
        return GrothClass.make(dup_mul(_zz(a), _zz(d), ZZ), dup_mul(_zz(b), _zz(c), ZZ), m)

    def __pow__(self, k: int):
        out = GrothClass.integer(1)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.numerator

    # -- diagnostics --------------------------------------------------------

    def degree(self) -> Fraction:
        """Degree in L of the rational function."""
        if not self.numerator:
            raise KequivError("zero_class", "the zero class has no degree")
        return Fraction(len(self.numerator) - len(self.denominator), self.root)

    def euler_limit(self) -> Fraction:
        """Value at t = 1 (Euler characteristic specialization), as a limit."""
        num = _zz(self.numerator)
        den = _zz(self.denominator)
        linear = _zz((1, -1))
        while num and _eval(_strip(num), 1) == 0 and _eval(_strip(den), 1) == 0:
            num = dup_exquo(num, linear, ZZ)
            den = dup_exquo(den, linear, ZZ)
        if _eval(_strip(den), 1) == 0:
            raise KequivError("pole", "class has a pole at t = 1")
        return Fraction(_eval(_strip(num), 1), _eval(_strip(den), 1))

    def text(self) -> str:
        var = "L" if self.root == 1 else "t"
        num = format_poly(self.numerator, var)
        if self.denominator == (1,):
            body = num
        else:
            body = f"({num}) / ({format_poly(self.denominator, var)})"
        if self.root > 1:
            body += f" where L = t^{self.root}"
        return body

    def __str__(self) -> str:
        return self.text()


def _coerce(x) -> GrothClass:
    if isinstance(x, GrothClass):
        return x
    if isinstance(x, int):
        return GrothClass.integer(x)
    raise TypeError(f"cannot use {type(x).__name__} as a class")


def format_poly(p: Poly, var: str) -> str:
    if not p:
        return "0"
    d = len(p) - 1
    parts = []
    for i, c in enumerate(p):
        if not c:
            continue
        e = d - i
        mag = abs(c)
        if e == 0:
            term = str(mag)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            term = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + term)
        else:
            parts.append((" - " if c < 0 else " + ") + term)
    return "".join(parts)


L = GrothClass.lefschetz(1)
ONE = GrothClass.integer(1)


def projective_space_class(b: int) -> GrothClass:
    return GrothClass.make((1,) * (b + 1))


def torus_class(k: int) -> GrothClass:
    """[G_m^k] = (L - 1)^k."""
    return (L - 1) ** k


def boundary_factor(b: Fraction) -> GrothClass:
    """(L - 1) / (L^(1 - b) - 1) for a coefficient b < 1."""
    a = 1 - Fraction(b)
    if a <= 0:
        raise KequivError("coefficient_too_large", f"coefficient {b} is not < 1")
    return (L - 1) / (GrothClass.lefschetz(a) - 1)


def class_of_fan(fan: Fan) -> GrothClass:
    """Sum over the torus orbits: one (L - 1)^(n - dim) per cone."""
    by_dim = Counter(len(f) for f in fan.faces)
    out = GrothClass.integer(0)
    for k, count in sorted(by_dim.items()):
        out = out + count * torus_class(fan.rank - k)
    return out


def _require_smooth(fan: Fan) -> None:
    if not is_smooth(fan)[0]:
        raise KequivError("not_smooth", "stringy strata require a smooth model; call resolve first")


def strata_class(pair: ToricPair, subset: Iterable[int]) -> GrothClass:
    """[B_J^o]: the orbits whose cone meets the boundary index set exactly in J."""
    _require_smooth(pair.fan)
    subset = frozenset(int(j) for j in subset)
    boundary = pair.boundary
    counts = Counter(len(f) for f in pair.fan.faces if frozenset(f) & boundary == subset)
    out = GrothClass.integer(0)
    for k, count in sorted(counts.items()):
        out = out + count * torus_class(pair.fan.rank - k)
    return out


def stringy_invariant(pair: ToricPair, strategy: str = "min-phi") -> GrothClass:
    """sum_J [B_J^o] prod_{j in J} (L - 1)/(L^(1 - b_j) - 1), on a resolution if needed.

    With L = t^N every factor L^a - 1 is t^(aN) - 1, a product of cyclotomic
    polynomials, so the terms are summed over a common cyclotomic denominator
    and cancelled factor by factor instead of through repeated gcds.
    """
    from .birational import resolve

    if any(b >= 1 for b in pair.coefficients.values()):
        raise KequivError("coefficient_too_large", "boundary coefficients must be < 1")
    if not is_smooth(pair.fan)[0]:
        pair, _ = resolve(pair, strategy)
    n = pair.fan.rank
    boundary = pair.boundary
    groups = Counter()
    for face in pair.fan.faces:
        exps = tuple(sorted(1 - pair.b(j) for j in face if j in boundary))
        groups[(len(face), exps)] += 1
    root = 1
    for (_, exps) in groups:
        for a in exps:
            root = lcm(root, a.denominator)
    # exponent of each cyclotomic factor Phi_d in every term
    terms = []
    for (k, exps), count in sorted(groups.items()):
        e = Counter()
        for d in _divisors(root):
            e[d] += n - k + len(exps)
        for a in exps:
            for d in _divisors(int(a * root)):
                e[d] -= 1
        terms.append((count, e))
    den = Counter()
    for _, e in terms:
        for d, x in e.items():
            if x < 0:
                den[d] = max(den[d], -x)
    total = [ZZ(0)]
    for count, e in terms:
        poly = [ZZ(count)]
        for d in sorted(set(e) | set(den)):
            poly = dup_mul(poly, list(_cyclotomic_power(d, e.get(d, 0) + den.get(d, 0))), ZZ)
        total = dup_add(total, poly, ZZ)
    for d in sorted(den):
        phi = list(_cyclotomic_power(d, 1))
        while den[d] and total:
            q, r = dup_div(total, phi, ZZ)
            if _strip(r):
                break
            total, den[d] = q, den[d] - 1
    denominator = [ZZ(1)]
    for d in sorted(den):
        denominator = dup_mul(denominator, list(_cyclotomic_power(d, den[d])), ZZ)
    return GrothClass._normalized(_strip(total), _strip(denominator), root)


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


@lru_cache(maxsize=None)
def _cyclotomic_power(d: int, k: int) -> tuple:
    if k == 0:
        return (ZZ(1),)
    if k == 1:
        return tuple(dup_zz_cyclotomic_poly(d, ZZ))
    half = list(_cyclotomic_power(d, k // 2))
    out = dup_mul(half, half, ZZ)
    if k % 2:
        out = dup_mul(out, list(_cyclotomic_power(d, 1)), ZZ)
    return tuple(out)


def groth_equal_report(a: GrothClass, b: GrothClass) -> tuple[bool, GrothClass]:
    diff = a - b
    return diff.is_zero(), diff
