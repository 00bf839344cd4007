"""Exact arithmetic in dyadic local fields F/Q2.

A field is presented either as a totally ramified extension
F = Q2[x]/(g) with g Eisenstein of degree e (this includes F = Q2
itself, with g = x - 2), or as the unramified extension of degree f,
F = Q2[x]/(g) with g monic and irreducible mod 2.  Mixed towers
(e > 1 and f > 1) are rejected at construction: the supported shapes
already realize both residue-field branches of the unit-group
combinatorics, and two-variable tower arithmetic buys nothing here.

Elements are stored as coefficient vectors over the power basis
1, x, ..., x^(deg-1) with Fraction coefficients.  This basis is a
valuation basis in both supported shapes, so the valuation of an
element is read off coefficient-wise:

    ramified:    ord(sum c_i pi^i) = min_i (e*ord2(c_i) + i)
    unramified:  ord(sum c_i w^i)  = min_i ord2(c_i)

An element carries an absolute precision: `prec = None` means the
element is exact (known to all digits); an integer P means it is known
modulo pi^P only.  Arithmetic propagates precision pessimistically and
the defect / Hilbert-symbol routines check their stated precision
preconditions, raising InsufficientPrecision instead of guessing.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InsufficientPrecision, InputError

INF = float("inf")


def _ord2_int(n: int) -> int:
    return (n & -n).bit_length() - 1


def ord2(c) -> float:
    """2-adic valuation of a rational number (INF for 0)."""
    c = Fraction(c)
    if c == 0:
        return INF
    return _ord2_int(c.numerator) - _ord2_int(c.denominator)


def _frac_mod(c: Fraction, m: int) -> Fraction:
    # canonical representative of c modulo 2^m (m may be negative)
    if c == 0:
        return c
    v = int(ord2(c))
    if v >= m:
        return Fraction(0)
    unit = c / Fraction(2) ** v
    p, q = unit.numerator, unit.denominator
    u = (p * pow(q, -1, 1 << (m - v))) % (1 << (m - v))
    return u * Fraction(2) ** v


# ---------------------------------------------------------------------------
# residue field GF(2^f), elements encoded as bitmask polynomials in w
# ---------------------------------------------------------------------------

class ResidueField:
    def __init__(self, f: int, poly_mask: int):
        self.f = f
        self.poly_mask = poly_mask  # monic part included: bit f is set
        self.size = 1 << f

    def mul(self, a: int, b: int) -> int:
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.f & 1:
                a ^= self.poly_mask
        return r

    def square(self, a: int) -> int:
        return self.mul(a, a)

    def sqrt(self, a: int) -> int:
        # Frobenius is bijective in characteristic 2
        for _ in range(self.f - 1):
            a = self.square(a)
        return a

    def trace(self, a: int) -> int:
        t, x = 0, a
        for _ in range(self.f):
            t ^= x
            x = self.square(x)
        return t

    def solve_artin_schreier(self, w: int, g: int):
        """Smallest root of d^2 + w*d = g, or None if insolvable."""
        for d in range(self.size):
            if self.square(d) ^ self.mul(w, d) == g:
                return d
        return None

    def elements(self):
        return range(self.size)


def _irreducible_poly_mask(f: int) -> int:
    """Lexicographically first monic irreducible of degree f over F2."""
    if f == 1:
        return 0b10  # x
    for low in range(1, 1 << f, 2):  # constant term must be 1
        mask = (1 << f) | low
        if _gf2_poly_irreducible(mask, f):
            return mask
    raise AssertionError("no irreducible polynomial found")


def _gf2_poly_irreducible(mask: int, f: int) -> bool:
    # x^(2^f) == x mod (mask) and gcd conditions via trial division
    for d in range(1, f // 2 + 1):
        for low in range(1 << d):
            div = (1 << d) | low
            if _gf2_poly_mod(mask, div) == 0:
                return False
    return True


def _gf2_poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a.bit_length() - 1 >= db and a:
        a ^= b << (a.bit_length() - 1 - db)
    return a


# ---------------------------------------------------------------------------
# field descriptions
# ---------------------------------------------------------------------------

class FieldDesc:
    """A supported dyadic field: ramified (f = 1) or unramified (e = 1)."""

    def __init__(self, e, f, phi, default_precision=None):
        if e > 1 and f > 1:
            raise InputError("mixed e > 1, f > 1 fields are not supported")
        self.e = e
        self.f = f
        self.degree = max(e, f)
        self.phi = tuple(Fraction(c) for c in phi)  # low coeffs, monic deg = degree
        if len(self.phi) != self.degree:
            raise InputError("defining polynomial has wrong degree")
        if default_precision is None:
            default_precision = 4 * e + 4 + 8
        if default_precision < 4 * e + 4:
            raise InputError("default_precision must be at least 4e + 4")
        self.default_precision = default_precision
        self.ramified = f == 1
        if self.ramified:
            for i, c in enumerate(self.phi):
                if ord2(c) < 1:
                    raise InputError("Eisenstein coefficients must be even")
            if ord2(self.phi[0]) != 1:
                raise InputError("Eisenstein polynomial needs ord2(c_0) = 1")
            self.residue = ResidueField(1, 0b10)
        else:
            mask = 0
            for i, c in enumerate(self.phi):
                if c.denominator % 2 == 0:
                    raise InputError("unramified coefficients must be 2-adic integers")
                mask |= (c.numerator * c.denominator % 2) << i
            mask |= 1 << f
            if not _gf2_poly_irreducible(mask, f):
                raise InputError("defining polynomial is reducible mod 2")
            self.residue = ResidueField(f, mask)
        self._cache = {}
        self.zero = FieldElem(self, (Fraction(0),) * self.degree, None)
        self.one = self.from_rational(1)
        self.two = self.from_rational(2)
        self.pi = self._make_pi()
        self.pi_inv = self.pi.inverse()
        if self.pi_inv.ord() != -1 or self.two.ord() != self.e:
            raise AssertionError("defining data inconsistent with e = ord 2")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def q2(default_precision=None) -> "FieldDesc":
        return FieldDesc(1, 1, [-2], default_precision)

    @staticmethod
    def unramified(f: int, default_precision=None) -> "FieldDesc":
        if f == 1:
            return FieldDesc.q2(default_precision)
        mask = _irreducible_poly_mask(f)
        return FieldDesc(1, f, [(mask >> i) & 1 for i in range(f)], default_precision)

    @staticmethod
    def eisenstein(coeffs, default_precision=None) -> "FieldDesc":
        return FieldDesc(len(coeffs), 1, coeffs, default_precision)

    # -- basics ------------------------------------------------------------

    def _key(self):
        return (self.e, self.f, self.phi)

    def __eq__(self, other):
        return isinstance(other, FieldDesc) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.e == 1 and self.f == 1:
            return "Q2"
        if self.ramified:
            return f"Q2-eisenstein({[str(c) for c in self.phi]})"
        return f"Q2-unram({self.f})"

    def _make_pi(self):
        if not self.ramified:
            return self.from_rational(2)
        if self.degree == 1:
            return self.from_rational(-self.phi[0])  # x = -c0, e.g. 2 for Q2
        coeffs = [Fraction(0)] * self.degree
        coeffs[1] = Fraction(1)
        return FieldElem(self, tuple(coeffs), None)

    def from_rational(self, c, prec=None) -> "FieldElem":
        coeffs = [Fraction(0)] * self.degree
        coeffs[0] = Fraction(c)
        return FieldElem(self, tuple(coeffs), prec)

    def from_coeffs(self, coeffs, prec=None) -> "FieldElem":
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > self.degree:
            coeffs = self._reduce_poly(coeffs)
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return FieldElem(self, tuple(coeffs), prec)

    def pi_pow(self, k: int) -> "FieldElem":
        key = ("pi_pow", k)
        if key not in self._cache:
            base = self.pi if k >= 0 else self.pi_inv
            out = self.one
            for _ in range(abs(k)):
                out = out * base
            self._cache[key] = out
        return self._cache[key]

    def _reduce_poly(self, coeffs):
        # reduce a list of Fractions modulo the monic defining polynomial
        coeffs = list(coeffs)
        d = self.degree
        while len(coeffs) > d:
            top = coeffs.pop()
            k = len(coeffs) - d
            for i, c in enumerate(self.phi):
                coeffs[k + i] -= top * c
        return coeffs

    def lift_residue(self, r: int) -> "FieldElem":
        """Canonical 0/1-coefficient lift of a residue-field element."""
        coeffs = [Fraction((r >> i) & 1) for i in range(self.degree)]
        return FieldElem(self, tuple(coeffs), None)

    def coeff_modulus_exponents(self, prec: int):
        """m_i with: a = sum c_i x^i lies in pi^prec*o iff ord2(c_i) >= m_i."""
        if self.ramified:
            return [-((-(prec - i)) // self.e) for i in range(self.degree)]
        return [prec] * self.degree

    # -- derived unit/square-class data (built lazily, cached) --------------

    def delta(self) -> "FieldElem":
        """Fixed unit with quadratic defect exactly 2e (the class Delta)."""
        if "delta" not in self._cache:
            for g in range(1, self.residue.size):
                cand = self.one + self.lift_residue(g) * self.pi_pow(2 * self.e)
                if quad_defect(cand) == 2 * self.e:
                    self._cache["delta"] = cand
                    break
            else:
                raise AssertionError("no unit of defect 2e found")
        return self._cache["delta"]

    def _unit_class_data(self):
        """Partition of units modulo squares, via residues mod pi^(2e+1).

        Returns (reps, index_of_digits): canonical exact representatives
        ordered with the lexicographically least digit tuple first, and a
        mapping from the digit tuple of a unit (to 2e+1 digits) to its
        class index.
        """
        if "unit_classes" in self._cache:
            return self._cache["unit_classes"]
        depth = 2 * self.e + 1
        digit_range = range(self.residue.size)
        residues = list(itertools.product(
            *([range(1, self.residue.size)] + [digit_range] * (depth - 1))))
        elem_of = {digs: self._elem_from_digits(digs) for digs in residues}
        sq_elems = {tuple((u * u).unit_digits(depth)) for u in elem_of.values()}
        sq_elems = [self._elem_from_digits(d) for d in sq_elems]
        index_of = {}
        reps = []
        for digs in sorted(residues):
            if digs in index_of:
                continue
            idx = len(reps)
            u = elem_of[digs]
            reps.append(u)
            for s in sq_elems:
                index_of[tuple((u * s).unit_digits(depth))] = idx
        self._cache["unit_classes"] = (reps, index_of)
        return self._cache["unit_classes"]

    def _elem_from_digits(self, digs):
        acc = self.zero
        for k, d in enumerate(digs):
            if d:
                acc = acc + self.lift_residue(d) * self.pi_pow(k)
        return acc

    def unit_class_reps(self):
        return self._unit_class_data()[0]

    def square_class_reps(self):
        """Canonical representatives of F*/F*^2 (units first, then pi*units)."""
        units = self.unit_class_reps()
        return list(units) + [self.pi * u for u in units]


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

class FieldElem:
    """Immutable element of a FieldDesc, exact or precision-tracked."""

    __slots__ = ("field", "coeffs", "prec", "_ord")

    def __init__(self, field, coeffs, prec):
        self.field = field
        if prec is not None:
            mods = field.coeff_modulus_exponents(prec)
            coeffs = tuple(_frac_mod(c, m) for c, m in zip(coeffs, mods))
        self.coeffs = tuple(coeffs)
        self.prec = prec
        self._ord = None

    # -- precision bookkeeping ----------------------------------------------

    @property
    def abs_precision(self):
        return INF if self.prec is None else self.prec

    @property
    def is_exact(self):
        return self.prec is None

    def with_precision(self, prec: int) -> "FieldElem":
        if self.prec is not None and self.prec <= prec:
            return self
        return FieldElem(self.field, self.coeffs, prec)

    # -- valuation -----------------------------------------------------------

    def _raw_ord(self):
        best = INF
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            v = self.field.e * ord2(c) + (i if self.field.ramified else 0)
            best = min(best, v)
        return best

    def ord(self):
        """pi-adic valuation; INF only for exact zero."""
        if self._ord is None:
            v = self._raw_ord()
            if v == INF and self.prec is not None:
                raise InsufficientPrecision(
                    f"element is 0 mod pi^{self.prec}; valuation unknown")
            self._ord = v
        return self._ord

    def is_zero(self):
        return self.prec is None and all(c == 0 for c in self.coeffs)

    # -- ring operations ------------------------------------------------------

    def _check_field(self, other):
        if self.field != other.field:
            raise InputError("elements from different fields")

    def __add__(self, other):
        self._check_field(other)
        prec = _min_prec(self.prec, other.prec)
        return FieldElem(self.field,
                         tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                         prec)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FieldElem(self.field, tuple(-c for c in self.coeffs), self.prec)

    def __mul__(self, other):
        self._check_field(other)
        d = self.field.degree
        out = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        out = self.field._reduce_poly(out)
        prec = None
        if self.prec is not None or other.prec is not None:
            cands = []
            if self.prec is not None:
                vb = other._raw_ord()
                cands.append(self.prec + (vb if vb != INF else 0))
            if other.prec is not None:
                va = self._raw_ord()
                cands.append(other.prec + (va if va != INF else 0))
            prec = int(min(cands))
        return FieldElem(self.field, tuple(out), prec)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        d = self.field.degree
        if d == 1:
            inv = 1 / self.coeffs[0]
            prec = None if self.prec is None else self.prec - 2 * int(self._raw_ord())
            return FieldElem(self.field, (inv,), prec)
        # solve (mult-by-self) b = 1 over Q: column j = coeffs of self * x^j
        mat = []
        for j in range(d):
            vec = [Fraction(0)] * d
            vec[j] = Fraction(1)
            col = self.field._reduce_poly(_poly_mul(list(self.coeffs), vec))
            col += [Fraction(0)] * (d - len(col))
            mat.append(col)
        sol = _solve_fraction_system(
            [[mat[j][i] for j in range(d)] for i in range(d)],
            [Fraction(1)] + [Fraction(0)] * (d - 1))
        prec = None
        if self.prec is not None:
            prec = self.prec - 2 * int(self._raw_ord())
        return FieldElem(self.field, tuple(sol), prec)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- residues and digits ---------------------------------------------------

    def residue_digit(self) -> int:
        """Image in the residue field (assumes the element lies in o)."""
        if self.field.ramified:
            c = self.coeffs[0]
            return (c.numerator * c.denominator) % 2
        mask = 0
        for i, c in enumerate(self.coeffs):
            if ord2(c) == 0:
                mask |= 1 << i
            elif ord2(c) < 0:
                raise InputError("residue of a non-integral element")
        return mask

    def unit_digits(self, count=None):
        """pi-adic digits of the unit part (leading digit nonzero)."""
        if count is None:
            count = 2 * self.field.e + 1
        v = self.ord()
        if v == INF:
            return [0] * count
        if self.prec is not None and self.prec - v < count:
            raise InsufficientPrecision("not enough digits tracked")
        u = self * self.field.pi_pow(-int(v))
        out = []
        for _ in range(count):
            if u.prec is None and all(c == 0 for c in u.coeffs):
                out.append(0)
                continue
            r = u.residue_digit()
            out.append(r)
            u = (u - self.field.lift_residue(r)) * self.field.pi_inv
        return out

    # -- misc --------------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, FieldElem) and self.field == other.field
                and self.coeffs == other.coeffs and self.prec == other.prec)

    def __hash__(self):
        return hash((self.field, self.coeffs, self.prec))

    def __repr__(self):
        names = ["", "pi" if self.field.ramified else "w"]
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = names[1] + (f"^{i}" if i > 1 else "")
                parts.append(f"{c}*{mono}" if c != 1 else mono)
        body = " + ".join(parts) if parts else "0"
        if self.prec is not None:
            body += f" + O(pi^{self.prec})"
        return body


def _min_prec(pa, pb):
    if pa is None:
        return pb
    if pb is None:
        return pa
    return min(pa, pb)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out


def _solve_fraction_system(rows, rhs):
    n = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [c * inv for c in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [c - factor * p for c, p in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# the basic invariants: valuation, quadratic defect, square classes
# ---------------------------------------------------------------------------

def valuation(x: FieldElem):
    """pi-adic order of x; INF only for exact zero."""
    if x.is_zero():
        return INF
    return x.ord()


def quad_defect(a: FieldElem):
    """Relative order d(a) of the quadratic defect of a.

    d(a) = 0 for odd valuation, d(a) in {1, 3, ..., 2e-1, 2e, INF} for
    units (times even powers of pi); INF exactly on squares.  Implemented
    by iteratively stripping best-approximating squares; each pass either
    terminates or strictly increases ord(u - 1).
    """
    if a.is_zero():
        raise InputError("quadratic defect of zero")
    F = a.field
    e = F.e
    v = a.ord()
    if a.prec is not None and a.prec < v + 2 * e + 1:
        raise InsufficientPrecision(
            f"need absolute precision {v + 2*e + 1}, have {a.prec}")
    if int(v) % 2 != 0:
        return 0
    u = a * F.pi_pow(-int(v))
    r = u.residue_digit()
    s = F.residue.sqrt(r)
    u = u * F.lift_residue(s).inverse() ** 2
    w_res = (F.two * F.pi_pow(-e)).residue_digit()
    while True:
        diff = u - F.one
        if diff.is_zero():
            return INF
        try:
            t = diff.ord()
        except InsufficientPrecision:
            return INF  # u = 1 mod pi^(2e+1) or deeper: a square either way
        t = int(t)
        if t >= 2 * e + 1:
            return INF
        if t == 2 * e:
            g = (diff * F.pi_pow(-2 * e)).residue_digit()
            d = F.residue.solve_artin_schreier(w_res, g)
            if d is None:
                return 2 * e
            u = u / (F.one + F.lift_residue(d) * F.pi_pow(e)) ** 2
            continue
        if t % 2 == 1:
            return t
        g = (diff * F.pi_pow(-t)).residue_digit()
        d = F.residue.sqrt(g)
        u = u / (F.one + F.lift_residue(d) * F.pi_pow(t // 2)) ** 2


def delta_unit(field: FieldDesc) -> FieldElem:
    """The fixed unit Delta = 1 - 4*rho with d(Delta) = 2e."""
    return field.delta()


class SquareClass:
    """An element of F*/F*^2, keyed by valuation parity and unit class."""

    __slots__ = ("field", "parity", "uidx")

    def __init__(self, field, parity, uidx):
        self.field = field
        self.parity = parity
        self.uidx = uidx

    @staticmethod
    def of(a: FieldElem) -> "SquareClass":
        if a.is_zero():
            raise InputError("square class of zero")
        F = a.field
        v = a.ord()
        if a.prec is not None and a.prec < v + 2 * F.e + 1:
            raise InsufficientPrecision("square class needs ord + 2e + 1 digits")
        u = a * F.pi_pow(-int(v))
        digs = tuple(u.unit_digits(2 * F.e + 1))
        _, index_of = F._unit_class_data()
        return SquareClass(F, int(v) % 2, index_of[digs])

    @property
    def rep(self) -> FieldElem:
        u = self.field.unit_class_reps()[self.uidx]
        return self.field.pi * u if self.parity else u

    @property
    def val_parity(self):
        return self.parity

    def __mul__(self, other):
        table = _unit_class_mul_table(self.field)
        return SquareClass(self.field, self.parity ^ other.parity,
                           table[self.uidx][other.uidx])

    def inverse(self):
        return self  # every square class is its own inverse

    def __eq__(self, other):
        return (isinstance(other, SquareClass) and self.field == other.field
                and self.parity == other.parity and self.uidx == other.uidx)

    def __hash__(self):
        return hash((self.field, self.parity, self.uidx))

    def is_one(self):
        return self.parity == 0 and self.uidx == 0

    def defect(self):
        if self.parity:
            return 0
        key = ("class_defect", self.uidx)
        if key not in self.field._cache:
            self.field._cache[key] = quad_defect(self.rep)
        return self.field._cache[key]

    def __repr__(self):
        return f"cls({self.rep!r})"


def _unit_class_mul_table(field):
    if "unit_mul" not in field._cache:
        reps, index_of = field._unit_class_data()
        depth = 2 * field.e + 1
        n = len(reps)
        table = [[index_of[tuple((reps[i] * reps[j]).unit_digits(depth))]
                  for j in range(n)] for i in range(n)]
        field._cache["unit_mul"] = table
    return field._cache["unit_mul"]


def square_class(a: FieldElem) -> SquareClass:
    return SquareClass.of(a)


def same_square_class(a: FieldElem, b: FieldElem) -> bool:
    return quad_defect(a * b) == INF


def minus_one_class(field: FieldDesc) -> SquareClass:
    if "minus_one" not in field._cache:
        field._cache["minus_one"] = SquareClass.of(-field.one)
    return field._cache["minus_one"]


# ---------------------------------------------------------------------------
# Hilbert symbol by exhaustive primitive search modulo pi^K
# ---------------------------------------------------------------------------

class PadicQuotient:
    """Vectorized arithmetic in o/pi^K on integer coefficient arrays.

    Coefficient arrays have shape (..., degree); entry i is reduced to the
    canonical representative modulo 2^(m_i).  numpy int64 throughout.
    """

    def __init__(self, field: FieldDesc, K: int):
        self.field = field
        self.K = K
        self.mods = field.coeff_modulus_exponents(K)
        self.moduli = np.array([1 << max(m, 0) for m in self.mods], dtype=np.int64)
        big = max(self.mods) + field.e + 2
        self.phi_int = np.array(
            [_rat_mod_int(c, big) for c in field.phi], dtype=np.int64)
        self.size = int(np.prod(self.moduli))

    def reduce(self, cvs):
        return np.mod(cvs, self.moduli)

    def add(self, u, v):
        return self.reduce(u + v)

    def mul(self, u, v):
        d = self.field.degree
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        shape = np.broadcast_shapes(u.shape, v.shape)
        out = np.zeros(shape[:-1] + (2 * d - 1,), dtype=object)
        for i in range(d):
            for j in range(d):
                out[..., i + j] += u[..., i].astype(object) * v[..., j]
        # reduce modulo the monic defining polynomial, top power down
        for k in range(2 * d - 2, d - 1, -1):
            top = out[..., k].copy()
            out[..., k] = 0
            for i in range(d):
                out[..., k - d + i] -= top * int(self.phi_int[i])
        res = out[..., :d]
        res = np.mod(res, self.moduli.astype(object))
        return res.astype(np.int64)

    def from_elem(self, a: FieldElem):
        assert a.field == self.field
        return np.array([_rat_mod_int(c, m) for c, m in zip(a.coeffs, self.mods)],
                        dtype=np.int64)

    def pack(self, cvs):
        cvs = np.asarray(cvs, dtype=np.int64)
        out = np.zeros(cvs.shape[:-1], dtype=np.int64)
        shift = 0
        for i, m in enumerate(self.mods):
            out |= cvs[..., i] << shift
            shift += max(m, 0)
        return out

    def all_residues(self):
        ranges = [np.arange(int(m)) for m in self.moduli]
        grids = np.meshgrid(*ranges, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1).astype(np.int64)

    def ord_mask_unit(self, cvs):
        """Boolean mask: residue is a unit in o (valuation 0)."""
        if self.field.ramified:
            return cvs[..., 0] % 2 == 1
        return (cvs % 2 == 1).any(axis=-1)


def _rat_mod_int(c, m: int) -> int:
    c = Fraction(c)
    if m <= 0:
        return 0
    mod = 1 << m
    den_inv = pow(c.denominator, -1, mod)
    return (c.numerator * den_inv) % mod


def _hilbert_exhaustive(a: FieldElem, b: FieldElem) -> int:
    """Decide solvability of z^2 = a x^2 + b y^2 with (x,y,z) primitive.

    Searches all residues modulo pi^K, K = 2e + 2 + max(0, ord a, ord b);
    at that precision a primitive solution Hensel-lifts, so the verdict is
    exact for square-class representatives.
    """
    F = a.field
    K = 2 * F.e + 2 + max(0, int(a.ord()), int(b.ord()))
    ring = PadicQuotient(F, K)
    xs = ring.all_residues()
    xsq = ring.mul(xs, xs)
    unit = ring.ord_mask_unit(xs)
    sq_all = np.unique(ring.pack(xsq))
    sq_unit = np.unique(ring.pack(xsq[unit]))
    ax2 = ring.mul(ring.from_elem(a), xsq)
    by2 = ring.mul(ring.from_elem(b), xsq)
    total = ring.reduce(ax2[:, None, :].astype(np.int64) + by2[None, :, :])
    packed = ring.pack(total)
    is_sq = np.isin(packed, sq_all)
    is_squ = np.isin(packed, sq_unit)
    some_unit = unit[:, None] | unit[None, :]
    ok = (some_unit & is_sq) | (~some_unit & is_squ)
    return 1 if bool(ok.any()) else -1


def hilbert(a: FieldElem, b: FieldElem) -> int:
    """Hilbert symbol (a, b) in {+1, -1}."""
    ca, cb = SquareClass.of(a), SquareClass.of(b)
    return hilbert_class(ca, cb)


def hilbert_class(ca: SquareClass, cb: SquareClass) -> int:
    field = ca.field
    cache = field._cache.setdefault("hilbert", {})
    key = (ca.parity, ca.uidx, cb.parity, cb.uidx)
    if key not in cache:
        sym = _hilbert_exhaustive(ca.rep, cb.rep)
        cache[key] = sym
        cache[(cb.parity, cb.uidx, ca.parity, ca.uidx)] = sym
    return cache[key]


def in_norm_group(a: FieldElem, b: FieldElem) -> bool:
    """Whether b is a norm from F(sqrt(a)), i.e. (a, b) = +1."""
    return hilbert(a, b) == 1


Q2 = FieldDesc.q2()
