"""Quadratic spaces over a dyadic field as (dim, det, Hasse) invariants.

The triple (dimension, determinant square class, Hasse symbol) is a
complete isometry invariant over a local field, so spaces are carried
around as these invariants only; no vectors or matrices appear.  The
Hasse symbol follows the accumulation convention

    S([a]) = +1,      S(V perp [a]) = S(V) * (det V, a)

(equivalently S([a_1,...,a_n]) = prod_{i<j} (a_i, a_j)).  Two
conventions circulate; all parity bookkeeping downstream assumes this
one, so it is fixed here in one place.
"""

from __future__ import annotations

from .errors import DimensionMismatch, InputError, LengthMismatch, SpaceMismatch
from .fields import FieldDesc, SquareClass, hilbert_class, minus_one_class


class QSpace:
    """A regular quadratic space, by (dim, det class, Hasse symbol)."""

    __slots__ = ("field", "dim", "det", "hasse")

    def __init__(self, field: FieldDesc, dim: int, det: SquareClass, hasse: int):
        if dim < 0 or hasse not in (1, -1):
            raise InputError("bad quadratic space data")
        if dim == 0 and (not det.is_one() or hasse != 1):
            raise InputError("the zero space has det 1 and hasse +1")
        if dim == 1 and hasse != 1:
            raise InputError("unary spaces have hasse +1 under this convention")
        if dim == 2 and det == minus_one_class(field) and hasse != 1:
            raise InputError("binary spaces of det -1 are hyperbolic (hasse +1)")
        self.field = field
        self.dim = dim
        self.det = det
        self.hasse = hasse

    def __eq__(self, other):
        return (isinstance(other, QSpace) and self.field == other.field
                and self.dim == other.dim and self.det == other.det
                and self.hasse == other.hasse)

    def __hash__(self):
        return hash((self.field, self.dim, self.det, self.hasse))

    def __repr__(self):
        return f"QSpace(dim={self.dim}, det={self.det.rep!r}, hasse={self.hasse:+d})"

    def perp(self, other: "QSpace") -> "QSpace":
        """Orthogonal sum."""
        if self.field != other.field:
            raise InputError("spaces over different fields")
        if self.dim == 0:
            return other
        if other.dim == 0:
            return self
        hasse = (self.hasse * other.hasse
                 * hilbert_class(self.det, other.det))
        return QSpace(self.field, self.dim + other.dim,
                      self.det * other.det, hasse)


def zero_space(field: FieldDesc) -> QSpace:
    one = SquareClass.of(field.one)
    return QSpace(field, 0, one, 1)


def space_from_diag(entries) -> QSpace:
    """The space [a_1, ..., a_n] of a diagonal form (entries nonzero)."""
    if not entries:
        raise InputError("need the field to build the zero space; use zero_space")
    field = entries[0].field
    V = zero_space(field)
    for a in entries:
        if a.is_zero():
            raise InputError("diagonal entries must be nonzero")
        c = SquareClass.of(a)
        hasse = V.hasse * (hilbert_class(V.det, c) if V.dim else 1)
        V = QSpace(field, V.dim + 1, V.det * c, hasse)
    return V


def space_from_classes(field, classes) -> QSpace:
    V = zero_space(field)
    for c in classes:
        hasse = V.hasse * (hilbert_class(V.det, c) if V.dim else 1)
        V = QSpace(field, V.dim + 1, V.det * c, hasse)
    return V


def is_isotropic(V: QSpace) -> bool:
    """Whether V represents zero nontrivially."""
    field = V.field
    mone = minus_one_class(field)
    if V.dim >= 5:
        return True
    if V.dim == 4:
        # the unique anisotropic quaternary has square det and the
        # Hasse value opposite to every isotropic det-square space
        return not (V.det.is_one() and V.hasse == -hilbert_class(mone, mone))
    if V.dim == 3:
        minus_det = mone * V.det
        return V.hasse == hilbert_class(mone, minus_det)
    if V.dim == 2:
        return V.det == mone
    return False


def _exists_space(field, dim, det, hasse) -> bool:
    # is there a space with these would-be invariants?
    if dim < 0:
        return False
    if dim == 0:
        return det.is_one() and hasse == 1
    if dim == 1:
        return hasse == 1
    if dim == 2:
        return not (det == minus_one_class(field) and hasse == -1)
    return True


def space_represents(U: QSpace, V: QSpace) -> bool:
    """Whether V = U perp W for some space W (Witt-exact bookkeeping)."""
    if U.field != V.field:
        raise InputError("spaces over different fields")
    if U.dim > V.dim:
        raise DimensionMismatch(f"dim U = {U.dim} > dim V = {V.dim}")
    dim_w = V.dim - U.dim
    det_w = V.det * U.det
    if U.dim == 0:
        hasse_w = V.hasse
    else:
        hasse_w = V.hasse * U.hasse * hilbert_class(U.det, det_w)
    return _exists_space(U.field, dim_w, det_w, hasse_w)


def space_complement(V: QSpace, W: QSpace) -> QSpace:
    """The space U with V = W perp U (requires W -> V)."""
    if not space_represents(W, V):
        raise SpaceMismatch("W is not represented by V")
    dim_u = V.dim - W.dim
    det_u = V.det * W.det
    if W.dim == 0:
        hasse_u = V.hasse
    else:
        hasse_u = V.hasse * W.hasse * hilbert_class(W.det, det_u)
    return QSpace(V.field, dim_u, det_u, hasse_u)


def space_isometric(U: QSpace, V: QSpace) -> bool:
    if U.field != V.field:
        raise InputError("spaces over different fields")
    return U.dim == V.dim and U.det == V.det and U.hasse == V.hasse


def represents_value(V: QSpace, c: SquareClass) -> bool:
    """Whether V represents the value c (as a quadratic form)."""
    one_dim = QSpace(V.field, 1, c, 1)
    return space_represents(one_dim, V)


def _prod_class(entries):
    c = SquareClass.of(entries[0])
    for a in entries[1:]:
        c = c * SquareClass.of(a)
    return c


def four_statement_parity(a, b, c, case: str) -> bool:
    """Evaluate the four linked statements; True iff an even number hold.

    Cases follow the three shapes of linked representation statements:
    three space representations among diagonal prefixes of a, b, c and
    one Hilbert-symbol equation.  Expected lengths, with i = len(b) for
    case (i)/(iii)-style indexing:

        case i:   len(a) = i, len(b) = i, len(c) = i - 1
        case ii:  len(a) = i + 1, len(b) = i, len(c) = i - 1
        case iii: len(a) = i, len(b) = i - 1, len(c) = i - 1
    """
    field = a[0].field if a else (b[0].field if b else c[0].field)

    def diag(entries):
        return space_from_classes(field, [SquareClass.of(x) for x in entries])

    def prod(entries):
        cls = SquareClass.of(field.one)
        for x in entries:
            cls = cls * SquareClass.of(x)
        return cls

    mone = minus_one_class(field)
    if case == "i":
        i = len(b)
        if len(a) != i or len(c) != i - 1 or i < 1:
            raise LengthMismatch("case (i) needs lengths (i, i, i-1)")
        s1 = space_represents(diag(b[:i - 1]), diag(a[:i]))
        s2 = space_represents(diag(c[:i - 1]), diag(b[:i]))
        s3 = space_represents(diag(c[:i - 1]), diag(a[:i]))
        s4 = hilbert_class(prod(a[:i]) * prod(b[:i]),
                           prod(b[:i - 1]) * prod(c[:i - 1])) == 1
    elif case == "ii":
        i = len(b)
        if len(a) != i + 1 or len(c) != i - 1 or i < 1:
            raise LengthMismatch("case (ii) needs lengths (i+1, i, i-1)")
        s1 = space_represents(diag(b[:i]), diag(a[:i + 1]))
        s2 = space_represents(diag(c[:i - 1]), diag(b[:i]))
        s3 = space_represents(diag(c[:i - 1]), diag(a[:i]))
        s4 = hilbert_class(prod(a[:i]) * prod(b[:i]),
                           mone * prod(a[:i + 1]) * prod(c[:i - 1])) == 1
    elif case == "iii":
        i = len(a)
        if len(b) != i - 1 or len(c) != i - 1 or i < 2:
            raise LengthMismatch("case (iii) needs lengths (i, i-1, i-1)")
        s1 = space_represents(diag(b[:i - 1]), diag(a[:i]))
        s2 = space_represents(diag(c[:i - 2]), diag(b[:i - 1]))
        s3 = space_represents(diag(c[:i - 1]), diag(a[:i]))
        s4 = hilbert_class(prod(b[:i - 1]) * prod(c[:i - 1]),
                           mone * prod(a[:i]) * prod(c[:i - 2])) == 1
    else:
        raise InputError(f"unknown case {case!r}")
    return (int(s1) + int(s2) + int(s3) + int(s4)) % 2 == 0
