"""Cross-lattice invariants and the representation / isometry deciders.

For a pair of lattices M (rank m, orders R_i, invariants alpha_i) and
N (rank n <= m, orders S_i, invariants beta_i) presented by good BONGs
<<a_1..a_m>> and <<b_1..b_n>>, the bracket invariant is

    d[eps a_{1,i} b_{1,j}] = min(d(eps a_1..a_i b_1..b_j), alpha_i, beta_j)

with alpha_i dropped when i is 0 or m and beta_j dropped when j is 0
or n, and the threshold controlling the depth conditions is

    A_i = min( (R_{i+1}-S_i)/2 + e,
               R_{i+1}-S_i + d[-a_{1,i+1} b_{1,i-1}],
               R_{i+1}+R_{i+2}-S_{i-1}-S_i + d[a_{1,i+2} b_{1,i-2}] )

where any term referencing an index outside [0, rank] is dropped.  For
n <= m-2 a tail value S_{n+1}+A_{n+1} extends the depth condition one
step past the small lattice.

Out-of-range orders are handled by symbolic sentinels: R_i = +inf for
i > m, S_i = -inf for i < 1 (and dually), never by large finite
numbers.  N is represented by M iff the underlying spaces represent and
the four conditions below all hold; the decider reports the first
failing condition in the order (space, i, ii, iii, iv) with the
smallest witness index.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    FieldMismatch,
    IndexOutOfRange,
    InputError,
    NotDefined,
    SpaceMismatch,
)
from .fields import INF, SquareClass, minus_one_class, quad_defect
from .bong import GoodBong, GramLattice, bong_from_gram
from .spaces import (
    space_from_classes,
    space_isometric,
    space_represents,
    zero_space,
)


def as_bong(obj, seed=0) -> GoodBong:
    if isinstance(obj, GoodBong):
        return obj
    if isinstance(obj, GramLattice):
        return bong_from_gram(obj, seed=seed)
    raise InputError(f"expected GramLattice or GoodBong, got {type(obj)!r}")


class Decision:
    """Representation verdict plus the condition trace that produced it."""

    def __init__(self, verdict, failing_condition=None, witness_index=None,
                 trace=None):
        self.verdict = verdict  # "represents" | "fails"
        self.failing_condition = failing_condition
        self.witness_index = witness_index
        self.trace = trace or []

    @property
    def represents(self):
        return self.verdict == "represents"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "failing_condition": self.failing_condition,
            "witness_index": self.witness_index,
            "trace": self.trace,
        }

    def __repr__(self):
        if self.represents:
            return "Decision(represents)"
        return (f"Decision(fails, condition={self.failing_condition}, "
                f"i={self.witness_index})")


class PairInvariants:
    """Memoized invariants of an ordered pair (M, N) of good BONGs."""

    def __init__(self, M: GoodBong, N: GoodBong):
        if M.field != N.field:
            raise FieldMismatch("lattices over different fields")
        self.field = M.field
        self.e = M.field.e
        self.M, self.N = M, N
        self.m, self.n = M.n, N.n
        self.R, self.S = M.R, N.R
        self.alpha, self.beta = M.alpha(), N.alpha()
        self._one = SquareClass.of(self.field.one)
        self._mone = minus_one_class(self.field)
        self._pa = [M.prefix_class(i) for i in range(self.m + 1)]
        self._pb = [N.prefix_class(j) for j in range(self.n + 1)]
        self._dmemo = {}

    # -- sentinel order lookups (Convention: out-of-range orders) ---------

    def Rv(self, i):
        if 1 <= i <= self.m:
            return self.R[i - 1]
        return INF if i > self.m else -INF

    def Sv(self, i):
        if 1 <= i <= self.n:
            return self.S[i - 1]
        return INF if i > self.n else -INF

    # -- d[eps a_{1,i} b_{1,j}] -------------------------------------------

    def d_bracket(self, sign, i, j):
        """d[eps a_{1,i} b_{1,j}] for eps = +-1; None if out of range."""
        if not (0 <= i <= self.m and 0 <= j <= self.n):
            return None
        key = (sign, i, j)
        if key in self._dmemo:
            return self._dmemo[key]
        cls = self._pa[i] * self._pb[j]
        if sign < 0:
            cls = cls * self._mone
        vals = [cls.defect()]
        if 0 < i < self.m:
            vals.append(self.alpha[i - 1])
        if 0 < j < self.n:
            vals.append(self.beta[j - 1])
        out = min(vals)
        self._dmemo[key] = out
        return out

    def d_self(self, sign, i, j):
        """d[eps a_{i,j}] = d[eps a_{1,i-1} a_{1,j}] on the M side."""
        if not (0 <= i - 1 <= j <= self.m):
            return None
        cls = self._pa[i - 1] * self._pa[j]
        if sign < 0:
            cls = cls * self._mone
        vals = [cls.defect()]
        if 0 < i - 1 < self.m:
            vals.append(self.alpha[i - 2])
        if 0 < j < self.m:
            vals.append(self.alpha[j - 1])
        return min(vals)

    # -- A_i and friends ----------------------------------------------------

    def big_A(self, i):
        """A_i for 1 <= i <= min(m-1, n)."""
        if not 1 <= i <= min(self.m - 1, self.n):
            raise IndexOutOfRange(f"A_{i} undefined for ranks ({self.m},{self.n})")
        e = self.e
        terms = [Fraction(self.R[i] - self.S[i - 1], 2) + e]
        d2 = self.d_bracket(-1, i + 1, i - 1)
        if d2 is not None:
            terms.append(self.R[i] - self.S[i - 1] + d2)
        if i + 2 <= self.m and i - 2 >= 0:
            d3 = self.d_bracket(+1, i + 2, i - 2)
            terms.append(self.R[i] + self.R[i + 1]
                         - self.Sv(i - 1) - self.S[i - 1] + d3)
        return min(terms)

    def tail_A(self):
        """S_{n+1} + A_{n+1}, defined when n <= m - 2."""
        if self.n > self.m - 2:
            raise NotDefined("tail A needs n <= m - 2")
        n = self.n
        terms = [self.R[n + 1] + self.d_bracket(-1, n + 2, n)]
        if n + 3 <= self.m:
            terms.append(self.R[n + 1] + self.R[n + 2] - self.S[n - 1]
                         + self.d_bracket(+1, n + 3, n - 1))
        return min(terms)

    def a_prime(self, i):
        """A'_i: the A_i minimum without its halved first term."""
        if not 1 <= i <= min(self.m - 1, self.n):
            raise IndexOutOfRange(f"A'_{i} undefined")
        terms = [self.R[i] - self.S[i - 1] + self.d_bracket(-1, i + 1, i - 1)]
        if i + 2 <= self.m and i - 2 >= 0:
            terms.append(self.R[i] + self.R[i + 1] - self.Sv(i - 1)
                         - self.S[i - 1] + self.d_bracket(+1, i + 2, i - 2))
        return min(terms)

    def a_tilde(self, i):
        """(A~_i, A~'_i); defined when R_{i+1}+R_{i+2} > S_{i-1}+S_i."""
        if not 1 <= i <= min(self.m - 1, self.n):
            raise IndexOutOfRange(f"A~_{i} undefined")
        if not self.Rv(i + 1) + self.Rv(i + 2) > self.Sv(i - 1) + self.Sv(i):
            raise NotDefined("guard R_{i+1}+R_{i+2} > S_{i-1}+S_i fails")
        terms = [self.R[i] - self.S[i - 1] + self.d_bracket(-1, i + 1, i - 1)]
        if 2 <= i <= self.m - 2:
            terms.append(2 * self.R[i] - self.S[i - 2] - self.S[i - 1]
                         + self.alpha[i])
            terms.append(self.R[i] + self.R[i + 1] - 2 * self.S[i - 1]
                         + self.beta[i - 2])
        tilde_prime = min(terms)
        tilde = min(Fraction(self.R[i] - self.S[i - 1], 2) + self.e, tilde_prime)
        return tilde, tilde_prime

    def essential_indices(self):
        """Indices i with R_{i+1} > S_{i-1} and R_{i+1}+R_{i+2} > S_{i-2}+S_{i-1}."""
        out = set()
        for i in range(1, min(self.m, self.n + 1) + 1):
            if (self.Rv(i + 1) > self.Sv(i - 1)
                    and self.Rv(i + 1) + self.Rv(i + 2)
                    > self.Sv(i - 2) + self.Sv(i - 1)):
                out.add(i)
        return out

    # -- prefix spaces -------------------------------------------------------

    def space_M_prefix(self, i):
        return self.M.prefix_space(i)

    def space_N_prefix(self, j):
        return self.N.prefix_space(j)


def d_bracket(P: PairInvariants, sign, i, j):
    return P.d_bracket(sign, i, j)


def big_A(P: PairInvariants, i):
    return P.big_A(i)


def a_prime_and_tilde(P: PairInvariants, i):
    """(A'_i, (A~_i, A~'_i) or None when the guard fails)."""
    prime = P.a_prime(i)
    try:
        tilde = P.a_tilde(i)
    except NotDefined:
        tilde = None
    return prime, tilde


def essential_indices(P: PairInvariants):
    return P.essential_indices()


# ---------------------------------------------------------------------------
# the main decision procedure
# ---------------------------------------------------------------------------

def _fmt(v):
    return str(v)


def repr_decide(N, M, seed=0) -> Decision:
    """Decide whether N is represented by M (rank N <= rank M).

    Checks the space condition FN -> FM, then the four lattice-level
    conditions; returns the first failure with its witness index.
    """
    bN = as_bong(N, seed=seed)
    bM = as_bong(M, seed=seed)
    if bN.field != bM.field:
        raise FieldMismatch("lattices over different fields")
    if bN.n > bM.n:
        raise InputError("rank N must not exceed rank M")
    return decide_from_bongs(bN, bM)


def decide_from_bongs(bN: GoodBong, bM: GoodBong) -> Decision:
    P = PairInvariants(bM, bN)
    m, n, e = P.m, P.n, P.e
    trace = []

    if not space_represents(bN.space(), bM.space()):
        trace.append({"condition": "space", "ok": False})
        return Decision("fails", "space", None, trace)
    trace.append({"condition": "space", "ok": True})

    # (i): R(M) <= R(N) in the order on B
    for i in range(1, n + 1):
        ok = P.R[i - 1] <= P.S[i - 1] or (
            1 < i < m and P.R[i - 1] + P.R[i] <= P.S[i - 2] + P.S[i - 1])
        trace.append({"condition": "i", "i": i, "ok": ok,
                      "detail": f"R{i}={P.R[i-1]} S{i}={P.S[i-1]}"})
        if not ok:
            return Decision("fails", "i", i, trace)

    # (ii): d[a_{1,i} b_{1,i}] >= A_i
    for i in range(1, min(m - 1, n) + 1):
        lhs = P.d_bracket(+1, i, i)
        rhs = P.big_A(i)
        ok = lhs >= rhs
        trace.append({"condition": "ii", "i": i, "ok": ok,
                      "detail": f"d[a(1,{i})b(1,{i})]={_fmt(lhs)} A_{i}={_fmt(rhs)}"})
        if not ok:
            return Decision("fails", "ii", i, trace)

    # (iii): depth condition forces prefix space representation
    for i in range(2, min(m - 1, n + 1) + 1):
        if not P.Rv(i + 1) > P.Sv(i - 1):
            continue
        if i <= n:
            fire = P.big_A(i - 1) + P.big_A(i) > 2 * e + P.R[i - 1] - P.S[i - 1]
            detail = f"A_{i-1}+A_{i} vs 2e+R{i}-S{i}"
        else:  # i = n + 1, uses the tail value
            fire = P.big_A(n) + P.tail_A() > 2 * e + P.R[n]
            detail = f"A_{n}+(S{n+1}+A{n+1}) vs 2e+R{n+1}"
        if not fire:
            continue
        ok = space_represents(P.space_N_prefix(i - 1), P.space_M_prefix(i))
        trace.append({"condition": "iii", "i": i, "ok": ok, "detail": detail})
        if not ok:
            return Decision("fails", "iii", i, trace)

    # (iv): scale-jump condition forces a two-step prefix representation
    for i in range(2, min(m - 2, n + 1) + 1):
        if not (P.Sv(i) >= P.Rv(i + 2) or i == n + 1):
            continue
        if not (P.Rv(i + 2) > P.Sv(i - 1) + 2 * e
                and P.Sv(i - 1) + 2 * e >= P.Rv(i + 1) + 2 * e):
            continue
        ok = space_represents(P.space_N_prefix(i - 1), P.space_M_prefix(i + 1))
        trace.append({"condition": "iv", "i": i, "ok": ok})
        if not ok:
            return Decision("fails", "iv", i, trace)

    return Decision("represents", trace=trace)


# ---------------------------------------------------------------------------
# rank padding (reduction to equal rank)
# ---------------------------------------------------------------------------

def realize_diagonal_space(field, dim, det: SquareClass, hasse: int):
    """Diagonal entries of a space with the given invariants, or None."""
    from .fields import hilbert_class
    from .spaces import _exists_space

    if not _exists_space(field, dim, det, hasse):
        return None
    if dim == 0:
        return []
    if dim == 1:
        return [det.rep]
    reps = [SquareClass.of(u) for u in field.square_class_reps()]
    if dim == 2:
        for c1 in reps:
            c2 = det * c1
            if hilbert_class(c1, c2) == hasse:
                return [c1.rep, c2.rep]
        return None
    for c1 in reps:
        det_rest = det * c1
        hasse_rest = hasse * hilbert_class(c1, det_rest)
        sub = realize_diagonal_space(field, dim - 1, det_rest, hasse_rest)
        if sub is not None:
            return [c1.rep] + sub
    return None


def complement_lattice(N, M) -> GramLattice:
    """A lattice K with FM = FN perp FK (diagonal construction)."""
    bN, bM = as_bong(N), as_bong(M)
    VN, VM = bN.space(), bM.space()
    if not space_represents(VN, VM):
        raise SpaceMismatch("FN is not represented by FM")
    from .spaces import space_complement
    W = space_complement(VM, VN)
    if W.dim == 0:
        raise SpaceMismatch("ranks already equal")
    entries = realize_diagonal_space(bN.field, W.dim, W.det, W.hasse)
    return GramLattice.diagonal(bN.field, entries)


def stabilization_exponent(N, M, K: GramLattice) -> int:
    """Smallest s with R_1(pi^s K) beyond every order in play plus 4e+4."""
    bN, bM = as_bong(N), as_bong(M)
    target = max(max(bN.R), max(bM.R)) + 4 * bN.field.e + 4
    base = K.norm_order()
    s = 0
    while base + 2 * s <= target:
        s += 1
    return s


def pad_to_equal_rank(N, M, K: GramLattice, s: int) -> GramLattice:
    """N perp pi^s K; with s at the stabilization bound the verdict of
    repr_decide against M is unchanged and stable in s."""
    bN, bM = as_bong(N), as_bong(M)
    latN = N if isinstance(N, GramLattice) else gram_of(bN)
    if K.n == 0:
        return latN
    VM = bM.space()
    if not space_isometric(VM, bN.space().perp(K.space())):
        raise SpaceMismatch("FM is not FN perp FK")
    return latN.perp(K.scaled(s))


def gram_of(b: GoodBong) -> GramLattice:
    from .bong import gram_from_bong
    return gram_from_bong(b)


# ---------------------------------------------------------------------------
# isometry classification
# ---------------------------------------------------------------------------

def classify(L1, L2, seed=0) -> bool:
    """Whether L1 and L2 are isometric lattices."""
    b1 = as_bong(L1, seed=seed)
    b2 = as_bong(L2, seed=seed)
    if b1.field != b2.field:
        raise FieldMismatch("lattices over different fields")
    if b1.n != b2.n:
        return False
    if not space_isometric(b1.space(), b2.space()):
        return False
    n = b1.n
    if b1.R != b2.R:
        return False
    alpha, beta = b1.alpha(), b2.alpha()
    if alpha != beta:
        return False
    for i in range(1, n):
        if (b1.prefix_class(i) * b2.prefix_class(i)).defect() < alpha[i - 1]:
            return False
    e = b1.field.e
    for i in range(2, n):
        if alpha[i - 2] + alpha[i - 1] > 2 * e:
            if not space_represents(b2.prefix_space(i - 1), b1.prefix_space(i)):
                return False
    return True
