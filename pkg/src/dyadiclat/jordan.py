"""Jordan splittings and the approximation path to the main decision.

A Jordan splitting L = L_1 perp ... perp L_t decomposes the lattice
into modular components with strictly increasing scale orders r_k.
The splitting is computed by symmetric integral pivoting: a diagonal
entry attaining the scale splits off a unary block, otherwise an
off-diagonal entry attaining it splits off a binary block; blocks of
equal scale are grouped into one component.

The data (r_k, u_k, n_k) with u_k = ord n(L^{s_k}) feeds the
approximation machinery: X_i approximates the square class of the
product a_1...a_i of any good BONG (signed partial determinants and
norm generators), and V_i approximates the prefix space [a_1,...,a_i].
`repr_decide_jordan` reruns the main decision with every d-value and
every prefix-space test computed from these approximations instead of
BONG entries; agreement with the BONG path is a structural cross-check
exercised heavily by the test suite.
"""

from __future__ import annotations

from .errors import FieldMismatch, InputError
from .fields import INF, SquareClass, minus_one_class
from .bong import GramLattice, GoodBong, _dot
from .spaces import (
    QSpace,
    space_complement,
    space_from_classes,
    space_represents,
    zero_space,
)


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

def block_diagonalize(lat: GramLattice):
    """Unimodular change of basis making the Gram block diagonal.

    Returns (blocks, transform): blocks is a list of 1x1 / 2x2
    GramLattices with nondecreasing scale orders, transform T satisfies
    T^t G T = blockdiag (T columns = new basis, unimodular over o).
    """
    field = lat.field
    n = lat.n
    G = [list(row) for row in lat.gram]
    T = [[field.one if i == j else field.zero for j in range(n)]
         for i in range(n)]

    def swap(a, b):
        if a == b:
            return
        G[a], G[b] = G[b], G[a]
        for row in G:
            row[a], row[b] = row[b], row[a]
        for row in T:
            row[a], row[b] = row[b], row[a]

    def col_op(dst, src, c):
        # x_dst <- x_dst - c * x_src
        for r in range(n):
            G[r][dst] = G[r][dst] - c * G[r][src]
        for r in range(n):
            G[dst][r] = G[dst][r] - c * G[src][r]
        for r in range(n):
            T[r][dst] = T[r][dst] - c * T[r][src]

    blocks = []
    start = 0
    while start < n:
        s = INF
        for i in range(start, n):
            for j in range(start, n):
                if not G[i][j].is_zero():
                    s = min(s, G[i][j].ord())
        diag = next((i for i in range(start, n)
                     if not G[i][i].is_zero() and G[i][i].ord() == s), None)
        if diag is not None:
            swap(start, diag)
            inv = G[start][start].inverse()
            for r in range(start + 1, n):
                if not G[r][start].is_zero():
                    col_op(r, start, G[r][start] * inv)
            blocks.append((int(s), 1))
            start += 1
        else:
            i, j = next((i, j) for i in range(start, n)
                        for j in range(i + 1, n)
                        if not G[i][j].is_zero() and G[i][j].ord() == s)
            swap(start, i)
            swap(start + 1, j if j != start else i)
            a, b, c = G[start][start], G[start][start + 1], G[start + 1][start + 1]
            det = a * c - b * b
            det_inv = det.inverse()
            for r in range(start + 2, n):
                g0, g1 = G[r][start], G[r][start + 1]
                if g0.is_zero() and g1.is_zero():
                    continue
                c0 = (g0 * c - g1 * b) * det_inv
                c1 = (g1 * a - g0 * b) * det_inv
                if not c0.is_zero():
                    col_op(r, start, c0)
                if not c1.is_zero():
                    col_op(r, start + 1, c1)
            blocks.append((int(s), 2))
            start += 2
    # sort blocks by scale order with a stable basis permutation
    order = []
    pos = 0
    for s, size in blocks:
        order.append((s, pos, size))
        pos += size
    order.sort(key=lambda t: (t[0], t[1]))
    perm = []
    for s, p, size in order:
        perm.extend(range(p, p + size))
    Gp = [[G[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    Tp = [[T[i][perm[j]] for j in range(n)] for i in range(n)]
    out_blocks = []
    i = 0
    for s, p, size in order:
        sub = [[Gp[i + a][i + b] for b in range(size)] for a in range(size)]
        out_blocks.append(GramLattice(lat.field, sub))
        i += size
    return out_blocks, Tp


class JordanSplitting:
    """Components grouped by scale, with (r_k, u_k, n_k) invariants."""

    def __init__(self, lat: GramLattice):
        self.field = lat.field
        self.lat = lat
        blocks, self.transform = block_diagonalize(lat)
        comps = []
        for b in blocks:
            if comps and b.scale_order() == comps[-1][0]:
                comps[-1][1].append(b)
            else:
                comps.append([b.scale_order(), [b]])
        self.components = []
        for s, bl in comps:
            lat_k = bl[0]
            for extra in bl[1:]:
                lat_k = lat_k.perp(extra)
            self.components.append(lat_k)
        self.t = len(self.components)
        self.r = [int(c.scale_order()) for c in self.components]
        self.n_cum = []
        acc = 0
        for c in self.components:
            acc += c.n
            self.n_cum.append(acc)
        g = [int(c.norm_order()) for c in self.components]
        self.u = [min(g[j] + 2 * max(0, self.r[k] - self.r[j])
                      for j in range(self.t)) for k in range(self.t)]

    def truncated_norm_order(self, r: int) -> int:
        """ord n(L^{p^r}), interpolated from the component data."""
        g = [int(c.norm_order()) for c in self.components]
        return min(g[j] + 2 * max(0, r - self.r[j]) for j in range(self.t))

    def norm_generator_value(self, k: int, prefer: int | None = None):
        """A_k: a value generating n(L^{s_k}), from an attaining component.

        With prefer=j, component j is used when it attains the norm (so
        the value lies in Q(L_j), needed at unary-binary boundaries).
        """
        g = [int(c.norm_order()) for c in self.components]
        attaining = [j for j in range(self.t)
                     if g[j] + 2 * max(0, self.r[k] - self.r[j]) == self.u[k]]
        j = prefer if prefer in attaining else attaining[0]
        comp = self.components[j]
        val = _component_norm_generator(comp)
        shift = max(0, self.r[k] - self.r[j])
        return val * self.field.pi_pow(2 * shift)

    def component_space(self, k: int) -> QSpace:
        """F(L_1 perp ... perp L_k)."""
        V = zero_space(self.field)
        for c in self.components[:k]:
            V = V.perp(c.space())
        return V


def _component_norm_generator(comp: GramLattice):
    """First diagonal entry attaining the norm, else a two-vector value."""
    u = comp.norm_order()
    for i in range(comp.n):
        g = comp.gram[i][i]
        if not g.is_zero() and g.ord() == u:
            return g
    for i in range(comp.n):
        for j in range(i + 1, comp.n):
            q = comp.gram[i][i] + comp.gram[j][j] + comp.gram[i][j] * comp.field.two
            if not q.is_zero() and q.ord() == u:
                return q
    raise InputError("component norm not attained on the candidate set")


def jordan_split(lat: GramLattice) -> JordanSplitting:
    return JordanSplitting(lat)


# ---------------------------------------------------------------------------
# approximations
# ---------------------------------------------------------------------------

class Approximation:
    """Square class X_i (and optionally a space V_i) approximating the
    depth-i data of the lattice."""

    def __init__(self, index, x_class=None, space=None, side="both"):
        self.index = index
        self.X = x_class
        self.V = space
        self.side = side

    def __repr__(self):
        return f"Approximation(i={self.index}, X={self.X}, V={self.V}, side={self.side})"


def approximate_X(bong: GoodBong, split: JordanSplitting, i: int) -> Approximation:
    """X_i: a square class with d(a_{1,i} X_i) >= alpha_i.

    Built from signed partial determinants of the splitting and norm
    generators; exact at i = 0 and i = n.
    """
    field = split.field
    n = split.n_cum[-1] if split.t else 0
    one = SquareClass.of(field.one)
    if i == 0:
        return Approximation(0, one)
    if i == n:
        det = one
        for k in range(split.t):
            det = det * SquareClass.of(split.components[k].det())
        return Approximation(n, det)
    k = next(k for k in range(split.t) if i <= split.n_cum[k])
    n_prev = split.n_cum[k - 1] if k else 0
    det_prev = one
    for kk in range(k):
        det_prev = det_prev * SquareClass.of(split.components[kk].det())
    mone = minus_one_class(field)
    if (i - n_prev) % 2 == 0:
        x = det_prev
        if ((i - n_prev) // 2) % 2 == 1:
            x = x * mone
    else:
        x = det_prev * SquareClass.of(split.norm_generator_value(k))
        if ((i - n_prev - 1) // 2) % 2 == 1:
            x = x * mone
    return Approximation(i, x)


def _delta_twisted_norm_gen(split: JordanSplitting, k: int):
    return split.norm_generator_value(k) * split.field.delta()


def approximate_V(bong: GoodBong, split: JordanSplitting, i: int) -> Approximation:
    """V_i: a space of dimension i whose det approximates a_{1,i} and
    which stands in for the prefix space [a_1,...,a_i] in depth tests.

    Components are indexed 0-based here; split.component_space(k) is
    the space of the first k components, i.e. the (1-based) L_(k).
    """
    field = split.field
    n = bong.n
    if not 1 <= i <= n - 1:
        raise InputError("V_i defined for 1 <= i <= n-1")
    R = bong.R
    x_cls = approximate_X(bong, split, i).X
    n_cum = split.n_cum
    if i in n_cum:
        # i = n_k: V_i is the space of the first components themselves
        k = n_cum.index(i) + 1
        return Approximation(i, x_cls, split.component_space(k), "both")
    kk = next(k for k in range(split.t) if i < n_cum[k])
    n_prev = n_cum[kk - 1] if kk else 0
    is_first = i == n_prev + 1
    is_last = i == n_cum[kk] - 1
    if is_first and is_last and \
            (i == n - 1 or R[i - 1] < R[i + 1]) and (i == 1 or R[i - 2] < R[i]):
        # binary component carrying the norm of its scale truncation:
        # V_i = L_(kk) perp [A], A a represented norm generator
        gen_val = split.norm_generator_value(kk, prefer=kk)
        left = split.component_space(kk)
        one_dim = QSpace(field, 1, SquareClass.of(gen_val), 1)
        return Approximation(i, x_cls, left.perp(one_dim), "both")
    if is_first and i + 1 <= n - 1 and R[i - 1] == R[i + 1]:
        # one past a component boundary with matching orders
        gen = SquareClass.of(split.norm_generator_value(kk))
        V = split.component_space(kk).perp(QSpace(field, 1, gen, 1))
        return Approximation(i, x_cls, V, "both")
    if is_last and i - 2 >= 0 and R[i - 2] == R[i]:
        # one short of a component boundary: V_i = L_(kk+1) minus [A];
        # twist A by Delta when the ternary-anisotropic corner blocks it
        base = split.component_space(kk + 1)
        gen_val = split.norm_generator_value(kk)
        one_dim = QSpace(field, 1, SquareClass.of(gen_val), 1)
        if not space_represents(one_dim, base):
            one_dim = QSpace(field, 1,
                             SquareClass.of(gen_val * field.delta()), 1)
        V = space_complement(base, one_dim)
        return Approximation(i, x_cls, V, "both")
    # interior of a component: orders repeat, so any space of dimension i
    # with determinant class X_i does the job
    one = SquareClass.of(field.one)
    classes = [one] * (i - 1) + [x_cls]
    return Approximation(i, x_cls, space_from_classes(field, classes), "both")


# ---------------------------------------------------------------------------
# decision along the Jordan path
# ---------------------------------------------------------------------------

def repr_decide_jordan(N, M, seed=0):
    """The main decision with d-values and prefix spaces taken from
    Jordan-splitting approximations; must agree with repr_decide."""
    from .representation import Decision, PairInvariants, as_bong

    bN, bM = as_bong(N, seed=seed), as_bong(M, seed=seed)
    if bN.field != bM.field:
        raise FieldMismatch("lattices over different fields")
    latN = N if isinstance(N, GramLattice) else None
    latM = M if isinstance(M, GramLattice) else None
    from .bong import gram_from_bong
    if latN is None:
        latN = gram_from_bong(bN)
    if latM is None:
        latM = gram_from_bong(bM)
    sN, sM = jordan_split(latN), jordan_split(latM)
    m, n = bM.n, bN.n
    e = bM.field.e
    field = bM.field

    X = {i: approximate_X(bM, sM, i).X for i in range(m + 1)}
    Y = {j: approximate_X(bN, sN, j).X for j in range(n + 1)}
    alpha, beta = bM.alpha(), bN.alpha()
    mone = minus_one_class(field)

    def dX(sign, i, j):
        if not (0 <= i <= m and 0 <= j <= n):
            return None
        cls = X[i] * Y[j]
        if sign < 0:
            cls = cls * mone
        vals = [cls.defect()]
        if 0 < i < m:
            vals.append(alpha[i - 1])
        if 0 < j < n:
            vals.append(beta[j - 1])
        return min(vals)

    P = PairInvariants(bM, bN)
    R, S = P.R, P.S

    def big_A(i):
        from fractions import Fraction
        terms = [Fraction(R[i] - S[i - 1], 2) + e]
        d2 = dX(-1, i + 1, i - 1)
        if d2 is not None:
            terms.append(R[i] - S[i - 1] + d2)
        if i + 2 <= m and i - 2 >= 0:
            terms.append(R[i] + R[i + 1] - S[i - 2] - S[i - 1]
                         + dX(+1, i + 2, i - 2))
        return min(terms)

    def tail_A():
        terms = [R[n + 1] + dX(-1, n + 2, n)]
        if n + 3 <= m:
            terms.append(R[n + 1] + R[n + 2] - S[n - 1] + dX(+1, n + 3, n - 1))
        return min(terms)

    def V_M(i):
        if i == 0:
            return zero_space(field)
        if i == m:
            return bM.space()
        return approximate_V(bM, sM, i).V

    def W_N(j):
        if j == 0:
            return zero_space(field)
        if j == n:
            return bN.space()
        return approximate_V(bN, sN, j).V

    trace = []
    if not space_represents(bN.space(), bM.space()):
        return Decision("fails", "space", None, [{"condition": "space", "ok": False}])

    for i in range(1, n + 1):
        ok = R[i - 1] <= S[i - 1] or (
            1 < i < m and R[i - 1] + R[i] <= S[i - 2] + S[i - 1])
        if not ok:
            return Decision("fails", "i", i, trace)

    for i in range(1, min(m - 1, n) + 1):
        if dX(+1, i, i) < big_A(i):
            return Decision("fails", "ii", i, trace)

    for i in range(2, min(m - 1, n + 1) + 1):
        if not P.Rv(i + 1) > P.Sv(i - 1):
            continue
        if i <= n:
            fire = big_A(i - 1) + big_A(i) > 2 * e + R[i - 1] - S[i - 1]
        else:
            fire = big_A(n) + tail_A() > 2 * e + R[n]
        if fire and not space_represents(W_N(i - 1), V_M(i)):
            return Decision("fails", "iii", i, trace)

    for i in range(2, min(m - 2, n + 1) + 1):
        if not (P.Sv(i) >= P.Rv(i + 2) or i == n + 1):
            continue
        if not (P.Rv(i + 2) > P.Sv(i - 1) + 2 * e
                and P.Sv(i - 1) >= P.Rv(i + 1)):
            continue
        if not space_represents(W_N(i - 1), V_M(i + 1)):
            return Decision("fails", "iv", i, trace)

    return Decision("represents", trace=trace)
