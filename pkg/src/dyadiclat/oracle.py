"""Ground truth by brute force: isometric embedding search mod pi^K.

Independent of every invariant computed elsewhere in the package: the
only inputs are the two Gram matrices.  The search looks for an
integral matrix X with  X^t Gram(M) X = Gram(N)  modulo pi^K, column
by column and pi-adic digit by digit, pruning each digit level by the
congruences mod pi^(l+1).  A full-depth witness is then certified
exactly: the residual is recomputed in exact arithmetic and accepted
when it clears the quantitative Newton threshold (residual order
strictly larger than twice the largest elementary-divisor order of the
linearized system), which guarantees an exact solution nearby.  A
witness that fails certification triggers escalation of K.

`no` is returned only after the full residue tree at precision K has
been exhausted.  K defaults to 2e + 2 + (valuation spread of the two
Gram matrices); that choice is validated empirically (stability under
K -> K+2, agreement with the structural decider) rather than by a
proven lifting bound, and any disagreement found downstream is a
first-class diagnostic, never auto-resolved.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import BudgetExhausted, FieldMismatch, InputError
from .fields import INF, FieldDesc, FieldElem, _rat_mod_int, ord2
from .bong import GramLattice, bong_from_gram


@dataclass
class SearchConfig:
    precision: int | None = None      # K; None = auto from the instance
    max_nodes: int = 400_000
    lift_slack: int = 2
    max_escalations: int = 2
    collect_witness: bool = True


@dataclass
class OracleOutcome:
    status: str                       # "yes" | "no" | "inconclusive"
    witness_matrix: list | None = None
    precision_used: int = 0
    nodes_used: int = 0

    @property
    def yes(self):
        return self.status == "yes"


# ---------------------------------------------------------------------------
# modular arithmetic layer: o/pi^K as tuples of ints
# ---------------------------------------------------------------------------

class ModRing:
    """Elements of o/pi^K as tuples of ints over the power basis."""

    def __init__(self, field: FieldDesc, K: int):
        self.field = field
        self.K = K
        self.D = field.degree
        self.mod_exps = field.coeff_modulus_exponents(K)
        self.masks = tuple((1 << max(m, 0)) - 1 for m in self.mod_exps)
        big = max(self.mod_exps) + field.e + 2
        self.bigmask = (1 << big) - 1
        self.phi_int = tuple(_rat_mod_int(c, big) for c in field.phi)
        # canonical masks for comparison at partial precision t
        self.level_masks = []
        for t in range(K + 1):
            exps = field.coeff_modulus_exponents(t)
            self.level_masks.append(tuple((1 << max(m, 0)) - 1 for m in exps))
        self.pi_pows = []
        p = self.from_elem(field.one)
        for _ in range(2 * K + 2):
            self.pi_pows.append(p)
            p = self.mul(p, self.from_elem(field.pi))

    def zero(self):
        return (0,) * self.D

    def from_elem(self, a: FieldElem):
        return tuple(_rat_mod_int(c, max(m, 0)) if m > 0 else 0
                     for c, m in zip(a.coeffs, self.mod_exps))

    def add(self, u, v):
        return tuple((a + b) & mk for a, b, mk in zip(u, v, self.masks))

    def mul(self, u, v):
        D = self.D
        if D == 1:
            return ((u[0] * v[0]) & self.masks[0],)
        out = [0] * (2 * D - 1)
        for i in range(D):
            a = u[i]
            if a:
                for j in range(D):
                    if v[j]:
                        out[i + j] += a * v[j]
        for k in range(2 * D - 2, D - 1, -1):
            top = out[k]
            if top:
                out[k] = 0
                for i in range(D):
                    out[k - D + i] -= top * self.phi_int[i]
        return tuple(c & mk for c, mk in zip(out, self.masks))

    def scale_int(self, c, u):
        return tuple((c * a) & mk for a, mk in zip(u, self.masks))

    def eq_mod_level(self, u, v, t):
        mk = self.level_masks[min(t, self.K)]
        return all((a & m) == (b & m) for a, b, m in zip(u, v, mk))

    def to_elem(self, u) -> FieldElem:
        return self.field.from_coeffs([Fraction(c) for c in u])


# ---------------------------------------------------------------------------
# the embedding search
# ---------------------------------------------------------------------------

def _entry_orders(lat: GramLattice):
    out = []
    for row in lat.gram:
        for g in row:
            if not g.is_zero():
                out.append(int(g.ord()))
    return out


def _auto_precision(latN: GramLattice, latM: GramLattice) -> int:
    e = latM.field.e
    orders = _entry_orders(latN) + _entry_orders(latM)
    spread = max(orders) - min(0, min(orders)) if orders else 0
    return 2 * e + 2 + max(0, spread)


def _digit_vectors(field: FieldDesc, m: int):
    """All residue-digit vectors of length m, canonical order, as lifts."""
    lifts = [field.lift_residue(r) for r in range(field.residue.size)]
    return list(itertools.product(range(field.residue.size), repeat=m)), lifts


def _tuple_ord(ring, u):
    """Valuation of a residue tuple (>= K for the zero tuple)."""
    field = ring.field
    best = ring.K + field.e
    for i, c in enumerate(u):
        if c:
            v = (c & -c).bit_length() - 1
            v = field.e * v + (i if field.ramified else 0)
            if v < best:
                best = v
    return best


class _ColumnSearch:
    """Digit-DFS for one column against fixed previous columns.

    Branches die as soon as the residual order drops below the minimal
    order any future digit can still correct; exhausted subtrees are
    memoized on the exact modular state (residuals plus the gradient
    vector truncated to the precision the future can see).
    """

    def __init__(self, ring, gramM, prev_w, targets_cross, target_diag,
                 budget, digit_index, scale_min, prev_w_min):
        self.ring = ring
        self.m = len(gramM)
        self.G = gramM
        self.prev_w = prev_w          # list of G*x_prev vectors
        self.t_cross = targets_cross  # list of target cross values
        self.t_diag = target_diag
        self.budget = budget
        self.digits, self.lifts = digit_index
        self.scale_min = scale_min    # min ord over Gram(M) entries (>= 0)
        self.prev_w_min = prev_w_min  # min ord of each prev_w vector
        R = ring
        self.pre = []
        for digs in self.digits:
            u = [R.from_elem(self.lifts[d]) for d in digs]
            Gu = [R.zero()] * self.m
            for p in range(self.m):
                acc = R.zero()
                for qi in range(self.m):
                    if digs[qi]:
                        acc = R.add(acc, R.mul(self.G[p][qi], u[qi]))
                Gu[p] = acc
            quu = R.zero()
            for p in range(self.m):
                if digs[p]:
                    quu = R.add(quu, R.mul(u[p], Gu[p]))
            crosses = []
            for w in self.prev_w:
                acc = R.zero()
                for p in range(self.m):
                    if digs[p]:
                        acc = R.add(acc, R.mul(w[p], u[p]))
                crosses.append(acc)
            self.pre.append((u, Gu, quu, crosses))

    def solutions(self):
        R = self.ring
        K = R.K
        e = R.field.e
        two = R.from_elem(R.field.two)
        x0 = [R.zero()] * self.m
        w0 = [R.zero()] * self.m
        q0 = R.zero()
        cr0 = [R.zero()] * len(self.prev_w)
        memo_empty = set()

        def viable(level, q, w_min_ord, crosses):
            # can the residuals still be cancelled by digits >= level?
            rq = tuple((a - b) & mk for a, b, mk
                       in zip(q, self.t_diag, R.masks))
            t = _tuple_ord(R, rq)
            if t < K:
                bound = min(2 * level + self.scale_min,
                            level + e + min(w_min_ord, level + self.scale_min))
                if t < bound:
                    return False
            for ci, cv in enumerate(crosses):
                rc = tuple((a - b) & mk for a, b, mk
                           in zip(cv, self.t_cross[ci], R.masks))
                t = _tuple_ord(R, rc)
                if t < K and t < level + self.prev_w_min[ci]:
                    return False
            return True

        def rec(level, x, w, q, crosses, w_min_ord):
            if level == K:
                yield list(x)
                return
            key = (level, q,
                   tuple(tuple(c & mk for c, mk in zip(wp, R.level_masks[K - level]))
                         for wp in w),
                   tuple(crosses))
            if key in memo_empty:
                return
            found = False
            pil = R.pi_pows[level]
            pi2l = R.pi_pows[2 * level] if 2 * level < len(R.pi_pows) else None
            for di, digs in enumerate(self.digits):
                self.budget[0] -= 1
                if self.budget[0] < 0:
                    raise BudgetExhausted("oracle node budget exhausted")
                u, Gu, quu, crosses_u = self.pre[di]
                wu = R.zero()
                for p in range(self.m):
                    if digs[p]:
                        wu = R.add(wu, R.mul(w[p], u[p]))
                qp = R.add(q, R.mul(R.mul(two, pil), wu))
                if pi2l is not None:
                    qp = R.add(qp, R.mul(pi2l, quu))
                if not R.eq_mod_level(qp, self.t_diag, level + 1):
                    continue
                ok = True
                new_crosses = []
                for ci in range(len(self.prev_w)):
                    cv = R.add(crosses[ci], R.mul(pil, crosses_u[ci]))
                    if not R.eq_mod_level(cv, self.t_cross[ci], level + 1):
                        ok = False
                        break
                    new_crosses.append(cv)
                if not ok:
                    continue
                wp = [R.add(w[p], R.mul(pil, Gu[p])) for p in range(self.m)]
                wmo = min(w_min_ord, min(
                    (_tuple_ord(R, wv) for wv in wp), default=w_min_ord))
                if not viable(level + 1, qp, wmo, new_crosses):
                    continue
                xp = [R.add(x[p], R.mul(pil, u[p])) if digs[p] else x[p]
                      for p in range(self.m)]
                for sol in rec(level + 1, xp, wp, qp, new_crosses, wmo):
                    found = True
                    yield sol
            if not found:
                memo_empty.add(key)

        yield from rec(0, x0, w0, q0, cr0, K + e)


def _search_embeddings(ring, gramM_mod, latN_mod, budget, digit_index,
                       col_order, scale_min):
    """Generator of full matrices X (columns in original order) mod pi^K."""
    n = len(latN_mod)
    R = ring
    empty_contexts = set()

    def rec(done, cols_by_orig, ws_by_orig):
        j = len(done)
        if j == n:
            yield [list(cols_by_orig[i]) for i in range(n)]
            return
        orig = col_order[j]
        target_diag = latN_mod[orig][orig]
        targets_cross = [latN_mod[i][orig] for i in done]
        prev_w = [ws_by_orig[i] for i in done]
        ctx_key = (j, tuple(tuple(w) for w in prev_w))
        if ctx_key in empty_contexts:
            return
        prev_w_min = [min((_tuple_ord(R, wp) for wp in w), default=ring.K)
                      for w in prev_w]
        cs = _ColumnSearch(ring, gramM_mod, prev_w, targets_cross, target_diag,
                           budget, digit_index, scale_min, prev_w_min)
        found = False
        for col in cs.solutions():
            w = []
            for p in range(len(gramM_mod)):
                acc = R.zero()
                for qi in range(len(gramM_mod)):
                    acc = R.add(acc, R.mul(gramM_mod[p][qi], col[qi]))
                w.append(acc)
            nc = dict(cols_by_orig)
            nw = dict(ws_by_orig)
            nc[orig] = col
            nw[orig] = w
            for sol in rec(done + [orig], nc, nw):
                found = True
                yield sol
        if not found:
            empty_contexts.add(ctx_key)

    yield from rec([], {}, {})


# ---------------------------------------------------------------------------
# exact certification of a candidate witness
# ---------------------------------------------------------------------------

def _pivot_ord(x: FieldElem):
    return INF if x.is_zero() else x.ord()

def _elementary_divisor_ords(rows, field):
    """Pivot orders of a matrix over F under pi-adic Gaussian elimination."""
    rows = [list(r) for r in rows]
    ords = []
    ncols = len(rows[0]) if rows else 0
    used_cols = set()
    while rows:
        best = None
        for ri, row in enumerate(rows):
            for ci in range(ncols):
                if ci in used_cols or row[ci].is_zero():
                    continue
                o = row[ci].ord()
                if best is None or o < best[0]:
                    best = (o, ri, ci)
        if best is None:
            break
        o, ri, ci = best
        ords.append(o)
        used_cols.add(ci)
        piv = rows.pop(ri)
        inv = piv[ci].inverse()
        for row in rows:
            if not row[ci].is_zero():
                f = row[ci] * inv
                for t in range(ncols):
                    row[t] = row[t] - f * piv[t]
    return ords, len(rows) == 0 or all(all(c.is_zero() for c in r) for r in rows)


def _certify(latN: GramLattice, latM: GramLattice, X_elems) -> bool:
    """Exact Newton-criterion check that X lifts to an exact embedding."""
    F = latM.field
    m, n = latM.n, latN.n
    G = latM.gram

    def bilin(u, v):
        acc = F.zero
        for p in range(m):
            for q in range(m):
                acc = acc + u[p] * G[p][q] * v[q]
        return acc

    cols = [[X_elems[p][j] for p in range(m)] for j in range(n)]
    resid_ord = INF
    for i in range(n):
        for j in range(i, n):
            r = latN.gram[i][j] - bilin(cols[i], cols[j])
            if not r.is_zero():
                resid_ord = min(resid_ord, r.ord())
    if resid_ord == INF:
        return True
    # rows of the linearization: d/dDelta_(p,c) of (X^t G X)_(i,j)
    rows = []
    for i in range(n):
        for j in range(i, n):
            row = []
            for c in range(n):
                for p in range(m):
                    acc = F.zero
                    if c == i:
                        acc = acc + _dotG(F, G, p, cols[j])
                    if c == j:
                        acc = acc + _dotG(F, G, p, cols[i])
                    row.append(acc)
            rows.append(row)
    ords, full_rank = _elementary_divisor_ords(rows, F)
    if len(ords) < n * (n + 1) // 2:
        return False
    delta = max(ords)
    return resid_ord > 2 * delta


def _dotG(F, G, p, col):
    acc = F.zero
    for q in range(len(G)):
        acc = acc + G[p][q] * col[q]
    return acc


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def oracle_represents(N, M, cfg: SearchConfig | None = None) -> OracleOutcome:
    """Search for an embedding N -> M; exact yes, tree-exhausted no."""
    cfg = cfg or SearchConfig()
    latN = N if isinstance(N, GramLattice) else _gram_of(N)
    latM = M if isinstance(M, GramLattice) else _gram_of(M)
    if latN.field != latM.field:
        raise FieldMismatch("lattices over different fields")
    if latN.n > latM.n:
        raise InputError("rank N must not exceed rank M")
    if latN.n == 0:
        return OracleOutcome("yes", witness_matrix=[], precision_used=0)
    F = latM.field
    # scale both lattices to integral entries; embeddings are unchanged
    orders = _entry_orders(latN) + _entry_orders(latM)
    if min(orders) < 0:
        shift = (-min(orders) + 1) // 2
        latN = latN.scaled(shift)
        latM = latM.scaled(shift)
    kmin = _auto_precision(latN, latM)
    K = max(cfg.precision or 0, kmin)
    nodes_total = 0
    for attempt in range(cfg.max_escalations + 1):
        budget = [cfg.max_nodes]
        ring = ModRing(F, K)
        gramM_mod = [[ring.from_elem(latM.gram[p][q]) for q in range(latM.n)]
                     for p in range(latM.n)]
        latN_mod = [[ring.from_elem(latN.gram[i][j]) for j in range(latN.n)]
                    for i in range(latN.n)]
        digit_index = _digit_vectors(F, latM.n)
        found_uncertified = False
        try:
            for X in _search_embeddings(ring, gramM_mod, latN_mod, budget,
                                        digit_index):
                X_elems = [[ring.to_elem(X[j][p]) for j in range(latN.n)]
                           for p in range(latM.n)]
                if _certify(latN, latM, X_elems):
                    nodes_total += cfg.max_nodes - budget[0]
                    wit = [[str(x.coeffs[0]) if F.degree == 1 else
                            [str(c) for c in x.coeffs] for x in row]
                           for row in X_elems] if cfg.collect_witness else None
                    return OracleOutcome("yes", witness_matrix=wit,
                                         precision_used=K,
                                         nodes_used=nodes_total)
                found_uncertified = True
        except BudgetExhausted:
            nodes_total += cfg.max_nodes
            raise BudgetExhausted(
                f"oracle budget exhausted at K={K} after {nodes_total} nodes")
        nodes_total += cfg.max_nodes - budget[0]
        if not found_uncertified:
            return OracleOutcome("no", precision_used=K,
                                 nodes_used=nodes_total)
        K += cfg.lift_slack  # witnesses existed but none certified: go deeper
    return OracleOutcome("inconclusive", precision_used=K,
                         nodes_used=nodes_total)


def oracle_isometric(L1, L2, cfg: SearchConfig | None = None) -> OracleOutcome:
    """Isometry = equal rank, equal volume order, embeddings both ways."""
    lat1 = L1 if isinstance(L1, GramLattice) else _gram_of(L1)
    lat2 = L2 if isinstance(L2, GramLattice) else _gram_of(L2)
    if lat1.n != lat2.n:
        raise InputError("oracle_isometric needs equal ranks")
    if lat1.vol_order() != lat2.vol_order():
        return OracleOutcome("no")
    fwd = oracle_represents(lat1, lat2, cfg)
    if not fwd.yes:
        return OracleOutcome(fwd.status, precision_used=fwd.precision_used,
                             nodes_used=fwd.nodes_used)
    back = oracle_represents(lat2, lat1, cfg)
    status = back.status if back.status != "yes" else "yes"
    return OracleOutcome(status,
                         precision_used=max(fwd.precision_used,
                                            back.precision_used),
                         nodes_used=fwd.nodes_used + back.nodes_used)


def _gram_of(b):
    from .bong import gram_from_bong
    return gram_from_bong(b)


# ---------------------------------------------------------------------------
# reproducible random instances for differential testing
# ---------------------------------------------------------------------------

@dataclass
class InstanceParams:
    field: FieldDesc
    max_rank: int = 3
    val_range: tuple = (-2, 4)
    sublattice_fraction: float = 0.5
    equal_rank_fraction: float = 0.7


@dataclass
class Instance:
    N: GramLattice
    M: GramLattice
    bong_N: object
    bong_M: object
    index: int
    sublattice: bool


def _random_unimodular(rng, n):
    while True:
        T = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if abs(_int_det(T)) % 2 == 1:
            return T


def _int_det(T):
    n = len(T)
    if n == 1:
        return T[0][0]
    if n == 2:
        return T[0][0] * T[1][1] - T[0][1] * T[1][0]
    det = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in T[1:]]
        det += (-1) ** j * T[0][j] * _int_det(minor)
    return det


def _random_base_lattice(rng, params: InstanceParams, rank):
    F = params.field
    lo, hi = params.val_range
    blocks = []
    left = rank
    while left > 0:
        if left >= 2 and rng.random() < 0.3:
            k = rng.randint(lo, max(lo, hi - F.e))
            kind = rng.choice(["a00", "a22"])
            pk = F.pi_pow(k)
            if kind == "a00":
                g = [[F.zero, pk], [pk, F.zero]]
            else:
                delta = F.delta()
                rho = (F.one - delta) / (F.two * F.two)
                g = [[F.two * pk, pk], [pk, F.two * rho * pk]]
            blocks.append(GramLattice(F, g))
            left -= 2
        else:
            k = rng.randint(lo, hi)
            u = rng.choice(F.unit_class_reps())
            blocks.append(GramLattice.diagonal(F, [u * F.pi_pow(k)]))
            left -= 1
    lat = blocks[0]
    for b in blocks[1:]:
        lat = lat.perp(b)
    U = _random_unimodular(rng, rank)
    return lat.transformed(U)


def _max_entry_ord(lat):
    return max(_entry_orders(lat))


def random_instance(rng: random.Random, params: InstanceParams,
                    index: int = 0) -> Instance:
    """One reproducible (N, M) pair; a configurable fraction of instances
    is built as a genuine finite-index sublattice (guaranteed represents)."""
    F = params.field
    lo, hi = params.val_range
    cap = hi + 2 * F.e + 2
    for _ in range(200):
        m = rng.randint(1, params.max_rank)
        n = m if rng.random() < params.equal_rank_fraction else rng.randint(1, m)
        M = _random_base_lattice(rng, params, m)
        if _max_entry_ord(M) > cap:
            continue
        sub = rng.random() < params.sublattice_fraction
        if sub:
            U = _random_unimodular(rng, m)
            S = [[0] * n for _ in range(m)]
            positions = rng.sample(range(m), n)
            for j, p in enumerate(sorted(positions)):
                S[p][j] = 1
            T = [[sum(U[i][k] * S[k][j] for k in range(m)) for j in range(n)]
                 for i in range(m)]
            scales = [F.pi_pow(rng.randint(0, 2)) for _ in range(n)]
            TF = [[F.from_rational(T[i][j]) * scales[j] for j in range(n)]
                  for i in range(m)]
            N = M.transformed(TF)
        else:
            N = _random_base_lattice(rng, params, n)
        if _max_entry_ord(N) > cap:
            continue
        try:
            bN = bong_from_gram(N, seed=index)
            bM = bong_from_gram(M, seed=index)
        except Exception:
            continue
        return Instance(N=N, M=M, bong_N=bN, bong_M=bM, index=index,
                        sublattice=sub)
    raise InputError("could not generate an instance within parameter bounds")
