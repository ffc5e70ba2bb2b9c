"""Levels, clean-vector extension and the constructive zero-finding drivers.

A vector e has level ``nu(F(e)) mod d``.  The drivers build bases on which
F is (quasi-)diagonal by repeatedly asking the zero-search oracle for a new
vector that kills prescribed coefficients of the expansion
``F(x_1 e_1 + ... + x_k e_k + t e)``, then walk a fixed case tree on the
levels and cross-coefficients.  Every terminal case searches a small grid of
integer combinations and finishes with a Hensel lift.

Drivers are sound but not complete at small n: any zero they return has
been re-evaluated on the input form, and when the oracle runs dry they
report ``stuck`` with the case that failed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    ConditionFailed,
    InvalidPrime,
    IsZero,
    NotApplicable,
    OracleExhausted,
    PrecisionExhausted,
    RefusedTooLarge,
)
from .forms import Form, VectorQp, directional_expand, evaluate, expansion_forms, rank, restrict
from .hensel import UniPoly, check_lift_hypotheses, lift, lift_form_point
from .padic import PadicScalar
from .zerosearch import SearchBudget, iter_zeros

DEFAULT_TARGET_PREC = 32
DEFAULT_SEARCH_BUDGET = SearchBudget(k=2, max_candidates=1 << 20)

Slot = tuple[tuple[int, ...], int]


# ---------------------------------------------------------------------------
# levels


def level(F: Form, e) -> int:
    """nu(F(e)) mod deg F; raises IsZero when F(e) vanishes to precision."""
    value = evaluate(F, e)
    if value.is_zero:
        raise IsZero("F(e) is zero to working precision")
    return value.val % F.d


@dataclass(frozen=True)
class LevelEntry:
    vector: VectorQp
    value: PadicScalar
    level: int


@dataclass
class LevelBasis:
    degree: int
    p: int
    entries: list[LevelEntry] = field(default_factory=list)
    cross: dict[tuple[int, ...], PadicScalar] = field(default_factory=dict)

    @classmethod
    def of(cls, F: Form, vectors: Iterable) -> LevelBasis:
        basis = cls(F.d, F.p)
        for v in vectors:
            basis.append(F, v)
        return basis

    def __len__(self) -> int:
        return len(self.entries)

    def vectors(self) -> list[VectorQp]:
        return [e.vector for e in self.entries]

    def levels(self) -> list[int]:
        return [e.level for e in self.entries]

    def append(self, F: Form, v) -> LevelEntry:
        v = v if isinstance(v, VectorQp) else VectorQp.of(v, F.p)
        value = evaluate(F, v)
        if value.is_zero:
            raise IsZero("F vanishes at the new vector")
        if rank(self.vectors() + [v]) != len(self.entries) + 1:
            raise ConditionFailed("new vector is dependent on the basis")
        entry = LevelEntry(v, value, value.val % F.d)
        self.entries.append(entry)
        return entry

    def record_cross(self, F: Form) -> None:
        """Store every non-diagonal coefficient of F on the span."""
        H = restrict(F, self.vectors())
        self.cross = {e: c for e, c in H.terms if max(e) < F.d}

    def to_record(self) -> dict:
        return {
            "degree": self.degree,
            "p": self.p,
            "entries": [
                {"vector": e.vector.tokens(), "value": e.value.token(), "level": e.level}
                for e in self.entries
            ],
            "cross": {" ".join(map(str, k)): c.token() for k, c in sorted(self.cross.items())},
        }


def merge_same_level(F: Form, es, et) -> VectorQp:
    """es + et, whose value gains exactly one in valuation.

    Requires F(es), F(et) of equal valuation r and F diagonal on span(es, et);
    raises ConditionFailed when nu(F(es) + F(et)) != r + 1, which tells the
    caller to try another pair.
    """
    p = F.p
    es = es if isinstance(es, VectorQp) else VectorQp.of(es, p)
    et = et if isinstance(et, VectorQp) else VectorQp.of(et, p)
    a, b = evaluate(F, es), evaluate(F, et)
    if a.is_zero or b.is_zero:
        raise IsZero("one of the vectors is already a zero")
    if a.val != b.val:
        raise ConditionFailed(f"values have valuations {a.val} and {b.val}; rescale first")
    H = restrict(F, [es, et])
    if any(0 < e[0] < F.d for e, _ in H.terms):
        raise ConditionFailed("F is not diagonal on the span of the pair")
    s = (a + b).valuation()
    if s != a.val + 1:
        raise ConditionFailed(f"nu(F(es) + F(et)) = {s}, expected {a.val + 1}")
    return es + et


# ---------------------------------------------------------------------------
# clean vectors


def _vectors_of(basis) -> list[VectorQp]:
    if isinstance(basis, LevelBasis):
        return basis.vectors()
    return list(basis)


def clean_constraints(
    F: Form,
    G: Sequence[Form],
    basis,
    keep: Iterable[Slot] = (),
    *,
    pairwise: bool = False,
) -> list[Form]:
    """Coefficient forms a new vector must annihilate.

    Slots are keyed ``(d, j)`` with ``d`` indexed by the whole basis.  With
    ``pairwise`` only the expansions against one basis vector at a time are
    constrained, so mixed terms involving two old vectors are allowed.
    The value slot F(e) is never constrained; every slot of every form in
    ``G`` is.
    """
    vecs = _vectors_of(basis)
    keep = {(tuple(d), j) for d, j in keep}
    r = len(vecs)
    groups = [[i] for i in range(r)] if pairwise and r else [list(range(r))]
    out: list[Form] = []
    for group in groups:
        sub = [vecs[i] for i in group]

        def full(d):
            slot = [0] * r
            for i, x in zip(group, d):
                slot[i] = x
            return tuple(slot)

        for (d, j), form in expansion_forms(F, sub).items():
            if j == F.d or (full(d), j) in keep:
                continue
            out.append(form)
        for g in G:
            out.extend(expansion_forms(g, sub).values())
    return out


def clean_candidates(
    F: Form,
    G: Sequence[Form],
    basis,
    keep: Iterable[Slot] = (),
    budget: SearchBudget | None = None,
    *,
    pairwise: bool = False,
    target_prec: int = DEFAULT_TARGET_PREC,
) -> Iterator[VectorQp]:
    """Vectors meeting the clean constraints, independent of ``basis``, in oracle order."""
    budget = budget or DEFAULT_SEARCH_BUDGET
    vecs = _vectors_of(basis)
    constraints = clean_constraints(F, G, vecs, keep, pairwise=pairwise)

    def accept(e: VectorQp) -> bool:
        return rank(vecs + [e]) == len(vecs) + 1

    for outcome in iter_zeros(constraints, budget, n=F.n, p=F.p, target_prec=target_prec, accept=accept):
        yield outcome.witness


def extend_clean_vector(
    F: Form,
    G: Sequence[Form],
    basis,
    keep: Iterable[Slot] = (),
    budget: SearchBudget | None = None,
    *,
    pairwise: bool = False,
    target_prec: int = DEFAULT_TARGET_PREC,
) -> VectorQp:
    """First clean vector in oracle order; OracleExhausted if there is none."""
    for e in clean_candidates(F, G, basis, keep, budget, pairwise=pairwise, target_prec=target_prec):
        return e
    raise OracleExhausted("no vector satisfies the clean-extension constraints at this budget")


def independent_by_expansion(F: Form, basis, e, prec: int | None = None) -> bool:
    """True when every t-linear coefficient of F(sum x_i e_i + t e) vanishes.

    That certifies e is independent of the basis (given F has no zero on
    the span); False means inconclusive, not dependent.  With ``prec`` a
    coefficient counts as vanishing once its valuation reaches ``prec``.
    """
    vecs = _vectors_of(basis)
    e = e if isinstance(e, VectorQp) else VectorQp.of(e, F.p)
    if e.is_zero():
        return False
    exp = directional_expand(F, vecs, e)
    for c in exp.slots_with_t_power(1).values():
        if c.is_zero:
            continue
        if prec is None or c.val < prec:
            return False
    return True


# ---------------------------------------------------------------------------
# drivers


@dataclass
class ConstructOutcome:
    status: str  # zero | basis | stuck
    witness: VectorQp | None = None
    precision: int | None = None
    basis: LevelBasis | None = None
    reason: str | None = None
    trace: list[str] = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return self.status == "zero"

    def to_record(self) -> dict:
        rec = {"status": self.status, "trace": list(self.trace)}
        if self.witness is not None:
            rec["witness"] = self.witness.tokens()
            rec["witness_int"] = list(self.witness.to_ints(balanced=True)) if _is_integral(self.witness) else None
            rec["precision"] = self.precision
        if self.reason is not None:
            rec["reason"] = self.reason
        if self.basis is not None:
            rec["basis"] = self.basis.to_record()
        return rec


class _ZeroFound(Exception):
    def __init__(self, vector: VectorQp, case: str):
        super().__init__(case)
        self.vector = vector
        self.case = case


class _Stuck(Exception):
    pass


def _is_integral(v: VectorQp) -> bool:
    return all(x.is_zero or x.val >= 0 for x in v.entries)


def _combine(vectors: Sequence[VectorQp], coeffs: Sequence) -> VectorQp:
    p = vectors[0].p
    out = None
    for v, c in zip(vectors, coeffs):
        term = v.scale(c)
        out = term if out is None else out + term
    return out if out is not None else VectorQp(())


def _content_normalized(f: UniPoly) -> UniPoly:
    m = min((c.val for c in f.coeffs if not c.is_zero), default=0)
    return UniPoly(f.p, tuple(c.shift(-m) for c in f.coeffs))


def _widened_grid(m: int, p: int) -> Iterator[tuple[int, ...]]:
    for c in itertools.product(range(-1, 3), repeat=m):
        if any(x % p for x in c):
            yield c


class _Driver:
    """Shared state for the drivers: the form, the oracle and a form shift.

    ``shift`` is the exponent s in the working form p**s * F; it changes
    levels but not zeros.  Vectors are normalized so that the working value
    has valuation in [0, d).
    """

    def __init__(self, F: Form, G: Sequence[Form], budget: SearchBudget | None,
                 target_prec: int, sample: int, pairwise: bool):
        self.F = F
        self.G = list(G)
        self.p = F.p
        self.d = F.d
        self.budget = budget or DEFAULT_SEARCH_BUDGET
        self.target_prec = target_prec
        self.sample = sample
        self.pairwise = pairwise
        self.shift = 0
        self.trace: list[str] = []
        self.basis: list[VectorQp] = []

    # -- values ---------------------------------------------------------
    def val(self, e: VectorQp) -> int:
        value = evaluate(self.F, e)
        if value.is_zero:
            raise _ZeroFound(e, "value-vanishes")
        return value.val + self.shift

    def lvl(self, e: VectorQp) -> int:
        return self.val(e) % self.d

    def normalize(self, e: VectorQp) -> VectorQp:
        m = self.val(e) // self.d
        return e.shift(-m) if m else e

    def cross(self, vectors: Sequence[VectorQp], exp: tuple[int, ...]) -> float | int:
        c = restrict(self.F, vectors).coeff(exp)
        return math.inf if c.is_zero else c.val + self.shift

    # -- oracle ---------------------------------------------------------
    def new_vector(self, basis: Sequence[VectorQp], keep: Iterable[Slot] = (), *,
                   maximal: bool = False, stage: str = "") -> VectorQp:
        best = None
        try:
            for count, e in enumerate(clean_candidates(
                self.F, self.G, basis, keep, self.budget,
                pairwise=self.pairwise, target_prec=self.target_prec,
            )):
                e = self.normalize(e)
                if not maximal:
                    return e
                lv = self.lvl(e)
                if best is None or lv > best[0]:
                    best = (lv, e)
                if lv == self.d - 1 or count + 1 >= self.sample:
                    break
        except RefusedTooLarge as exc:
            raise _Stuck(f"{stage}: search refused ({exc})") from exc
        if best is None:
            raise _Stuck(f"{stage}: oracle found no clean vector beyond {len(basis)} basis vectors")
        return best[1]

    # -- terminal cases -------------------------------------------------
    def _lift_in_span(self, H: Form, vectors, c: tuple[int, ...], order: Sequence[int]):
        m = len(vectors)
        for i in order:
            base = VectorQp.of([0 if j == i else c[j] for j in range(m)], self.p)
            axis = VectorQp.basis_vector(i, m, self.p)
            try:
                f = _content_normalized(UniPoly.from_line(H, base, axis))
            except ValueError:
                continue
            if not check_lift_hypotheses(f, c[i]).applicable:
                continue
            try:
                r = lift(f, c[i], self.target_prec + 8)
            except (NotApplicable, PrecisionExhausted):
                continue
            yield base + axis.scale(r.root)
        try:
            _, y = lift_form_point(H, c, self.target_prec + 8)
            yield y
        except (NotApplicable, PrecisionExhausted, ValueError):
            return

    def terminal(self, case: str, vectors: Sequence[VectorQp], grid: Iterable[tuple[int, ...]],
                 min_val: int, lift_index: int | None = None) -> None:
        """Search ``grid`` for a combination with working value of valuation
        >= ``min_val`` and lift it; then retry on a widened grid.  Raises
        _ZeroFound on success, _Stuck otherwise."""
        vectors = list(vectors)
        m = len(vectors)
        H = restrict(self.F, vectors)
        content = H.min_valuation()
        Hn = H.shift(-int(content)) if content != math.inf else H
        order = ([lift_index] if lift_index is not None else []) + [i for i in range(m) if i != lift_index]
        for label, cells, need in ((case, grid, min_val), (case + "-widened", _widened_grid(m, self.p), None)):
            for c in cells:
                c = tuple(c)
                value = evaluate(H, c)
                if value.is_zero:
                    self._accept(_combine(vectors, c), label)
                if need is not None and value.val + self.shift < need:
                    continue
                if need is None and evaluate(Hn, c).valuation() < 1:
                    continue
                for y in self._lift_in_span(Hn, vectors, c, order):
                    self._accept(_combine(vectors, y.entries), label)
        self.trace.append(case + "-failed")
        raise _Stuck(f"{case}: no liftable combination on the case grid or the widened grid")

    def _accept(self, w: VectorQp, case: str) -> None:
        if self.verify(w):
            raise _ZeroFound(w, case)

    def verify(self, w: VectorQp) -> bool:
        if w.is_zero():
            return False
        w = w.primitive()
        return all(evaluate(g, w).valuation() >= self.target_prec for g in [self.F] + self.G)

    # -- outcome --------------------------------------------------------
    def finish(self, z: _ZeroFound) -> ConstructOutcome:
        w = z.vector.primitive()
        if not self.verify(w):
            raise AssertionError("driver produced an unverified zero")
        self.trace.append(z.case)
        w = _snap_exact(w, [self.F] + self.G)
        prec = min(evaluate(g, w).valuation() for g in [self.F] + self.G)
        prec = self.target_prec if prec == math.inf else min(int(prec), 10**9)
        return ConstructOutcome("zero", w, max(prec, self.target_prec), self._basis_record(), None, self.trace)

    def stuck(self, reason: str) -> ConstructOutcome:
        self.trace.append("stuck")
        return ConstructOutcome("stuck", None, None, self._basis_record(), reason, self.trace)

    def _basis_record(self) -> LevelBasis | None:
        b = LevelBasis(self.d, self.p)
        for v in self.basis:
            value = evaluate(self.F, v)
            if value.is_zero:
                continue
            b.entries.append(LevelEntry(v, value, value.val % self.d))
        return b


def _snap_exact(w: VectorQp, system: Sequence[Form]) -> VectorQp:
    """Replace w by its balanced integer representative when that is an exact zero."""
    if not _is_integral(w):
        return w
    ints = w.to_ints(balanced=True)
    if max(abs(x) for x in ints) > 10**6:
        return w
    v = VectorQp.of(ints, w.p)
    if all(evaluate(g, v).is_zero for g in system) and v.is_primitive():
        return v
    return w


# ---------------------------------------------------------------------------
# quartic over Q_2


class QuarticDriver(_Driver):
    """Zero search for a quartic form over Q_2 by the level case tree."""

    MAX_MERGES = 8

    def __init__(self, F: Form, budget: SearchBudget | None = None, *,
                 target_prec: int = DEFAULT_TARGET_PREC, sample: int = 32):
        if F.p != 2 or F.d != 4:
            raise InvalidPrime("the quartic driver needs p = 2 and degree 4")
        super().__init__(F, [], budget, target_prec, sample, pairwise=False)

    def run(self) -> ConstructOutcome:
        try:
            vecs = self.collect_diagonal(5)
            e1, e2, e3 = self.arrange(vecs)
            self.stage_e4(e1, e2, e3)
        except _ZeroFound as z:
            return self.finish(z)
        except _Stuck as s:
            return self.stuck(str(s))
        return self.stuck("case tree exhausted")

    def collect_diagonal(self, count: int, start: Sequence[VectorQp] = ()) -> list[VectorQp]:
        vecs = list(start)
        while len(vecs) < count:
            vecs.append(self.new_vector(vecs, stage="collect-diagonal"))
            self.basis = list(vecs)
        self.trace.append(f"diagonal-{count}")
        return vecs

    def arrange(self, vecs: list[VectorQp]) -> tuple[VectorQp, VectorQp, VectorQp]:
        """Merge same-level pairs until three levels occur, then shift to levels 0, 1, 2."""
        for _ in range(self.MAX_MERGES):
            levels = [self.lvl(e) for e in vecs]
            if len(set(levels)) == 4:
                self.case_0123(vecs)
            if len(set(levels)) >= 3:
                break
            r = next(l for l in sorted(set(levels)) if levels.count(l) >= 3)
            trio = [i for i, l in enumerate(levels) if l == r][:3]
            for s, t in itertools.combinations(trio, 2):
                try:
                    merged = merge_same_level(self.F, vecs[s], vecs[t])
                except ConditionFailed:
                    continue
                rest = [v for i, v in enumerate(vecs) if i not in (s, t)] + [self.normalize(merged)]
                self.trace.append(f"merge-level-{r}")
                vecs = self.collect_diagonal(5, rest)
                break
            else:
                raise _Stuck(f"merge: no pair among three level-{r} vectors gains one in valuation")
        else:
            raise _Stuck("merge: too many merge rounds")
        levels = [self.lvl(e) for e in vecs]
        missing = next(l for l in range(4) if l not in levels)
        self.shift += (3 - missing) % 4
        picked = {}
        for e in vecs:
            picked.setdefault(self.lvl(e), e)
        self.trace.append("levels-012")
        e1, e2, e3 = (self.normalize(picked[l]) for l in (0, 1, 2))
        self.basis = [e1, e2, e3]
        return e1, e2, e3

    def case_0123(self, vecs: Sequence[VectorQp]) -> None:
        """Five diagonal vectors covering all four levels: shift the repeated
        level to 0 and solve with both level-0 coefficients equal to one."""
        levels = [self.lvl(e) for e in vecs]
        r = next(l for l in range(4) if levels.count(l) >= 2)
        self.shift += (-r) % 4
        vecs = [self.normalize(e) for e in vecs]
        levels = [self.lvl(e) for e in vecs]
        zeros = [e for e, l in zip(vecs, levels) if l == 0]
        others = [next(e for e, l in zip(vecs, levels) if l == k) for k in (1, 2, 3)]
        ordered = [zeros[0]] + others + [zeros[1]]
        self.basis = ordered
        grid = [(1, *xs, 1) for xs in itertools.product((0, 1), repeat=3)]
        self.terminal("levels-0123-hensel", ordered, grid, 4, lift_index=0)

    def stage_e4(self, e1, e2, e3) -> None:
        e4 = self.new_vector([e1, e2, e3], maximal=True, stage="choose-e4")
        if self.lvl(e4) == 3:
            self.trace.append("e4-level-3")
            e5 = self.new_vector([e1, e2, e3, e4], stage="choose-e5")
            self.case_0123([e1, e2, e3, e4, e5])
        self.trace.append(f"e4-level-{self.lvl(e4)}")
        keep = [((0, 0, 0, 1), 3)]
        e5 = self.new_vector([e1, e2, e3, e4], keep, maximal=True, stage="choose-e5")
        self.basis = [e1, e2, e3, e4, e5]
        l4, l5 = self.lvl(e4), self.lvl(e5)
        if l5 == 3:
            self.trace.append("e5-level-3")
            extra = self.new_vector([e1, e2, e3, e5], stage="choose-e5-partner")
            self.case_0123([e1, e2, e3, e5, extra])
        if l4 == 2 and l5 == 2:
            self.case_c45(e1, e2, e3, e4, e5)
        self.stage_e6(e1, e2, e3, e4, e5)

    def case_c45(self, e1, e2, e3, e4, e5) -> None:
        """e4, e5 both of value valuation 2; branch on nu(c45)."""
        v = self.cross([e4, e5], (1, 3))
        if v < 2:
            self.terminal("c45-val-lt2", [e4, e5], [(1, 1), (0, 1), (2, 1)], 2, lift_index=1)
        if v == 2:
            self.terminal("c45-val-2", [e3, e4, e5], [(1, 1, 1)], 3, lift_index=2)
        if v == 3:
            if self.val(e4 + e5) == 3:
                # the sum has level 3, so the four-level configuration applies
                self.trace.append("c45-val-3-assumption-load-bearing")
                e45 = self.normalize(e4 + e5)
                extra = self.new_vector([e1, e2, e3, e45], stage="c45-val-3")
                self.case_0123([e1, e2, e3, e45, extra])
            grid = [(*xs, 1, 1) for xs in itertools.product((0, 2), repeat=3)]
            self.terminal("c45-val-3", [e1, e2, e3, e4, e5], grid, 7, lift_index=3)
        # nu(c45) >= 4
        self.trace.append("c45-val-ge4")
        f3 = evaluate(self.F, e3)
        i = next((k for k, e in ((4, e4), (5, e5)) if (f3 - evaluate(self.F, e)).valuation() + self.shift >= 4), None)
        if i is None:
            raise _Stuck("c45-val-ge4: no e_i with F(e3) = F(e_i) mod 2^4")
        e3p = self.normalize(e3 + (e4 if i == 4 else e5))
        other = e5 if i == 4 else e4
        e6 = self.new_vector([e1, e2, e3p, other], stage="c45-val-ge4-e6")
        w6 = self.lvl(e6)
        if w6 == 3:
            extra = self.new_vector([e1, e2, other, e6], stage="c45-val-ge4-e6-level-3")
            self.case_0123([e1, e2, other, e6, extra])
        if w6 == 2:
            extra = self.new_vector([e1, e2, e3p, e6], stage="c45-val-ge4-e6-level-2")
            self.case_0123([e1, e2, e3p, e6, extra])
        vecs = [e1, e2, e3p, other, e6]
        if w6 == 1:
            grid = [(2 * a, 1, b, c, 1) for a, b, c in itertools.product((0, 1), repeat=3)]
            self.terminal("c45-val-ge4-e6-level-1", vecs, grid, 5, lift_index=4)
        grid = [(1, a, b, c, 1) for a, b, c in itertools.product((0, 1), repeat=3)]
        self.terminal("c45-val-ge4-e6-level-0", vecs, grid, 4, lift_index=4)

    def stage_e6(self, e1, e2, e3, e4, e5) -> None:
        keep = [((0, 0, 0, 1, 0), 3), ((0, 0, 0, 0, 1), 3), ((0, 0, 0, 1, 1), 2)]
        e6 = self.new_vector([e1, e2, e3, e4, e5], keep, maximal=True, stage="choose-e6")
        self.basis = [e1, e2, e3, e4, e5, e6]
        self.trace.append(f"e6-level-{self.lvl(e6)}")
        if self.lvl(e5) == 1 and self.lvl(e6) == 1:
            v = self.cross([e5, e6], (1, 3))
            if v < 1:
                self.terminal("c56-val-lt1", [e5, e6], [(1, 1), (0, 1)], 1, lift_index=1)
            if v == 1:
                grid = [c for c in itertools.product((0, 1), repeat=3) if any(c)]
                self.terminal("c56-val-1", [e2, e5, e6], grid, 2)
            grid = [(a, b, 1, 1) for a, b in itertools.product((0, 2), repeat=2)]
            self.terminal("c56-val-ge2", [e1, e2, e5, e6], grid, 9, lift_index=2)
        self.stage_e7(e1, e2, e3, e4, e5, e6)

    def stage_e7(self, e1, e2, e3, e4, e5, e6) -> None:
        keep = []
        for i in (3, 4, 5):
            d = [0] * 6
            d[i] = 1
            keep.append((tuple(d), 3))
        for i, j in itertools.combinations((3, 4, 5), 2):
            d = [0] * 6
            d[i] = d[j] = 1
            keep.append((tuple(d), 2))
        e7 = self.new_vector([e1, e2, e3, e4, e5, e6], keep, maximal=True, stage="choose-e7")
        self.basis = [e1, e2, e3, e4, e5, e6, e7]
        self.trace.append(f"e7-level-{self.lvl(e7)}")
        if self.lvl(e6) == 0 and self.lvl(e7) == 0:
            v = self.cross([e6, e7], (1, 3))
            if v < 0:
                self.terminal("c67-val-lt0", [e6, e7], [(1, 1), (0, 1)], 0, lift_index=1)
            if v == 0:
                grid = [c for c in itertools.product((0, 1), repeat=3) if any(c)]
                self.terminal("c67-val-0", [e1, e6, e7], grid, 1)
            self.terminal("c67-val-gt0", [e1, e6, e7], [(0, 1, 1), (1, 1, 1)], 8, lift_index=2)
        raise _Stuck(f"case tree exhausted with levels e6={self.lvl(e6)}, e7={self.lvl(e7)}")


def quartic_zero_q2(F: Form, budget: SearchBudget | None = None, **kwargs) -> ConstructOutcome:
    return QuarticDriver(F, budget, **kwargs).run()


# ---------------------------------------------------------------------------
# cubics


class CubicDriver(_Driver):
    MAX_ROUNDS = 12

    def __init__(self, C: Form, G: Sequence[Form], budget: SearchBudget | None, *,
                 target_prec: int, pairwise: bool):
        if C.d != 3:
            raise ValueError("the cubic drivers need a form of degree 3")
        super().__init__(C, G, budget, target_prec, sample=1, pairwise=pairwise)

    def same_level_pair(self, vecs):
        levels = [self.lvl(e) for e in vecs]
        for i, j in itertools.combinations(range(len(vecs)), 2):
            if levels[i] == levels[j]:
                return i, j
        return None

    def unit_pair(self, ei: VectorQp, ej: VectorQp) -> tuple[VectorQp, VectorQp]:
        """Normalize both vectors and shift the form so both values are units."""
        ei, ej = self.normalize(ei), self.normalize(ej)
        self.shift -= self.val(ei)
        return ei, ej

    def line(self, base: VectorQp, direction: VectorQp) -> UniPoly:
        """t -> C(base + t direction) in the working scale."""
        f = UniPoly.from_line(self.F, base, direction)
        return UniPoly(f.p, tuple(c.shift(self.shift) for c in f.coeffs))


class CubicP2Mod3Driver(CubicDriver):
    def __init__(self, C: Form, G: Sequence[Form] = (), budget: SearchBudget | None = None, *,
                 target_prec: int = DEFAULT_TARGET_PREC):
        if C.p % 3 != 2:
            raise InvalidPrime(f"p = {C.p} is not 2 mod 3")
        super().__init__(C, G, budget, target_prec=target_prec, pairwise=True)

    def run(self) -> ConstructOutcome:
        try:
            vecs: list[VectorQp] = []
            while True:
                vecs.append(self.new_vector(vecs, stage="collect-diagonal"))
                self.basis = list(vecs)
                pair = self.same_level_pair(vecs)
                if pair is not None:
                    break
            i, j = pair
            self.trace.append(f"pair-level-{self.lvl(vecs[i])}")
            ei, ej = self.unit_pair(vecs[i], vecs[j])
            f = self.line(ej, ei)
            for t in range(self.p):
                if f(t).valuation() >= 1 and f.derivative(t).valuation() == 0:
                    r = lift(f, t, self.target_prec + 8)
                    self._accept(ej + ei.scale(r.root), f"pair-hensel-t={t}")
            raise _Stuck("pair: no t in F_p with a simple root mod p")
        except _ZeroFound as z:
            return self.finish(z)
        except _Stuck as s:
            return self.stuck(str(s))


class CubicP3Driver(CubicDriver):
    def __init__(self, C: Form, G: Sequence[Form] = (), budget: SearchBudget | None = None, *,
                 target_prec: int = DEFAULT_TARGET_PREC):
        if C.p != 3:
            raise InvalidPrime(f"p = {C.p} is not 3")
        super().__init__(C, G, budget, target_prec=target_prec, pairwise=False)

    def run(self) -> ConstructOutcome:
        try:
            vecs: list[VectorQp] = []
            for _ in range(self.MAX_ROUNDS):
                self.basis = list(vecs)
                config = self.sl_configuration(vecs)
                if config is not None:
                    self.sl_construction(*config)
                pair = self.same_level_pair(vecs)
                if pair is not None:
                    vecs = self.pair_step(vecs, *pair)
                    continue
                if len(vecs) >= 4:
                    raise _Stuck("four diagonal vectors without a same-level pair")
                vecs.append(self.new_vector(vecs, stage="collect-diagonal"))
            raise _Stuck("too many rounds")
        except _ZeroFound as z:
            return self.finish(z)
        except _Stuck as s:
            return self.stuck(str(s))

    def sl_configuration(self, vecs):
        levels = [self.lvl(e) for e in vecs]
        for i, j in itertools.combinations(range(len(vecs)), 2):
            if levels[i] != levels[j]:
                continue
            for k in range(len(vecs)):
                if k not in (i, j) and levels[k] == (levels[i] + 1) % 3:
                    return vecs[i], vecs[j], vecs[k]
        return None

    def pair_step(self, vecs, i, j):
        r = self.lvl(vecs[i])
        saved = self.shift
        ei, ej = self.unit_pair(vecs[i], vecs[j])
        f = self.line(ej, ei)
        for t0 in (1, -1):
            if f(t0).valuation() < 1:
                continue
            if check_lift_hypotheses(f, t0).applicable:
                root = lift(f, t0, self.target_prec + 8).root
                self._accept(ej + ei.scale(root), f"pair-hensel-t0={t0}")
            merged = ei.scale(t0) + ej
            self.shift = saved
            if self.lvl(merged) != (r + 1) % 3:
                raise _Stuck(f"pair: combination with t0={t0} neither lifts nor gains one level")
            self.trace.append(f"merge-level-{(r + 1) % 3}")
            return [v for k, v in enumerate(vecs) if k not in (i, j)] + [self.normalize(merged)]
        self.shift = saved
        raise _Stuck("pair: no t0 in {1, -1} makes 3 divide the value")

    def sl_construction(self, ei, ej, ek) -> None:
        self.trace.append("levels-001")
        ei, ej = self.unit_pair(ei, ej)
        ek = self.normalize(ek)
        C = lambda v: evaluate(self.F, v).shift(self.shift)  # noqa: E731
        if C(ek).valuation() != 1:
            raise _Stuck("s/l: third vector does not have value valuation 1 after shifting")
        xj = next((x for x in (1, -1) if C(ei + ej.scale(x)).valuation() >= 1), None)
        if xj is None:
            raise _Stuck("s/l: no x_j in {1, -1} with 3 | C(e_i + e_j x_j)")
        s = C(ei + ej.scale(xj)).shift(-1)
        l_ = C(ek).shift(-1)
        if not s.is_zero and s.val == 0:
            xk = (-s.reduce_mod(1) * pow(l_.reduce_mod(1), -1, 3)) % 3
            xk = xk - 3 if xk == 2 else xk
        else:
            xk = 0
        base = ej.scale(xj) + ek.scale(xk)
        f = self.line(base, ei)
        self.trace.append(f"sl-xj={xj}-xk={xk}")
        report = check_lift_hypotheses(f, 1)
        if not report.applicable:
            raise _Stuck(f"s/l: lifting hypotheses fail ({report.branch})")
        root = lift(f, 1, self.target_prec + 8).root
        self._accept(base + ei.scale(root), "sl-hensel")
        raise _Stuck("s/l: lifted vector failed verification")


def cubic_step_p2mod3(C: Form, G: Sequence[Form] = (), budget: SearchBudget | None = None, **kwargs) -> ConstructOutcome:
    return CubicP2Mod3Driver(C, G, budget, **kwargs).run()


def cubic_step_p3(C: Form, G: Sequence[Form] = (), budget: SearchBudget | None = None, **kwargs) -> ConstructOutcome:
    return CubicP3Driver(C, G, budget, **kwargs).run()


__all__ = [
    "ConstructOutcome",
    "CubicP2Mod3Driver",
    "CubicP3Driver",
    "LevelBasis",
    "LevelEntry",
    "QuarticDriver",
    "clean_candidates",
    "clean_constraints",
    "cubic_step_p2mod3",
    "cubic_step_p3",
    "extend_clean_vector",
    "independent_by_expansion",
    "level",
    "merge_same_level",
    "quartic_zero_q2",
]
