"""Exhaustive residue search for common zeros, and local anisotropy certificates.

Search is two-phase: first every primitive vector of (Z/p^k)^n is tested
for vanishing of all forms modulo p^k (the compiled kernel does this part),
then each residue zero is handed to Hensel lifting.  Vectors are visited in
lexicographic order, so the first liftable witness is canonical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from . import kernels
from .errors import NotApplicable, PrecisionExhausted, RefusedTooLarge
from .forms import Form, VectorQp, evaluate
from .hensel import LiftReport, lift_smooth_point, smooth_point_report
from .padic import PadicScalar

DEFAULT_TARGET_PREC = 32


@dataclass(frozen=True)
class SearchBudget:
    k: int = 4
    max_candidates: int = 1 << 24
    parallel_width: int = 1
    max_hits: int = 4096

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be >= 1")


@dataclass
class SearchOutcome:
    status: str
    k: int
    examined: int = 0
    witness: VectorQp | None = None
    residue: tuple[int, ...] | None = None
    report: LiftReport | None = None
    precision: int | None = None

    @property
    def found(self) -> bool:
        return self.status == "zero_found"

    def to_record(self) -> dict:
        return {
            "status": self.status,
            "k": self.k,
            "examined": self.examined,
            "residue": list(self.residue) if self.residue is not None else None,
            "witness": self.witness.tokens() if self.witness is not None else None,
            "precision": self.precision,
            "lift": self.report.to_record() if self.report is not None else None,
        }


def primitive_count(n: int, p: int, k: int) -> int:
    return p ** (n * k) - p ** (n * (k - 1))


def _decode(index: int, n: int, M: int) -> tuple[int, ...]:
    digits = [0] * n
    for i in range(n - 1, -1, -1):
        index, digits[i] = divmod(index, M)
    return tuple(digits)


def _primitive_rank(index: int, n: int, p: int, M: int) -> int:
    """Number of primitive vectors with lexicographic index <= ``index``."""
    digits = _decode(index, n, M)
    q = M // p
    nonprim_below = 0
    for i, d in enumerate(digits):
        rest = n - i - 1
        nonprim_below += -(-d // p) * q**rest
        if d % p:
            break
    else:
        nonprim_below += 1  # the vector itself is non-primitive
    return index + 1 - nonprim_below


def enumerate_primitive(n: int, p: int, k: int, budget: SearchBudget | None = None) -> Iterator[tuple[int, ...]]:
    """Each primitive vector of (Z/p^k)^n once, lexicographically."""
    budget = budget or SearchBudget(k=k)
    count = primitive_count(n, p, k)
    if p ** (n * k) > budget.max_candidates:
        raise RefusedTooLarge(f"{count} primitive vectors exceed the budget {budget.max_candidates}")
    M = p**k
    for index in range(M**n):
        v = _decode(index, n, M)
        if any(x % p for x in v):
            yield v


def _integer_system(system: Sequence[Form], k: int):
    return [tuple(F.integer_coefficients(k)[:2]) for F in system]


def _scan_range(args):
    forms, n, p, k, start, stop, max_hits = args
    return kernels.scan_zeros(forms, n, p, k, start, stop, max_hits)


def residue_zero_indices(system: Sequence[Form], n: int, p: int, k: int, budget: SearchBudget) -> Iterator[int]:
    """Lexicographic indices of primitive common residue zeros mod p**k.

    With ``parallel_width > 1`` the index range is cut into strata by the
    leading coordinate and scanned concurrently; hits are still yielded in
    index order.
    """
    forms = _integer_system(system, k)
    M = p**k
    total = M**n
    if budget.parallel_width <= 1 or n == 1:
        start = 0
        while start < total:
            hits, start = kernels.scan_zeros(forms, n, p, k, start, total, budget.max_hits)
            yield from hits
        return
    size = M ** (n - 1)
    strata = [(i * size, (i + 1) * size) for i in range(M)]
    width = budget.parallel_width
    with ThreadPoolExecutor(max_workers=width) as pool:
        for w in range(0, len(strata), width):
            wave = strata[w : w + width]
            results = list(pool.map(_scan_range, [(forms, n, p, k, a, b, budget.max_hits) for a, b in wave]))
            for (a, b), (hits, nxt) in zip(wave, results):
                yield from hits
                while nxt < b:
                    hits, nxt = kernels.scan_zeros(forms, n, p, k, nxt, b, budget.max_hits)
                    yield from hits


def _representatives(residue: tuple[int, ...], M: int) -> list[tuple[int, ...]]:
    balanced = tuple(x - M if 2 * x > M else x for x in residue)
    return [residue] if balanced == residue else [residue, balanced]


def try_lift(system: Sequence[Form], residue: tuple[int, ...], p: int, k: int, target_prec: int):
    """Lift a residue zero to a vector vanishing to ``target_prec``, or None.

    Both the least non-negative and the balanced representatives are tried,
    so exact zeros with small negative coordinates are recognized.
    """
    M = p**k
    for rep in _representatives(residue, M):
        v = VectorQp.of(rep, p)
        if not system:
            return v, LiftReport("classical", math.inf, math.inf, None, v, v, target_prec)
        try:
            w = lift_smooth_point(system, v, target_prec)
        except (NotApplicable, PrecisionExhausted):
            continue
        report = smooth_point_report(system, v)
        if not report.applicable:
            report = LiftReport("classical", math.inf, math.inf, None, v)
        return w, report.with_root(w, target_prec)
    return None


def _common_n(system: Sequence[Form], n: int | None) -> tuple[int, int | None]:
    if system:
        ns = {F.n for F in system}
        ps = {F.p for F in system}
        if len(ns) != 1 or len(ps) != 1:
            raise ValueError("all forms must share n and p")
        return ns.pop(), ps.pop()
    if n is None:
        raise ValueError("n is required for an empty system")
    return n, None


def iter_zeros(
    system: Sequence[Form],
    budget: SearchBudget,
    *,
    n: int | None = None,
    p: int | None = None,
    target_prec: int = DEFAULT_TARGET_PREC,
    accept: Callable[[VectorQp], bool] | None = None,
) -> Iterator[SearchOutcome]:
    """Every liftable witness in canonical order, as ``zero_found`` outcomes."""
    system = list(system)
    n, sys_p = _common_n(system, n)
    p = sys_p if sys_p is not None else p
    if p is None:
        raise ValueError("p is required for an empty system")
    k = budget.k
    M = p**k
    if M**n > budget.max_candidates:
        raise RefusedTooLarge(f"{M}^{n} candidates exceed the budget {budget.max_candidates}")
    for index in residue_zero_indices(system, n, p, k, budget):
        residue = _decode(index, n, M)
        lifted = try_lift(system, residue, p, k, target_prec)
        if lifted is None:
            continue
        w, report = lifted
        if accept is not None and not accept(w):
            continue
        yield SearchOutcome(
            "zero_found", k, _primitive_rank(index, n, p, M), w, residue, report, target_prec
        )


def find_zero(
    system: Sequence[Form],
    budget: SearchBudget | None = None,
    *,
    n: int | None = None,
    p: int | None = None,
    target_prec: int = DEFAULT_TARGET_PREC,
    accept: Callable[[VectorQp], bool] | None = None,
) -> SearchOutcome:
    """First liftable primitive common zero, or an exhaustion/refusal outcome."""
    budget = budget or SearchBudget()
    system = list(system)
    n_, p_ = _common_n(system, n)
    p = p_ if p_ is not None else p
    try:
        for outcome in iter_zeros(system, budget, n=n_, p=p, target_prec=target_prec, accept=accept):
            return outcome
    except RefusedTooLarge:
        return SearchOutcome("refused_too_large", budget.k, 0)
    return SearchOutcome("exhausted_no_liftable", budget.k, primitive_count(n_, p, budget.k))


def verify_witness(system: Sequence[Form], w: VectorQp, precision: int) -> bool:
    """True when w is non-zero and every form vanishes at w to ``precision``."""
    if w.is_zero():
        return False
    return all(evaluate(F, w).valuation() >= precision for F in system)


# ---------------------------------------------------------------------------
# anisotropy


@dataclass
class BlockTable:
    variables: list[int]
    first_prim: list[int]
    first_nonprim: list[int]

    def primitive_values(self) -> list[int]:
        return [r for r, i in enumerate(self.first_prim) if i >= 0]

    def nonprimitive_values(self) -> list[int]:
        return [r for r, i in enumerate(self.first_nonprim) if i >= 0]


@dataclass
class AnisotropyOutcome:
    status: str
    k: int
    modulus: int
    witness: tuple[int, ...] | None = None
    blocks: list[BlockTable] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == "certified_anisotropic"

    def to_record(self) -> dict:
        rec = {"status": self.status, "k": self.k, "modulus": self.modulus}
        if self.witness is not None:
            rec["witness"] = list(self.witness)
        if self.status == "certified_anisotropic":
            rec["certificate"] = [
                {
                    "variables": [i + 1 for i in b.variables],
                    "primitive_values": b.primitive_values(),
                    "nonprimitive_values": b.nonprimitive_values(),
                }
                for b in self.blocks
            ]
        return rec


def anisotropy_witness(F: Form, k: int, budget: SearchBudget | None = None) -> AnisotropyOutcome:
    """A primitive zero of F mod p**k, or a certificate that none exists.

    F is split into variable blocks (``Form.blocks``).  For each block the
    residues taken on primitive and on non-primitive block vectors are
    tabulated; a vector of the whole space is primitive exactly when some
    block component is, so a primitive zero exists iff some choice of one
    residue per block, at least one from a primitive table, sums to 0.
    """
    budget = budget or SearchBudget(k=k)
    p = F.p
    M = p**k
    exps, coeffs, _ = F.integer_coefficients(k)
    tables: list[BlockTable] = []
    for block in F.blocks():
        if M ** len(block) > budget.max_candidates:
            return AnisotropyOutcome("refused_too_large", k, M)
        pos = {v: i for i, v in enumerate(block)}
        b_exps, b_coeffs = [], []
        for e, c in zip(exps, coeffs):
            if any(e[v] for v in block):
                b_exps.append(tuple(e[v] for v in block))
                b_coeffs.append(c)
        if not b_exps:
            # unused variables contribute the value 0 whatever they are
            fp, fn = kernels.residue_tables([(0,) * len(block)], [0], len(block), p, k)
        else:
            fp, fn = kernels.residue_tables(b_exps, b_coeffs, len(block), p, k)
        del pos
        tables.append(BlockTable(block, fp, fn))

    # reachable[(residue, any_primitive)] -> (previous state, block value, block flag)
    layers = [{(0, False): None}]
    for table in tables:
        options = [(r, True) for r in table.primitive_values()] + [(r, False) for r in table.nonprimitive_values()]
        nxt: dict = {}
        for state in sorted(layers[-1]):
            s, flag = state
            for r, f in options:
                key = ((s + r) % M, flag or f)
                if key not in nxt:
                    nxt[key] = (state, r, f)
        layers.append(nxt)
    if (0, True) not in layers[-1]:
        return AnisotropyOutcome("certified_anisotropic", k, M, None, tables)

    witness = [0] * F.n
    state = (0, True)
    for depth in range(len(tables), 0, -1):
        prev, r, f = layers[depth][state]
        table = tables[depth - 1]
        index = (table.first_prim if f else table.first_nonprim)[r]
        for var, x in zip(table.variables, _decode(index, len(table.variables), M)):
            witness[var] = x
        state = prev
    return AnisotropyOutcome("zero_found", k, M, tuple(witness), tables)


def terjanian_block(p: int = 2) -> Form:
    """The ternary quartic x^4+y^4+z^4 - (x^2y^2+x^2z^2+y^2z^2) - xyz(x+y+z)."""
    terms = {
        (4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1,
        (2, 2, 0): -1, (2, 0, 2): -1, (0, 2, 2): -1,
        (2, 1, 1): -1, (1, 2, 1): -1, (1, 1, 2): -1,
    }
    return Form.build(p, 3, 4, terms)


def terjanian_form(p: int = 2) -> Form:
    """Three copies of the block plus four times three further copies (18 variables)."""
    block = terjanian_block(p)
    terms = []
    for b in range(6):
        scale = 1 if b < 3 else 4
        for e, c in block.terms:
            exp = [0] * 18
            exp[3 * b : 3 * b + 3] = e
            terms.append((tuple(exp), c * scale))
    return Form.build(p, 18, 4, terms)


__all__ = [
    "AnisotropyOutcome",
    "BlockTable",
    "SearchBudget",
    "SearchOutcome",
    "anisotropy_witness",
    "enumerate_primitive",
    "find_zero",
    "iter_zeros",
    "primitive_count",
    "terjanian_block",
    "terjanian_form",
    "try_lift",
    "verify_witness",
    "PadicScalar",
]
