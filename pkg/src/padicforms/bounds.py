"""Upper bounds for V(r3, r2, r1; p) by rewriting, with replayable certificates.

V(r3, r2, r1; p) is the least n such that every system of r3 cubic, r2
quadratic and r1 linear forms over Q_p in more than n variables has a common
non-trivial zero.  Each cubic reduction rule trades one cubic for more
quadratics and linear forms; once no cubics remain the quadratic base bound
is used and the linear forms add r1 (restricting to their common kernel).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

from .errors import NoRuleAvailable, NotApplicable

PRIME_CLASSES = ("p2", "p3", "p1mod3", "p2mod3", "any")
CUBIC_RULES = ("lemma2", "lemma6", "lemma8")
RULES = CUBIC_RULES + ("eliminate_linears", "quad_base")
MAX_R3 = 8

# classes in which each cubic rule holds
_RULE_CLASSES = {
    "lemma2": {"p2", "p1mod3", "p2mod3"},  # p != 3
    "lemma6": {"p2", "p2mod3"},  # p = 2 mod 3
    "lemma8": {"p3"},
}


def prime_class_of(p: int) -> str:
    if p == 2:
        return "p2"
    if p == 3:
        return "p3"
    return "p1mod3" if p % 3 == 1 else "p2mod3"


@dataclass(frozen=True)
class BoundState:
    r3: int
    r2: int
    r1: int
    prime_class: str = "any"

    def __post_init__(self):
        if min(self.r3, self.r2, self.r1) < 0:
            raise ValueError("counts must be non-negative")
        if self.prime_class not in PRIME_CLASSES:
            raise ValueError(f"unknown prime class {self.prime_class!r}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r3, self.r2, self.r1)

    def __str__(self) -> str:
        return f"V({self.r3},{self.r2},{self.r1};{self.prime_class})"


@dataclass(frozen=True)
class QuadBase:
    """Bounds for V(0, r, 0; p), the quadratic-system base case.

    ``table`` overrides small r; r >= 6 uses 2r^2 - 16 (even) / 2r^2 - 14
    (odd) unless ``formula`` is given.  Without a table entry, r in 3..5
    falls back to 2r^2 + 2 when ``fallback`` is set.  ``per_class`` holds
    per-prime-class table overrides layered on top of ``table``.
    """

    table: tuple[tuple[int, int], ...] = ((0, 0), (1, 4), (2, 8))
    fallback: bool = True
    formula: Callable[[int], int] | None = None
    per_class: tuple[tuple[str, tuple[tuple[int, int], ...]], ...] = ()

    @classmethod
    def with_overrides(cls, overrides: Mapping[int, int] | None = None,
                       per_class: Mapping[str, Mapping[int, int]] | None = None, **kw) -> QuadBase:
        table = dict(cls.table)
        table.update({int(k): int(v) for k, v in (overrides or {}).items()})
        pc = tuple(sorted((c, tuple(sorted((int(k), int(v)) for k, v in m.items())))
                          for c, m in (per_class or {}).items()))
        return cls(tuple(sorted(table.items())), per_class=pc, **kw)

    def overrides_record(self) -> dict:
        rec = {"table": {str(r): v for r, v in self.table}}
        if self.per_class:
            rec["per_class"] = {c: {str(r): v for r, v in m} for c, m in self.per_class}
        if not self.fallback:
            rec["fallback"] = False
        return rec

    @classmethod
    def from_record(cls, rec: Mapping | None) -> QuadBase:
        if not rec:
            return cls()
        table = {int(k): int(v) for k, v in rec.get("table", {}).items()}
        per_class = rec.get("per_class", {})
        base = cls(tuple(sorted(table.items())), fallback=rec.get("fallback", True))
        if per_class:
            pc = tuple(sorted((c, tuple(sorted((int(k), int(v)) for k, v in m.items())))
                              for c, m in per_class.items()))
            base = QuadBase(base.table, base.fallback, base.formula, pc)
        return base

    def lookup(self, r: int, prime_class: str = "any") -> tuple[int, str]:
        if r < 0:
            raise ValueError("r must be non-negative")
        for c, m in self.per_class:
            if c == prime_class:
                hit = dict(m).get(r)
                if hit is not None:
                    return hit, f"table[{prime_class}]"
        hit = dict(self.table).get(r)
        if hit is not None:
            return hit, "table"
        if self.formula is not None:
            return self.formula(r), "formula"
        if r >= 6:
            return (2 * r * r - 16 if r % 2 == 0 else 2 * r * r - 14), "quadratic-formula"
        if self.fallback and r >= 3:
            return 2 * r * r + 2, "fallback"
        raise NoRuleAvailable(f"no base bound for {r} quadratics")


DEFAULT_BASE = QuadBase()


def quad_base_bound(r: int, prime_class: str = "any", base: QuadBase | None = None) -> int:
    return (base or DEFAULT_BASE).lookup(r, prime_class)[0]


def rule_applies(rule: str, s: BoundState) -> bool:
    if rule in CUBIC_RULES:
        return s.r3 >= 1 and s.prime_class in _RULE_CLASSES[rule]
    if rule in ("quad_base", "eliminate_linears"):
        return s.r3 == 0
    raise ValueError(f"unknown rule {rule!r}")


def apply_rule(rule: str, s: BoundState, base: QuadBase | None = None) -> BoundState | int:
    """One rewrite step; terminal rules return the integer bound."""
    if not rule_applies(rule, s):
        raise NotApplicable(f"{rule} does not apply to {s}")
    r3, r2, r1 = s.as_tuple()
    if rule == "lemma2":
        return BoundState(r3 - 1, 6 * (r3 - 1) + r2, 9 * r3 + 6 * r2 + r1, s.prime_class)
    if rule == "lemma6":
        return BoundState(r3 - 1, 3 * r3 + r2, 3 * r3 + 3 * r2 + r1, s.prime_class)
    if rule == "lemma8":
        return BoundState(r3 - 1, 3 * r3 + r2, 6 * r3 + 3 * r2 + r1, s.prime_class)
    # quad_base and eliminate_linears: linear forms are removed by restriction
    return quad_base_bound(r2, s.prime_class, base) + r1


@dataclass
class Step:
    rule: str
    before: BoundState
    after: BoundState


@dataclass
class Certificate:
    start: BoundState
    steps: list[Step] = field(default_factory=list)
    base_r: int = 0
    base_value: int = 0
    base_source: str = ""
    bound: int = 0
    base: dict = field(default_factory=dict)

    def rules(self) -> list[str]:
        return [s.rule for s in self.steps]

    def to_json(self) -> dict:
        return {
            "start": asdict(self.start),
            "steps": [{"rule": s.rule, "in": asdict(s.before), "out": asdict(s.after)} for s in self.steps],
            "terminal": {"rule": "quad_base", "r2": self.base_r, "value": self.base_value,
                         "source": self.base_source},
            "bound": self.bound,
            "base": self.base,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, rec: Mapping) -> Certificate:
        start = BoundState(**rec["start"])
        steps = [Step(s["rule"], BoundState(**s["in"]), BoundState(**s["out"])) for s in rec.get("steps", [])]
        term = rec.get("terminal", {})
        return cls(start, steps, int(term.get("r2", 0)), int(term.get("value", 0)),
                   str(term.get("source", "")), int(rec["bound"]), dict(rec.get("base", {})))

    @classmethod
    def loads(cls, text: str) -> Certificate:
        return cls.from_json(json.loads(text))


def best_bound(s: BoundState, base: QuadBase | None = None) -> tuple[int, Certificate]:
    """Least bound over all rule chains; ties go to the lexicographically least chain."""
    base = base or DEFAULT_BASE
    if s.r3 > MAX_R3:
        raise ValueError(f"r3 = {s.r3} exceeds the search limit {MAX_R3}")

    @lru_cache(maxsize=None)
    def search(state: BoundState) -> tuple[int, tuple[str, ...]]:
        if state.r3 == 0:
            return apply_rule("quad_base", state, base), ()
        best = None
        for rule in CUBIC_RULES:
            if not rule_applies(rule, state):
                continue
            try:
                value, chain = search(apply_rule(rule, state, base))
            except NoRuleAvailable:
                continue
            cand = (value, (rule,) + chain)
            if best is None or cand < best:
                best = cand
        if best is None:
            raise NoRuleAvailable(f"no cubic rule applies to {state}")
        return best

    value, chain = search(s)
    cert = Certificate(s, base=base.overrides_record())
    state = s
    for rule in chain:
        nxt = apply_rule(rule, state, base)
        cert.steps.append(Step(rule, state, nxt))
        state = nxt
    cert.base_r = state.r2
    cert.base_value, cert.base_source = base.lookup(state.r2, state.prime_class)
    cert.bound = cert.base_value + state.r1
    assert cert.bound == value
    return value, cert


def chain_bound(s: BoundState, rules: list[str], base: QuadBase | None = None) -> int:
    """Bound from a fixed rule chain followed by the quadratic base."""
    state = s
    for rule in rules:
        state = apply_rule(rule, state, base)
    return apply_rule("quad_base", state, base)


def certificate_replay(c: Certificate) -> bool:
    """Recompute every step and the terminal arithmetic; False on any mismatch."""
    try:
        base = QuadBase.from_record(c.base)
        state = c.start
        for step in c.steps:
            if step.before != state:
                return False
            if apply_rule(step.rule, state, base) != step.after:
                return False
            state = step.after
        if state.r3 != 0:
            return False
        value, _ = base.lookup(state.r2, state.prime_class)
        if c.steps or c.base_value:
            if c.base_r != state.r2 or c.base_value != value:
                return False
        return c.bound == value + state.r1
    except (NotApplicable, NoRuleAvailable, ValueError, KeyError):
        return False


def v33_table(base: QuadBase | None = None) -> dict:
    """Bounds for two cubic forms per prime class, and their maximum."""
    rows = {}
    for cls in ("p2", "p3", "p1mod3", "p2mod3"):
        value, cert = best_bound(BoundState(2, 0, 0, cls), base)
        rows[cls] = {"bound": value, "chain": cert.rules()}
    return {"per_class": rows, "max": max(r["bound"] for r in rows.values())}


__all__ = [
    "BoundState",
    "Certificate",
    "PRIME_CLASSES",
    "QuadBase",
    "RULES",
    "Step",
    "apply_rule",
    "best_bound",
    "certificate_replay",
    "chain_bound",
    "prime_class_of",
    "quad_base_bound",
    "rule_applies",
    "v33_table",
]
