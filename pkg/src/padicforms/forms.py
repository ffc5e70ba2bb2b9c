"""Homogeneous forms over Q_p as sparse exponent maps.

Exponent vectors are tuples of length ``n``; a form keeps its terms sorted
lexicographically by exponent so that two equal forms compare equal.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import FormatError
from .padic import (
    Number,
    PadicScalar,
    from_rational,
    get_working_precision,
    parse_scalar,
)

Exponent = tuple[int, ...]
Slot = tuple[Exponent, int]


@dataclass(frozen=True)
class VectorQp:
    entries: tuple[PadicScalar, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty vector")
        p = self.entries[0].p
        if any(e.p != p for e in self.entries):
            raise ValueError("entries over different primes")

    @classmethod
    def of(cls, values: Iterable[Number], p: int, prec: int | None = None) -> VectorQp:
        return cls(tuple(PadicScalar.coerce(v, p, prec) for v in values))

    @classmethod
    def basis_vector(cls, i: int, n: int, p: int) -> VectorQp:
        return cls.of([1 if j == i else 0 for j in range(n)], p)

    @property
    def p(self) -> int:
        return self.entries[0].p

    @property
    def n(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> PadicScalar:
        return self.entries[i]

    def __add__(self, other: VectorQp) -> VectorQp:
        _check_dims(self.n, other.n)
        return VectorQp(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: VectorQp) -> VectorQp:
        _check_dims(self.n, other.n)
        return VectorQp(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> VectorQp:
        return VectorQp(tuple(-a for a in self.entries))

    def scale(self, c: Number) -> VectorQp:
        c = PadicScalar.coerce(c, self.p)
        return VectorQp(tuple(c * a for a in self.entries))

    def shift(self, k: int) -> VectorQp:
        """Multiply every coordinate by p**k."""
        return VectorQp(tuple(a.shift(k) for a in self.entries))

    def is_zero(self) -> bool:
        return all(a.is_zero for a in self.entries)

    def min_valuation(self) -> float | int:
        return min(a.valuation() for a in self.entries)

    def is_primitive(self) -> bool:
        return self.min_valuation() == 0

    def primitive(self) -> VectorQp:
        """The rescaling by a power of p whose minimum valuation is 0."""
        m = self.min_valuation()
        if m == float("inf"):
            raise ValueError("zero vector has no primitive rescaling")
        return self.shift(-int(m))

    def to_ints(self, balanced: bool = False) -> tuple[int, ...]:
        if balanced:
            return tuple(a.to_balanced_int() for a in self.entries)
        return tuple(a.to_int() for a in self.entries)

    def reduce_mod(self, k: int) -> tuple[int, ...]:
        return tuple(a.reduce_mod(k) for a in self.entries)

    def tokens(self) -> list[str]:
        return [a.token() for a in self.entries]

    def __str__(self) -> str:
        return "(" + ", ".join(a.token() for a in self.entries) + ")"


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


# ---------------------------------------------------------------------------
# sparse polynomial helpers (dict exponent -> scalar)


def _poly_mul(a: Mapping[Exponent, PadicScalar], b: Mapping[Exponent, PadicScalar]) -> dict:
    out: dict[Exponent, PadicScalar] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = ca * cb
            prev = out.get(e)
            out[e] = c if prev is None else prev + c
    return out


def _linear_form(coeffs: Sequence[PadicScalar], exact_prec: int) -> dict:
    k = len(coeffs)
    lin = {}
    for i, c in enumerate(coeffs):
        # an entry known to be 0 at working precision is treated as exact
        if c.is_zero and c.absprec >= exact_prec:
            continue
        lin[tuple(1 if j == i else 0 for j in range(k))] = c
    return lin


@dataclass(frozen=True)
class Form:
    """A degree-``d`` form in ``n`` variables over Q_p."""

    p: int
    n: int
    d: int
    terms: tuple[tuple[Exponent, PadicScalar], ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for exp, c in self.terms:
            if len(exp) != self.n:
                raise ValueError(f"exponent {exp} has wrong length for n={self.n}")
            if sum(exp) != self.d or min(exp, default=0) < 0:
                raise ValueError(f"exponent {exp} is not of degree {self.d}")
            if c.is_zero:
                raise ValueError("zero-marked coefficients are not stored")
            if c.p != self.p:
                raise ValueError("coefficient over a different prime")
        object.__setattr__(self, "_index", dict(self.terms))

    @classmethod
    def build(cls, p: int, n: int, d: int, mapping: Mapping[Exponent, Number] | Iterable) -> Form:
        """Combine duplicate exponents, drop zero coefficients, sort terms."""
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict[Exponent, PadicScalar] = {}
        for exp, c in items:
            exp = tuple(int(x) for x in exp)
            c = PadicScalar.coerce(c, p)
            acc[exp] = acc[exp] + c if exp in acc else c
        terms = tuple(sorted((e, c) for e, c in acc.items() if not c.is_zero))
        return cls(p, n, d, terms)

    @classmethod
    def from_dict(cls, p: int, mapping: Mapping[Exponent, Number]) -> Form:
        """Infer ``n`` and ``d`` from the exponent vectors."""
        if not mapping:
            raise ValueError("cannot infer n and d from an empty mapping")
        exp = next(iter(mapping))
        return cls.build(p, len(exp), sum(exp), mapping)

    def coeff(self, exp: Exponent) -> PadicScalar:
        c = self._index.get(tuple(exp))
        return c if c is not None else PadicScalar.zero(self.p)

    def as_dict(self) -> dict[Exponent, PadicScalar]:
        return dict(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, c: Number) -> Form:
        c = PadicScalar.coerce(c, self.p)
        return Form.build(self.p, self.n, self.d, ((e, a * c) for e, a in self.terms))

    def shift(self, k: int) -> Form:
        """Multiply the form by p**k."""
        return Form(self.p, self.n, self.d, tuple((e, a.shift(k)) for e, a in self.terms))

    def __add__(self, other: Form) -> Form:
        if (self.p, self.n, self.d) != (other.p, other.n, other.d):
            raise ValueError("forms of different shape")
        return Form.build(self.p, self.n, self.d, list(self.terms) + list(other.terms))

    def min_valuation(self) -> float | int:
        return min((c.valuation() for _, c in self.terms), default=float("inf"))

    def is_integral(self) -> bool:
        return self.min_valuation() >= 0

    def variables_used(self) -> set[int]:
        return {i for e, _ in self.terms for i, x in enumerate(e) if x}

    def blocks(self) -> list[list[int]]:
        """Connected components of variables linked by shared monomials.

        A form whose monomials split into disjoint variable sets is the sum
        of the forms on those sets.  Unused variables form singleton blocks.
        """
        parent = list(range(self.n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for e, _ in self.terms:
            idx = [i for i, x in enumerate(e) if x]
            for a, b in zip(idx, idx[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for i in range(self.n):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def sub_form(self, variables: Sequence[int]) -> Form:
        """The terms supported on ``variables``, as a form in those variables."""
        keep = set(variables)
        terms = []
        for e, c in self.terms:
            if all(x == 0 or i in keep for i, x in enumerate(e)):
                terms.append((tuple(e[i] for i in variables), c))
        return Form.build(self.p, len(variables), self.d, terms)

    def integer_coefficients(self, k: int) -> tuple[list[Exponent], list[int], int]:
        """Exponents and residues mod p**k of the form scaled to be primitive integral.

        Returns ``(exponents, residues, shift)`` where the residues belong to
        ``p**shift * F``.  Zeros of the scaled form are zeros of ``F``.
        """
        from .errors import PrecisionExhausted

        m = self.min_valuation()
        shift = 0 if m == float("inf") else -int(m)
        exps, vals = [], []
        for e, c in self.terms:
            c = c.shift(shift)
            if c.absprec < k:
                raise PrecisionExhausted(f"coefficient {c.token()} not known mod {self.p}^{k}")
            exps.append(e)
            vals.append(c.reduce_mod(k))
        return exps, vals, shift

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(f"x{i + 1}" + (f"^{x}" if x > 1 else "") for i, x in enumerate(e) if x)
            parts.append(f"({c.token()})*{mono}" if mono else f"({c.token()})")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# operations


def _as_vector(v, p: int) -> VectorQp:
    return v if isinstance(v, VectorQp) else VectorQp.of(v, p)


def evaluate(F: Form, v) -> PadicScalar:
    """F(v), with precision propagated through every term."""
    v = _as_vector(v, F.p)
    _check_dims(F.n, v.n)
    one = PadicScalar.from_int(1, F.p)
    powers = []
    for x in v.entries:
        row = [one]
        for _ in range(F.d):
            row.append(row[-1] * x)
        powers.append(row)
    total = PadicScalar.zero(F.p)
    first = True
    for e, c in F.terms:
        t = c
        for i, x in enumerate(e):
            if x:
                t = t * powers[i][x]
        total = t if first else total + t
        first = False
    return total


def restrict(F: Form, basis: Sequence) -> Form:
    """The form G(x_1..x_k) = F(x_1 b_1 + ... + x_k b_k)."""
    basis = [_as_vector(b, F.p) for b in basis]
    for b in basis:
        _check_dims(F.n, b.n)
    k = len(basis)
    if k == 0:
        raise ValueError("restriction to an empty basis")
    exact = get_working_precision()
    columns = [_linear_form([b.entries[j] for b in basis], exact) for j in range(F.n)]
    zero_exp = (0,) * k
    one = PadicScalar.from_int(1, F.p)
    power_cache: dict[tuple[int, int], dict] = {}

    def col_power(j: int, e: int) -> dict:
        key = (j, e)
        if key not in power_cache:
            if e == 0:
                power_cache[key] = {zero_exp: one}
            else:
                power_cache[key] = _poly_mul(col_power(j, e - 1), columns[j])
        return power_cache[key]

    acc: dict[Exponent, PadicScalar] = {}
    for e, c in F.terms:
        poly = {zero_exp: c}
        for j, x in enumerate(e):
            if x:
                poly = _poly_mul(poly, col_power(j, x))
                if not poly:
                    break
        for ex, cx in poly.items():
            prev = acc.get(ex)
            acc[ex] = cx if prev is None else prev + cx
    return Form.build(F.p, k, F.d, acc)


def gradient(F: Form, v) -> VectorQp:
    """All partial derivatives of F at v."""
    v = _as_vector(v, F.p)
    _check_dims(F.n, v.n)
    parts = []
    for i in range(F.n):
        total = PadicScalar.zero(F.p)
        for e, c in F.terms:
            if e[i] == 0:
                continue
            t = c * e[i]
            for j, x in enumerate(e):
                power = x - 1 if j == i else x
                if power:
                    t = t * v.entries[j] ** power
            total = total + t
        parts.append(total)
    return VectorQp(tuple(parts))


@dataclass(frozen=True)
class Expansion:
    """Coefficients of F(x_1 e_1 + ... + x_k e_k + t e) grouped by (x-exponent, t-power).

    Slot ``(d, j)`` holds the coefficient of ``x**d * t**j``; for ``j = 1, 2, 3``
    these are the values at ``e`` of the linear, quadratic and cubic
    coefficient forms.  Missing slots are zero.
    """

    degree: int
    basis: tuple[VectorQp, ...]
    direction: VectorQp
    slots: dict[Slot, PadicScalar]

    @property
    def k(self) -> int:
        return len(self.basis)

    def slot(self, d: Exponent, j: int) -> PadicScalar:
        c = self.slots.get((tuple(d), j))
        return c if c is not None else PadicScalar.zero(self.direction.p)

    def value_at_direction(self) -> PadicScalar:
        """F(e), the coefficient of t**degree."""
        return self.slot((0,) * self.k, self.degree)

    def slots_with_t_power(self, j: int) -> dict[Slot, PadicScalar]:
        return {s: c for s, c in self.slots.items() if s[1] == j}

    def nonzero_mixed_slots(self) -> dict[Slot, PadicScalar]:
        """Slots with 1 <= j < degree that are not zero to precision."""
        return {s: c for s, c in self.slots.items() if 0 < s[1] < self.degree and not c.is_zero}

    def resum(self, x: Sequence[Number], t: Number) -> PadicScalar:
        p = self.direction.p
        x = [PadicScalar.coerce(a, p) for a in x]
        t = PadicScalar.coerce(t, p)
        total = PadicScalar.zero(p)
        for (d, j), c in self.slots.items():
            term = c * t**j
            for xi, di in zip(x, d):
                if di:
                    term = term * xi**di
            total = total + term
        return total


def directional_expand(F: Form, basis: Sequence, e) -> Expansion:
    basis = tuple(_as_vector(b, F.p) for b in basis)
    e = _as_vector(e, F.p)
    G = restrict(F, list(basis) + [e])
    k = len(basis)
    slots = {(exp[:k], exp[k]): c for exp, c in G.terms}
    return Expansion(F.d, basis, e, slots)


def expansion_forms(F: Form, basis: Sequence, t_powers: Iterable[int] | None = None) -> dict[Slot, Form]:
    """Coefficient forms of the expansion as forms in the direction's coordinates.

    Slot ``(d, j)`` maps to the degree-``j`` form ``y -> coefficient of x**d t**j``
    in ``F(sum x_i e_i + t y)``.  Identically vanishing slots are omitted.
    """
    basis = [_as_vector(b, F.p) for b in basis]
    k = len(basis)
    wanted = set(range(1, F.d + 1)) if t_powers is None else set(t_powers)
    std = [VectorQp.basis_vector(i, F.n, F.p) for i in range(F.n)]
    G = restrict(F, basis + std)
    grouped: dict[Slot, dict[Exponent, PadicScalar]] = {}
    for exp, c in G.terms:
        d, y = exp[:k], exp[k:]
        j = sum(y)
        if j not in wanted:
            continue
        grouped.setdefault((d, j), {})[y] = c
    out = {}
    for (d, j), terms in sorted(grouped.items()):
        form = Form.build(F.p, F.n, j, terms)
        if not form.is_zero():
            out[(d, j)] = form
    return out


def rank(vectors: Sequence[VectorQp]) -> int:
    """Rank over Q_p by elimination pivoting on the least valuation.

    Entries that become zero to precision are treated as zero.
    """
    rows = [list(v.entries) for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        best = None
        for i in range(r, len(rows)):
            a = rows[i][col]
            if not a.is_zero and (best is None or a.val < rows[best][col].val):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][col]
        for i in range(r + 1, len(rows)):
            a = rows[i][col]
            if a.is_zero:
                continue
            factor = a / piv
            rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


# ---------------------------------------------------------------------------
# text formats

_HEADER = re.compile(r"^\s*p\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s+d\s*=\s*(\d+)(?:\s+prec\s*=\s*(\d+))?\s*$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_form(text: str) -> Form:
    """Parse the ``p=.. n=.. d=.. prec=..`` header plus one term per line."""
    lines = [_strip(l) for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines:
        raise FormatError("empty form file")
    m = _HEADER.match(lines[0])
    if not m:
        raise FormatError(f"bad header line: {lines[0]!r}")
    p, n, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
    prec = int(m.group(4)) if m.group(4) else get_working_precision()
    if p < 2 or n < 1 or d < 1:
        raise FormatError("header needs p >= 2, n >= 1, d >= 1")
    terms = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != n + 1:
            raise FormatError(f"term line needs a coefficient and {n} exponents: {line!r}")
        coeff = parse_scalar(parts[0], p, prec)
        try:
            exp = tuple(int(x) for x in parts[1:])
        except ValueError as exc:
            raise FormatError(f"bad exponent in {line!r}") from exc
        if sum(exp) != d or min(exp) < 0:
            raise FormatError(f"exponents {exp} do not have degree {d}")
        terms.append((exp, coeff))
    return Form.build(p, n, d, terms)


def format_form(F: Form, prec: int | None = None) -> str:
    prec = get_working_precision() if prec is None else prec
    lines = [f"p={F.p} n={F.n} d={F.d} prec={prec}"]
    for e, c in F.terms:
        if c.val >= 0 and c.prec >= prec:
            tok = str(c.to_balanced_int())
        else:
            tok = c.token()
        lines.append(tok + " " + " ".join(str(x) for x in e))
    return "\n".join(lines) + "\n"


def load_form(path) -> Form:
    with open(path, encoding="utf-8") as fh:
        return parse_form(fh.read())


def parse_vector(text: str, p: int, prec: int | None = None) -> VectorQp:
    tokens = [t for t in re.split(r"[\s,()]+", text.strip()) if t]
    if not tokens:
        raise FormatError("empty vector")
    return VectorQp(tuple(parse_scalar(t, p, prec) for t in tokens))


def parse_vectors(text: str, p: int, prec: int | None = None) -> list[VectorQp]:
    out = []
    for line in text.splitlines():
        line = _strip(line)
        if line:
            out.append(parse_vector(line, p, prec))
    return out


def load_vectors(path, p: int) -> list[VectorQp]:
    with open(path, encoding="utf-8") as fh:
        return parse_vectors(fh.read(), p)


def monomials(n: int, d: int) -> Iterable[Exponent]:
    """All exponent vectors of length n and total degree d, lexicographically."""
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        yield tuple(e)


__all__ = [
    "Expansion",
    "Form",
    "VectorQp",
    "directional_expand",
    "evaluate",
    "expansion_forms",
    "format_form",
    "gradient",
    "load_form",
    "load_vectors",
    "monomials",
    "parse_form",
    "parse_vector",
    "parse_vectors",
    "rank",
    "restrict",
    "from_rational",
]
