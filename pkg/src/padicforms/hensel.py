"""Root lifting over Z_p.

Three situations are handled:

* ``classical``: nu(f(x)) > 2 nu(f'(x)); plain Newton iteration converges.
* ``variant-strict`` / ``variant-equality``: nu(f'(x)) = a >= 1,
  nu(f(x)) = 2a and nu(f''(x)/2) >= 1.  Substituting t = x + p^a u turns
  f(t)/p^(2a) into a polynomial that is linear and non-degenerate mod p,
  so one residue step lands in the classical case.  The two labels only
  record whether 2a is strictly larger than a**2 (a = 1) or equal (a = 2).
* ``smooth-point``: a system of forms at a vector whose residuals exceed
  twice the valuation of some maximal Jacobian minor.

The weaker hypothesis ``nu(f(x)) >= nu(f'(x))**2`` is *not* sufficient when
nu(f'(x)) <= 1: t^3 + t + 1 at p = 2, x = 0 meets it and has no even root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import NotApplicable, PrecisionExhausted
from .forms import Form, VectorQp, evaluate, gradient, restrict
from .padic import Number, PadicScalar

MAX_NEWTON_STEPS = 64

BRANCHES = ("classical", "variant-strict", "variant-equality", "smooth-point", "inapplicable")


@dataclass(frozen=True)
class UniPoly:
    """f(t) = sum c_j t**j with p-adic coefficients, lowest degree first."""

    p: int
    coeffs: tuple[PadicScalar, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        if self.coeffs[-1].is_zero:
            raise ValueError("leading coefficient is zero-marked")

    @classmethod
    def of(cls, p: int, coeffs: Sequence[Number]) -> UniPoly:
        cs = [PadicScalar.coerce(c, p) for c in coeffs]
        while len(cs) > 1 and cs[-1].is_zero:
            cs.pop()
        return cls(p, tuple(cs))

    @classmethod
    def from_line(cls, F: Form, base, direction) -> UniPoly:
        """t -> F(base + t * direction)."""
        G = restrict(F, [base, direction])
        cs = [G.coeff((F.d - j, j)) for j in range(F.d + 1)]
        return cls.of(F.p, cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_integral(self) -> bool:
        return all(c.is_zero or c.val >= 0 for c in self.coeffs)

    def _horner(self, coeffs, t: PadicScalar) -> PadicScalar:
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * t + c
        return acc

    def __call__(self, t: Number) -> PadicScalar:
        return self._horner(self.coeffs, PadicScalar.coerce(t, self.p))

    def derivative(self, t: Number) -> PadicScalar:
        if self.degree == 0:
            return PadicScalar.zero(self.p)
        cs = [c * j for j, c in enumerate(self.coeffs)][1:]
        return self._horner(cs, PadicScalar.coerce(t, self.p))

    def taylor2(self, t: Number) -> PadicScalar:
        """Second Taylor coefficient, i.e. f''(t)/2 without dividing by 2."""
        if self.degree < 2:
            return PadicScalar.zero(self.p)
        cs = [c * (j * (j - 1) // 2) for j, c in enumerate(self.coeffs)][2:]
        return self._horner(cs, PadicScalar.coerce(t, self.p))

    def integer_coeffs(self) -> list[int]:
        return [c.to_int() for c in self.coeffs]


@dataclass(frozen=True)
class LiftReport:
    branch: str
    v_f: float | int
    v_fprime: float | int
    v_half_second: float | int | None
    x: object = None
    root: object = None
    precision: int | None = None
    literal_hypothesis: bool | None = None

    @property
    def applicable(self) -> bool:
        return self.branch != "inapplicable"

    def with_root(self, root, precision: int) -> LiftReport:
        return LiftReport(
            self.branch, self.v_f, self.v_fprime, self.v_half_second,
            self.x, root, precision, self.literal_hypothesis,
        )

    def to_record(self) -> dict:
        def v(a):
            return "inf" if a == math.inf else a

        def tok(a):
            if a is None:
                return None
            if isinstance(a, PadicScalar):
                return a.token()
            if isinstance(a, VectorQp):
                return a.tokens()
            return a

        return {
            "branch": self.branch,
            "v_f": v(self.v_f),
            "v_fprime": v(self.v_fprime),
            "v_half_second": None if self.v_half_second is None else v(self.v_half_second),
            "x": tok(self.x),
            "root": tok(self.root),
            "precision": self.precision,
            "literal_hypothesis": self.literal_hypothesis,
        }


def literal_hypothesis(v_f, v_d, v_s) -> bool:
    """The weaker textbook-variant condition nu(f) >= nu(f')**2 (plus f''/2 on equality)."""
    if v_d == math.inf:
        return v_f == math.inf
    if v_f > v_d**2:
        return True
    return v_f == v_d**2 and v_s >= 1


def classify(v_f, v_d, v_s) -> str:
    if v_f == math.inf and v_d == math.inf:
        # x is a root to working precision; no Newton step is needed
        return "classical"
    if v_f > 2 * v_d:
        return "classical"
    if v_d >= 1 and v_f == 2 * v_d and v_s >= 1:
        return "variant-strict" if v_f > v_d**2 else "variant-equality"
    return "inapplicable"


def check_lift_hypotheses(f: UniPoly, x: int) -> LiftReport:
    if not f.is_integral():
        return LiftReport("inapplicable", math.nan, math.nan, None, x)
    v_f = f(x).valuation()
    v_d = f.derivative(x).valuation()
    v_s = f.taylor2(x).valuation()
    return LiftReport(classify(v_f, v_d, v_s), v_f, v_d, v_s, x,
                      literal_hypothesis=literal_hypothesis(v_f, v_d, v_s))


def _newton(f: UniPoly, y: PadicScalar, target: int) -> tuple[PadicScalar, int]:
    for _ in range(MAX_NEWTON_STEPS):
        fy = f(y)
        if fy.valuation() >= target:
            return y, fy.absprec if fy.is_zero else fy.val
        if fy.is_zero:
            raise PrecisionExhausted(f"f(y) only known to vanish mod p^{fy.absprec} < p^{target}")
        y = y - fy / f.derivative(y)
    raise PrecisionExhausted(f"Newton iteration did not reach precision {target}")


def lift_root(f: UniPoly, x: int, target_prec: int) -> PadicScalar:
    """A p-adic root y = x (mod p) with nu(f(y)) >= target_prec."""
    return lift(f, x, target_prec).root


def _snap_exact(f: UniPoly, y: PadicScalar, prec: int) -> PadicScalar:
    # prefer the small integer representative when it is an exact root
    if y.is_zero or y.val < 0 or prec < 1:
        return y
    prec = min(prec, y.absprec)
    M = f.p**prec
    r = y.reduce_mod(prec)
    for cand in (r - M if 2 * r > M else r, r):
        exact = PadicScalar.from_int(cand, f.p)
        if f(exact).is_zero and exact.reduce_mod(1) == y.reduce_mod(1):
            return exact
    return y


def lift(f: UniPoly, x: int, target_prec: int) -> LiftReport:
    """Like :func:`lift_root` but returns the full report."""
    report = check_lift_hypotheses(f, x)
    if not report.applicable:
        raise NotApplicable(f"lifting hypotheses fail at x={x}: {report.to_record()}")
    p = f.p
    y = PadicScalar.from_int(x, p)
    if report.branch.startswith("variant"):
        a = int(report.v_fprime)
        A = (f(y).shift(-2 * a)).reduce_mod(1)
        B = (f.derivative(y).shift(-a)).reduce_mod(1)
        u0 = (-A * pow(B, -1, p)) % p
        y = PadicScalar.from_int(x + p**a * u0, p)
        v_f = f(y).valuation()
        if not v_f > 2 * a:
            raise AssertionError("residue step failed to reach the classical case")
    root, prec = _newton(f, y, target_prec)
    root = _snap_exact(f, root, prec)
    if root.truncate(1).reduce_mod(1) != x % p:
        raise AssertionError("lifted root left the residue class of x")
    return report.with_root(root, prec)


# ---------------------------------------------------------------------------
# systems of forms


def _det_and_solve(J: list[list[PadicScalar]], rhs: list[PadicScalar] | None):
    """Determinant of a square matrix and, optionally, the solution of J z = rhs."""
    m = len(J)
    A = [list(row) + ([rhs[i]] if rhs is not None else []) for i, row in enumerate(J)]
    p = J[0][0].p
    det = PadicScalar.from_int(1, p)
    for col in range(m):
        piv = None
        for i in range(col, m):
            a = A[i][col]
            if not a.is_zero and (piv is None or a.val < A[piv][col].val):
                piv = i
        if piv is None:
            return PadicScalar.zero(p), None
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det = det * A[col][col]
        for i in range(col + 1, m):
            if A[i][col].is_zero:
                continue
            factor = A[i][col] / A[col][col]
            A[i] = [a - factor * b for a, b in zip(A[i], A[col])]
    if rhs is None:
        return det, None
    z = [None] * m
    for i in range(m - 1, -1, -1):
        s = A[i][m]
        for j in range(i + 1, m):
            s = s - A[i][j] * z[j]
        z[i] = s / A[i][i]
    return det, z


def _choose_minor(system: Sequence[Form], v: VectorQp):
    values = [evaluate(F, v) for F in system]
    residual = min(val.valuation() for val in values)
    grads = [gradient(F, v) for F in system]
    m, n = len(system), v.n
    best = None
    for cols in itertools.combinations(range(n), m):
        J = [[g.entries[c] for c in cols] for g in grads]
        det, _ = _det_and_solve(J, None)
        a = det.valuation()
        if a == math.inf or not residual > 2 * a:
            continue
        if best is None or a < best[0]:
            best = (a, cols)
    return values, residual, best


def smooth_point_report(system: Sequence[Form], v) -> LiftReport:
    system = list(system)
    v = v if isinstance(v, VectorQp) else VectorQp.of(v, system[0].p)
    values, residual, best = _choose_minor(system, v)
    if best is None:
        return LiftReport("inapplicable", residual, math.inf, None, v)
    return LiftReport("smooth-point", residual, best[0], None, v)


def lift_smooth_point(system: Sequence[Form], v, target_prec: int) -> VectorQp:
    """A vector w = v (mod p) at which every form vanishes to ``target_prec``.

    Newton iteration runs on the coordinates of the maximal Jacobian minor of
    least valuation ``a``; the other coordinates stay fixed.  Requires every
    residual to exceed ``2a``.  An exact common zero is returned unchanged.
    """
    system = list(system)
    if not system:
        raise ValueError("empty system")
    p = system[0].p
    v = v if isinstance(v, VectorQp) else VectorQp.of(v, p)
    values = [evaluate(F, v) for F in system]
    if all(val.valuation() >= target_prec for val in values):
        return v
    if len(system) > v.n:
        raise NotApplicable("more forms than variables and no exact common zero")
    values, residual, best = _choose_minor(system, v)
    if best is None:
        raise NotApplicable("no Jacobian minor satisfies residual > 2 * nu(minor)")
    _, cols = best
    w = list(v.entries)
    for _ in range(MAX_NEWTON_STEPS):
        wv = VectorQp(tuple(w))
        values = [evaluate(F, wv) for F in system]
        if all(val.valuation() >= target_prec for val in values):
            for a, b in zip(wv.entries, v.entries):
                if not (a - b).truncate(1).is_zero:
                    raise AssertionError("lifted point left the residue class")
            return wv
        if any(val.is_zero and val.absprec < target_prec for val in values):
            raise PrecisionExhausted("residuals only certified below the target precision")
        grads = [gradient(F, wv) for F in system]
        J = [[g.entries[c] for c in cols] for g in grads]
        _, z = _det_and_solve(J, values)
        if z is None:
            raise PrecisionExhausted("Jacobian minor became singular to precision")
        for c, dz in zip(cols, z):
            w[c] = w[c] - dz
    raise PrecisionExhausted(f"Newton iteration did not reach precision {target_prec}")


def lift_form_point(F: Form, v, target_prec: int) -> tuple[LiftReport, VectorQp]:
    """Lift a near-zero of a single form, reporting which branch applied.

    Multivariate smooth-point lifting is tried first; otherwise each
    coordinate axis through ``v`` is tried with the univariate variants.
    """
    v = v if isinstance(v, VectorQp) else VectorQp.of(v, F.p)
    rep = smooth_point_report([F], v)
    if rep.applicable:
        w = lift_smooth_point([F], v, target_prec)
        return rep.with_root(w, target_prec), w
    for i in range(v.n):
        xi = v.entries[i]
        if xi.unit != 0 and xi.val < 0:
            continue
        try:
            x_int = xi.to_int()
        except Exception:
            continue
        base = VectorQp(tuple(PadicScalar.zero(F.p) if j == i else e for j, e in enumerate(v.entries)))
        f = UniPoly.from_line(F, base, VectorQp.basis_vector(i, v.n, F.p))
        r = check_lift_hypotheses(f, x_int)
        if r.applicable:
            r = lift(f, x_int, target_prec)
            w = base + VectorQp.basis_vector(i, v.n, F.p).scale(r.root)
            return r.with_root(w, r.precision), w
    return rep, v
