import itertools

import pytest

from conftest import diag
from padicforms.construct import (
    LevelBasis, QuarticDriver, _Stuck, _ZeroFound, clean_constraints, cubic_step_p2mod3, cubic_step_p3,
    extend_clean_vector, independent_by_expansion, level, merge_same_level, quartic_zero_q2,
)
from padicforms.errors import ConditionFailed, InvalidPrime, IsZero, OracleExhausted
from padicforms.forms import Form, VectorQp, directional_expand, evaluate, rank


def test_level_examples():
    assert level(diag(2, 4, [1]), (2,)) == 0
    assert level(diag(2, 4, [2]), (1,)) == 1
    assert level(diag(2, 4, [32]), (1,)) == 1
    with pytest.raises(IsZero):
        level(Form.build(2, 2, 4, {(4, 0): 1, (0, 4): -1}), (1, 1))


def test_merge_same_level():
    F = diag(2, 4, [1, 1])
    m = merge_same_level(F, (1, 0), (0, 1))
    assert m.to_ints() == (1, 1) and level(F, m) == 1
    with pytest.raises(ConditionFailed):
        merge_same_level(diag(2, 4, [1, 7]), (1, 0), (0, 1))


def test_merge_pair_selection_among_three():
    F = diag(2, 4, [1, 1, 7])
    e = [VectorQp.basis_vector(i, 3, 2) for i in range(3)]
    ok = []
    for s, t in itertools.combinations(range(3), 2):
        try:
            merge_same_level(F, e[s], e[t])
            ok.append((s, t))
        except ConditionFailed:
            pass
    assert ok == [(0, 1)]


def test_merge_requires_diagonal_span():
    F = Form.build(2, 2, 4, {(4, 0): 1, (3, 1): 2, (0, 4): 1})
    with pytest.raises(ConditionFailed):
        merge_same_level(F, (1, 0), (0, 1))


def test_extend_clean_vector_diagonal():
    F = diag(2, 4, [1, 1, 1])
    e = extend_clean_vector(F, [], [VectorQp.of((1, 0, 0), 2)])
    assert e.to_ints()[0] == 0 and not e.is_zero()
    assert directional_expand(F, [VectorQp.of((1, 0, 0), 2)], e).nonzero_mixed_slots() == {}


def test_extend_clean_vector_cross_monomial():
    F = Form.build(2, 2, 4, {(4, 0): 1, (3, 1): 1, (0, 4): 1})
    with pytest.raises(OracleExhausted):
        extend_clean_vector(F, [], [VectorQp.of((1, 0), 2)])
    G = Form.build(2, 2, 4, {(4, 0): 1, (0, 4): 1})
    assert extend_clean_vector(G, [], [VectorQp.of((1, 0), 2)]).to_ints() == (0, 1)


def test_extend_clean_vector_random_quartic_verified():
    import random

    rng = random.Random(3)
    terms = {}
    for i in range(6):
        e = [0] * 6
        e[i] = 4
        terms[tuple(e)] = rng.choice([1, 3, 5])
    # a few cross terms among the last variables only
    terms[(0, 0, 0, 0, 2, 2)] = 2
    terms[(0, 0, 0, 1, 3, 0)] = 4
    F = Form.build(2, 6, 4, terms)
    basis = [VectorQp.basis_vector(0, 6, 2)]
    e = extend_clean_vector(F, [], basis)
    exp = directional_expand(F, basis, e)
    assert all(c.is_zero or c.val >= 32 for c in exp.nonzero_mixed_slots().values())
    assert rank(basis + [e]) == 2


def test_keep_slot_leaves_cross_term_free():
    F = Form.build(2, 2, 4, {(4, 0): 1, (1, 3): 2, (0, 4): 1})
    assert len(clean_constraints(F, [], [VectorQp.of((1, 0), 2)])) == 3
    assert len(clean_constraints(F, [], [VectorQp.of((1, 0), 2)], keep=[((1,), 3)])) == 2


def test_independent_by_expansion_examples():
    assert independent_by_expansion(diag(3, 2, [1, 1]), [(1, 0)], (0, 1))
    F = Form.build(2, 2, 2, {(2, 0): 1, (1, 1): 1})
    assert not independent_by_expansion(F, [(1, 0)], (0, 1))
    assert independent_by_expansion(diag(2, 4, [1, 2, 4]), [(1, 0, 0), (0, 1, 0)], (0, 0, 1))


def test_level_basis_rejects_dependent():
    F = diag(2, 4, [1, 2])
    b = LevelBasis.of(F, [(1, 0)])
    with pytest.raises(ConditionFailed):
        b.append(F, (2, 0))
    b.append(F, (0, 1))
    assert b.levels() == [0, 1]


def test_quartic_driver_diag():
    F = diag(2, 4, [1, 2, 4, 8, 1])
    out = quartic_zero_q2(F)
    assert out.is_zero and "levels-0123-hensel" in out.trace
    assert evaluate(F, out.witness).valuation() >= 32
    assert out.witness.is_primitive()


@pytest.mark.parametrize("coeffs", [[1], [1, 1], [1, 2]])
def test_quartic_driver_stuck_small(coeffs):
    out = quartic_zero_q2(diag(2, 4, coeffs))
    assert out.status == "stuck" and out.witness is None


def test_quartic_driver_three_unit_levels():
    F = diag(2, 4, [1, 1, 7, 2, 4])
    out = quartic_zero_q2(F)
    if out.is_zero:
        assert evaluate(F, out.witness).valuation() >= 32
    else:
        assert out.status == "stuck"


def _driver(F):
    return QuarticDriver(F)


def _run_case(fn):
    try:
        fn()
    except _ZeroFound as z:
        return "zero", z
    except _Stuck as s:
        return "stuck", s
    return "none", None


def test_case_0123_hand_basis():
    F = diag(2, 4, [1, 2, 4, 8, 1])
    d = _driver(F)
    vecs = [VectorQp.basis_vector(i, 5, 2) for i in range(5)]
    kind, z = _run_case(lambda: d.case_0123(vecs))
    assert kind == "zero" and z.case == "levels-0123-hensel"
    assert evaluate(F, z.vector).valuation() >= 32


def test_case_c45_val2_hand_basis():
    # e4, e5 of value valuation 2 with a cross coefficient of valuation 2
    F = Form.build(2, 5, 4, {
        (4, 0, 0, 0, 0): 1, (0, 4, 0, 0, 0): 2, (0, 0, 4, 0, 0): 4,
        (0, 0, 0, 4, 0): 4, (0, 0, 0, 1, 3): 4, (0, 0, 0, 0, 4): 12,
    })
    d = _driver(F)
    e = [VectorQp.basis_vector(i, 5, 2) for i in range(5)]
    assert d.cross([e[3], e[4]], (1, 3)) == 2
    kind, z = _run_case(lambda: d.case_c45(*e))
    if kind == "zero":
        assert evaluate(F, z.vector.primitive()).valuation() >= 32
        assert z.case.startswith("c45-val-2")
    else:
        assert kind == "stuck"


def test_terminal_never_accepts_unverified():
    F = diag(2, 4, [1, 1])
    d = _driver(F)
    e = [VectorQp.basis_vector(i, 2, 2) for i in range(2)]
    kind, _ = _run_case(lambda: d.terminal("probe", e, [(1, 1)], 1, lift_index=0))
    assert kind == "stuck"
    assert "probe-failed" in d.trace


def test_cubic_p2mod3_examples():
    out = cubic_step_p2mod3(diag(2, 3, [1, 1]))
    assert out.is_zero and out.witness.to_ints(balanced=True) == (1, -1)
    F = diag(2, 3, [1, 3])
    out = cubic_step_p2mod3(F)
    assert out.is_zero and evaluate(F, out.witness).valuation() >= 32
    with pytest.raises(InvalidPrime):
        cubic_step_p2mod3(diag(7, 3, [1, 1]))


def test_cubic_p2mod3_with_side_condition():
    C = diag(5, 3, [1, 2, 3])
    L = Form.build(5, 3, 1, {(0, 0, 1): 1})  # x3 = 0
    out = cubic_step_p2mod3(C, [L])
    assert out.is_zero
    assert evaluate(C, out.witness).valuation() >= 32 and evaluate(L, out.witness).valuation() >= 32


def test_cubic_p3_examples():
    out = cubic_step_p3(diag(3, 3, [1, 2]))
    assert out.status == "stuck" and "merge-level-1" in out.trace
    F = diag(3, 3, [1, 2, 3])
    out = cubic_step_p3(F)
    assert out.is_zero and "sl-hensel" in out.trace
    assert out.witness.to_ints(balanced=True) == (1, 1, -1)
    out = cubic_step_p3(Form.build(3, 2, 3, {(3, 0): 1, (0, 3): -1}))
    assert out.is_zero and out.witness.to_ints(balanced=True) == (1, 1)
    with pytest.raises(InvalidPrime):
        cubic_step_p3(diag(2, 3, [1, 1]))


def test_cube_residues_mod_9():
    cubes = {pow(t, 3, 9) for t in range(9)}
    assert cubes == {0, 1, 8}
    assert (-2) % 9 not in cubes
