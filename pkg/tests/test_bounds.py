import itertools
import json

import pytest

from padicforms.bounds import (
    BoundState, Certificate, QuadBase, apply_rule, best_bound, certificate_replay, chain_bound, prime_class_of,
    quad_base_bound, rule_applies, v33_table,
)
from padicforms.errors import NoRuleAvailable, NotApplicable


def test_quad_base_examples():
    assert quad_base_bound(6) == 56
    assert quad_base_bound(37) == 2724
    assert quad_base_bound(1) == 4
    assert QuadBase().lookup(4) == (34, "fallback")
    with pytest.raises(NoRuleAvailable):
        QuadBase(fallback=False).lookup(4)


def test_rule_examples():
    assert apply_rule("lemma6", BoundState(4, 10, 20, "p2")) == BoundState(3, 22, 62, "p2")
    assert apply_rule("lemma2", BoundState(1, 37, 236, "p2")) == BoundState(0, 37, 467, "p2")
    assert apply_rule("lemma8", BoundState(2, 0, 0, "p3")) == BoundState(1, 6, 12, "p3")
    with pytest.raises(NotApplicable):
        apply_rule("lemma2", BoundState(2, 0, 0, "p3"))
    with pytest.raises(NotApplicable):
        apply_rule("lemma6", BoundState(2, 0, 0, "p1mod3"))
    assert not rule_applies("lemma8", BoundState(0, 3, 0, "p3"))


def test_prime_classes():
    assert [prime_class_of(p) for p in (2, 3, 7, 5, 11)] == ["p2", "p3", "p1mod3", "p2mod3", "p2mod3"]


def test_best_bound_examples():
    v, cert = best_bound(BoundState(4, 10, 20, "p2"))
    assert v == 3191 and cert.rules() == ["lemma6"] * 3 + ["lemma2"]
    v2, cert2 = best_bound(BoundState(3, 18, 56, "p2"))
    assert v2 == 2577 and cert2.rules() == ["lemma6", "lemma6", "lemma2"]
    assert chain_bound(BoundState(4, 10, 20, "p2"), ["lemma6"] * 4) == 3534
    assert best_bound(BoundState(0, 6, 0, "any"))[0] == 56


def test_replay_and_tamper():
    _, cert = best_bound(BoundState(4, 10, 20, "p2"))
    assert certificate_replay(cert)
    assert certificate_replay(Certificate.loads(cert.dumps()))
    rec = json.loads(cert.dumps())
    rec["steps"][1]["out"]["r1"] += 1
    assert not certificate_replay(Certificate.from_json(rec))
    rec = json.loads(cert.dumps())
    rec["bound"] -= 1
    assert not certificate_replay(Certificate.from_json(rec))
    assert certificate_replay(Certificate(BoundState(0, 6, 0), bound=56))
    assert not certificate_replay(Certificate(BoundState(0, 6, 0), bound=55))


def test_monotone():
    for cls in ("p2", "p3", "p2mod3"):
        for r3, r2, r1 in itertools.product(range(3), range(0, 9, 2), range(0, 6, 3)):
            v = best_bound(BoundState(r3, r2, r1, cls))[0]
            for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                w = best_bound(BoundState(r3 + d[0], r2 + d[1], r1 + d[2], cls))[0]
                assert w >= v


def test_every_certificate_replays():
    for cls in ("p2", "p3", "p1mod3", "p2mod3"):
        for r3, r2 in itertools.product(range(4), range(6)):
            assert certificate_replay(best_bound(BoundState(r3, r2, r3, cls))[1])


def test_custom_base_round_trips_through_certificate():
    base = QuadBase.with_overrides({9: 100}, per_class={"p3": {9: 80}})
    v, cert = best_bound(BoundState(2, 0, 0, "p3"), base)
    assert v == 80 + 36 and cert.base_source == "table[p3]"
    assert certificate_replay(Certificate.loads(cert.dumps()))


def test_v33_table():
    t = v33_table()
    assert t["per_class"]["p3"]["bound"] == 184
    assert t["max"] == 184
