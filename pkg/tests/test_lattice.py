import json
import random

from absint.intervals import (
    EMPTY, INTERVAL_GALOIS, INTERVAL_OPS, TOP, interval, singleton,
)
from absint.lattice import (
    GaloisConnection, all_pass, check_galois, check_narrowing_laws,
    check_widening_laws,
)
from absint.signs import SIGN_GALOIS, SIGN_OPS


def _random_sets(n, seed=0):
    rng = random.Random(seed)
    out = [frozenset()]
    for _ in range(n - 1):
        out.append(frozenset(rng.sample(range(-50, 51), rng.randint(1, 8))))
    return out


def _random_intervals(rng):
    kind = rng.randint(0, 4)
    if kind == 0:
        return EMPTY
    if kind == 1:
        return TOP
    lo = rng.randint(-30, 30)
    if kind == 2:
        return interval(lo, float("inf"))
    if kind == 3:
        return interval(float("-inf"), lo)
    return interval(lo, lo + rng.randint(0, 20))


def test_interval_galois_example():
    reports = check_galois(INTERVAL_GALOIS, [frozenset({1, 5, 9})])
    assert all_pass(reports)
    assert INTERVAL_GALOIS.alpha(frozenset({1, 5, 9})) == interval(1, 9)


def test_galois_bottom_case():
    reports = check_galois(INTERVAL_GALOIS, [frozenset()])
    assert all_pass(reports)
    assert not any(True for _ in INTERVAL_GALOIS.gamma(EMPTY).enumerate())


def test_galois_random_sets_both_domains():
    samples = _random_sets(200)
    assert all_pass(check_galois(INTERVAL_GALOIS, samples))
    assert all_pass(check_galois(SIGN_GALOIS, samples))


def test_broken_connection_detected():
    # alpha keeps only the minimum: gamma(alpha(c)) loses elements
    lossy = GaloisConnection(
        name="lossy", ops=INTERVAL_OPS,
        alpha=lambda c: singleton(min(c)),
        gamma=INTERVAL_GALOIS.gamma,
    )
    reports = check_galois(lossy, [frozenset({1, 5})])
    failing = [r for r in reports if r.status == "fail"]
    assert failing and "missing 5" in failing[0].witness

    # gamma inflates by one on each side: alpha(gamma(a)) != a
    inflating = GaloisConnection(
        name="inflating", ops=INTERVAL_OPS,
        alpha=INTERVAL_GALOIS.alpha,
        gamma=lambda a: INTERVAL_GALOIS.gamma(interval(a.lo - 1, a.hi + 1)),
    )
    reports = check_galois(inflating, [frozenset({3})])
    failing = [r for r in reports if r.status == "fail"]
    assert failing and failing[0].law == "alpha(gamma(a)) = a"


def test_non_enumerable_gamma_skipped_with_warning():
    reports = check_galois(INTERVAL_GALOIS, [frozenset({5})])
    assert all_pass(reports)
    broken_inf = check_galois(
        GaloisConnection("inf", INTERVAL_OPS,
                         alpha=lambda c: TOP, gamma=INTERVAL_GALOIS.gamma),
        [frozenset({5})])
    skipped = [r for r in broken_inf if r.status == "skipped"]
    assert skipped and "not enumerable" in skipped[0].witness


def test_widening_laws_random_pairs():
    rng = random.Random(1)
    pairs = [(_random_intervals(rng), _random_intervals(rng)) for _ in range(500)]
    pairs += [(EMPTY, singleton(1)), (singleton(1), EMPTY),
              (interval(0, 2), interval(0, 3))]
    assert all_pass(check_widening_laws(INTERVAL_OPS, pairs))
    sign_elems = [SIGN_OPS.bottom, SIGN_OPS.top]
    assert all_pass(check_widening_laws(
        SIGN_OPS, [(a, b) for a in sign_elems for b in sign_elems]))


def test_narrowing_laws_random_pairs():
    rng = random.Random(2)
    pairs = [(_random_intervals(rng), _random_intervals(rng)) for _ in range(500)]
    pairs += [(interval(0, float("inf")), interval(0, 10)),
              (singleton(5), singleton(5))]
    reports = check_narrowing_laws(INTERVAL_OPS, pairs)
    assert all_pass(reports)
    assert any(r.status == "skipped" for r in reports)  # unordered pairs occur


def test_interval_lattice_algebra():
    rng = random.Random(3)
    ops = INTERVAL_OPS
    for _ in range(300):
        a, b, c = (_random_intervals(rng) for _ in range(3))
        assert ops.join(a, b) == ops.join(b, a)
        assert ops.meet(a, b) == ops.meet(b, a)
        assert ops.join(a, ops.join(b, c)) == ops.join(ops.join(a, b), c)
        assert ops.join(a, a) == a and ops.meet(a, a) == a
        assert ops.join(a, ops.meet(a, b)) == a
        assert ops.meet(a, ops.join(a, b)) == a
        if ops.leq(a, b) and ops.leq(b, a):
            assert a == b  # antisymmetry on the canonical representation


def test_law_report_json_shape():
    reports = check_galois(INTERVAL_GALOIS, [frozenset({1, 2})])
    for r in reports:
        payload = json.loads(json.dumps(r.to_json()))
        assert {"law", "domain", "sample", "status"} <= set(payload)
