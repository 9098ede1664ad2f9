import pytest

from shtarkov.battery import SUITES, run_suite


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_all_is_ordered_union_and_deterministic():
    a = run_suite("all", 3)
    b = run_suite("all", 3)
    assert [(r.name, r.instances_tested, r.worst_violation) for r in a] == \
           [(r.name, r.instances_tested, r.worst_violation) for r in b]
    parts = [r.name for s in SUITES[1:] for r in run_suite(s, 3)]
    assert [r.name for r in a] == parts
    assert all(r.passed for r in a)
