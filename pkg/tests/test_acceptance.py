"""Acceptance criteria 1..11, each at its stated tolerance and runtime limit."""
from __future__ import annotations

import pytest

from conftest import ACCEPTANCE_LINES
from nlgf.suite import CHECKS


@pytest.mark.parametrize("cid", sorted(CHECKS))
def test_criterion(cid):
    c = CHECKS[cid](seed=0, tol=1e-9)
    verdict = "PASS" if c.passed and c.seconds < c.limit_s else "FAIL"
    line = (f"criterion {c.id:>2} {verdict}  {c.name}: measured={c.measured} expected={c.expected} "
            f"tol={c.tol} time={c.seconds:.2f}s limit={c.limit_s}s")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert c.passed, c.details
    assert c.seconds < c.limit_s
