"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Runs the same registry as `biortho verify`.  Heavy artifacts (equilibrium
solves, pooled spectra) are cached inside biortho.acceptance, so the suite
costs one solve per configuration regardless of test order.
"""

import pytest

from biortho import acceptance


@pytest.mark.parametrize("index,name",
                         [(idx, name) for idx, name, _ in acceptance.CRITERIA],
                         ids=[f"{idx:02d}-{name}" for idx, name, _ in acceptance.CRITERIA])
def test_criterion(index, name):
    result = acceptance.run_criterion(index)
    status = "PASS" if result.passed else "FAIL"
    print(f"ACCEPTANCE {result.index:2d} {result.name:<28} {status} "
          f"[{result.seconds:.1f}s] {result.detail}")
    assert result.passed, f"criterion {index} ({name}): {result.detail}"
