"""The acceptance gate: every criterion runs at its stated tolerance.

Each test prints the criterion's pass/fail line (run pytest with -s to see
them); the CLI `selftest` subcommand drives the same checks.
"""

import pytest

from quatlfun.acceptance import CRITERIA


@pytest.mark.parametrize("index", sorted(CRITERIA))
def test_criterion(index):
    ok, detail = CRITERIA[index]()
    print(f"criterion {index}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {index}: {detail}"
