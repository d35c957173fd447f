#!/usr/bin/env python3
"""Run the numbered acceptance criteria and print one pass/fail line each.

Usage: python3 scripts/run_acceptance.py [extra pytest args]
"""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    args = [str(ROOT / "tests" / "test_acceptance.py"), "-m", "acceptance", "-q", *sys.argv[1:]]
    sys.exit(pytest.main(args))
