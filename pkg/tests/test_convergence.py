"""Randomized group scripts: every live member exports identical secrets.

The full 1000-script sweep runs in the acceptance suite; this module keeps a
faster smoke sweep for day-to-day runs.
"""

import pytest

from helpers import run_random_script


@pytest.mark.parametrize("seed", range(60))
def test_random_scripts_converge(seed):
    assert run_random_script(seed) >= 1
