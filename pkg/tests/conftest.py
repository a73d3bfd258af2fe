import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def w_run():
    from bjfront.scenarios import w_scenario
    from bjfront.tracking import run_until

    sim, ctx = w_scenario()
    run_until(sim, 2 * ctx["ledger"].T_tilde)
    return sim, ctx


@pytest.fixture(scope="session")
def v_run():
    """Sampled Lipschitz datum at eps=0.4, run to 2 T~ (about 15 s)."""
    from bjfront.acceptance import _lipschitz_run

    return _lipschitz_run()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num][0])
