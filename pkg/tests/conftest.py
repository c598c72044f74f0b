import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def desk3():
    from supercrit.config import CaseId, SimulationConfig

    return SimulationConfig(d=3, p=6, r_max=20, dr=2e-3, dt=5e-4, t_final=1.0, case_id=CaseId.GAUSSIAN)


_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record acceptance checks: criterion(id, label, passed, detail)."""
    results = request.config.stash[_RESULTS]

    def record(cid: str, label: str, passed: bool, detail: str = "") -> bool:
        results.setdefault(cid, []).append((label, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(results, key=lambda c: int(c[1:])):
        checks = results[cid]
        ok = all(p for _, p, _ in checks)
        tr.write_line(f"{cid}: {'PASS' if ok else 'FAIL'} ({sum(p for _, p, _ in checks)}/{len(checks)} checks)")
        for label, passed, detail in checks:
            tr.write_line(f"    [{'pass' if passed else 'FAIL'}] {label}" + (f": {detail}" if detail else ""))
