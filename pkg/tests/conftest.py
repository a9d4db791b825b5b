from __future__ import annotations

import functools

import pytest

from anergodic.cf_engine import Rotation


@functools.lru_cache(maxsize=None)
def rotation(spec: str) -> Rotation:
    return Rotation.from_spec(spec)


@pytest.fixture
def golden() -> Rotation:
    return rotation("golden")


@pytest.fixture
def sqrt2m1() -> Rotation:
    return rotation("sqrt2m1")


@pytest.fixture(autouse=True)
def _restore_mp_precision():
    from mpmath import mp

    dps = mp.dps
    yield
    mp.dps = dps


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
