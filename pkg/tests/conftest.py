import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hlx import isoclinism  # noqa: E402

# Every isoclinism witness handed out by the library during the run, as
# (producer, witness).  The acceptance module checks them all at the end.
PRODUCED = []


def _recording(name, fn, pick=lambda out: out):
    def wrapper(*args, **kwargs):
        out = fn(*args, **kwargs)
        w = pick(out)
        if w is not None:
            PRODUCED.append((name, w))
        return out

    wrapper.__wrapped__ = fn
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _found(res):
    return res.value if res.found else None


for _name, _pick in (("search_isoclinism", _found), ("identity_witness", None), ("compose_witnesses", None),
                     ("morphism_to_witness", None)):
    _fn = getattr(isoclinism, _name)
    setattr(isoclinism, _name, _recording(_name, _fn, _pick) if _pick else _recording(_name, _fn))

_inverse = isoclinism.IsoclinismWitness.inverse
isoclinism.IsoclinismWitness.inverse = _recording("inverse", _inverse)


def pytest_collection_modifyitems(config, items):
    # the witness audit must see everything else first
    last = [it for it in items if "every_witness" in it.name]
    rest = [it for it in items if "every_witness" not in it.name]
    items[:] = rest + last


@pytest.fixture(scope="session")
def produced_witnesses():
    return PRODUCED


# acceptance criteria: one PASS/FAIL line each, at the end of the run
CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and rep.passed:
        return
    n, label = mark.args
    prev = CRITERIA.get(n, (label, "PASS"))[1]
    CRITERIA[n] = (label, "PASS" if prev == "PASS" and rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        label, status = CRITERIA[n]
        terminalreporter.write_line(f"{status} criterion {n}: {label}")
