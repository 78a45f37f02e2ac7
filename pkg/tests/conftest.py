import sys

import pytest

from cvacomplete.credit import CdsQuoteSet, bootstrap_hazard
from cvacomplete.curves import CurveSet, flat_curve

CDS_MATURITIES = (0.5, 1, 2, 3, 4, 5, 7, 10, 15, 20)
CDS_2008YE = (262, 262, 230, 218, 203, 196, 196, 196, 196, 196)
CDS_2009Q1 = (923, 923, 800, 701, 665, 638, 581, 534, 534, 534)


def quotes(row, recovery=0.40):
    return CdsQuoteSet.from_bps(zip(CDS_MATURITIES, row), recovery)


@pytest.fixture(scope="session")
def flat2():
    return flat_curve(0.02)


@pytest.fixture(scope="session")
def credit_2008(flat2):
    return bootstrap_hazard(quotes(CDS_2008YE), flat2)


@pytest.fixture(scope="session")
def credit_2009(flat2):
    return bootstrap_hazard(quotes(CDS_2009Q1), flat2)


@pytest.fixture(scope="session")
def synthetic_curves():
    """Flat 3.5% tenor curve over a flat 3.3% overnight curve."""
    return CurveSet(discount=flat_curve(0.033, "overnight"), tenor=flat_curve(0.035, "tenor"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda text: int(text.split()[1])):
        terminalreporter.write_line(line)
