"""
Acceptance suite: closed-form kernels, identities and convergence at the default resolution
"""

import pytest

from core.exceptions import RunConfigError
from services.acceptance_service import AcceptanceService


@pytest.fixture(scope="module")
def service():
    return AcceptanceService()


@pytest.mark.parametrize("criterion", list(range(1, 12)))
def test_criterion_passes(service, criterion):
    table = service.run([criterion])
    assert len(table) > 0
    failed = table[~table['passed']]
    assert failed.empty, failed[['id', 'measured', 'threshold']].to_string()


def test_report_columns(service):
    table = service.run([5])
    assert list(table.columns) == ['id', 'check', 'measured', 'threshold', 'passed']
    assert table['id'].str.startswith('5.').all()


def test_airy_reference_value(service):
    G = service._airy_greens()
    grid = G.grid
    value = G.T[grid.index_of(0.5), grid.index_of(0.1)]
    assert value == pytest.approx(0.4032075, abs=1e-6)


def test_unknown_criterion(service):
    with pytest.raises(RunConfigError):
        service.run([0])
