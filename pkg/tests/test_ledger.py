import math
import pytest
from abresolvent.ledger import LEDGER_ENV, LEDGER_NAME, ConstantsLedger, MissingClaimError, constants_ledger, \
    ledger_path
from abresolvent.report import BoundCheckReport


@pytest.fixture
def return_ledger(tmp_path, monkeypatch):
    monkeypatch.delenv(LEDGER_ENV, raising=False)
    return ConstantsLedger(str(tmp_path / 'ledger.jsonl'))


def test_latest_entry_wins(return_ledger):
    return_ledger.write('appendix_1', 2.5, 'abc', samples=10, verdict=True)
    return_ledger.write('schur_scaling', 0.7, 'abc')
    return_ledger.write('appendix_1', 2.75, 'def')
    assert return_ledger.read('appendix_1') == 2.75
    assert return_ledger.entry('appendix_1')['config_hash'] == 'def'
    assert len(return_ledger.entries()) == 3
    latest = return_ledger.latest()
    assert list(latest['claim_id']) == ['schur_scaling', 'appendix_1']


def test_missing_claim_and_file(return_ledger, tmp_path):
    with pytest.raises(FileNotFoundError):
        return_ledger.read('appendix_1')
    return_ledger.write('appendix_1', 1.0, '')
    with pytest.raises(MissingClaimError) as info:
        return_ledger.read('appendix_2')
    assert info.value.claim_id == 'appendix_2'
    with pytest.raises(ValueError):
        return_ledger.write('', 1.0, '')


def test_non_finite_constant(return_ledger):
    return_ledger.write('diverging', math.inf, 'abc')
    assert return_ledger.read('diverging') == math.inf


def test_record_reports(return_ledger):
    reports = [BoundCheckReport('a', 4, 1.5, {}, True), BoundCheckReport('b', 2, 0.5, {}, False)]
    entries = return_ledger.record(reports, 'hash')
    assert [e['verdict'] for e in entries] == [True, False]
    assert return_ledger.read('b') == 0.5


def test_compare(tmp_path, monkeypatch):
    monkeypatch.delenv(LEDGER_ENV, raising=False)
    coarse = ConstantsLedger(str(tmp_path / 'coarse.jsonl'))
    fine = ConstantsLedger(str(tmp_path / 'fine.jsonl'))
    coarse.write('a', 1.0, '')
    coarse.write('b', 2.0, '')
    fine.write('a', 1.1, '')
    fine.write('b', 4.0, '')
    fine.write('c', 1.0, '')
    table = coarse.compare(fine)
    assert list(table['claim_id']) == ['a', 'b']
    assert list(table['stable']) == [True, False]


def test_environment_override(tmp_path, monkeypatch):
    target = tmp_path / 'env' / 'ledger.jsonl'
    monkeypatch.setenv(LEDGER_ENV, str(target))
    assert ledger_path('elsewhere.jsonl') == target
    assert constants_ledger('write', 'claim', 3.0, 'h') == 3.0
    assert target.exists()
    assert constants_ledger('read', 'claim') == 3.0
    monkeypatch.delenv(LEDGER_ENV)
    assert ledger_path(output=str(tmp_path)) == tmp_path / LEDGER_NAME
    with pytest.raises(ValueError):
        constants_ledger('append', 'claim', 1.0)
    with pytest.raises(ValueError):
        constants_ledger('write', 'claim', path=str(tmp_path / 'x.jsonl'))
