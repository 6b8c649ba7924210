import json

import pytest

from engine.constant import FIXED_SUITES, IDENTITY_IDS, SUITE_REFERENCES, THEORIES, THEORY_SUITES
from engine.errors import ConfigError
from engine.fields import TorusGrid
from engine.suites import PRODUCT_DEPTH, SuiteConfig, parse_suite, replay, run, run_suite


def test_parse_suite():
    assert parse_suite('clifford') == ('clifford', None)
    assert parse_suite('brackets:ym') == ('brackets', 'ym')
    for theory in THEORIES:
        assert parse_suite('cme:' + theory) == ('cme', theory)


@pytest.mark.parametrize('suite_id', ['brackets', 'brackets:gravitino', 'clifford:pc', 'nothing', ''])
def test_parse_suite_rejects(suite_id):
    with pytest.raises(ConfigError):
        parse_suite(suite_id)


def test_every_suite_has_a_reference():
    assert set(SUITE_REFERENCES) == set(FIXED_SUITES) | set(THEORY_SUITES)


@pytest.mark.parametrize('changes', [
    {'suites': []},
    {'backend': 'symbolic'},
    {'output_format': 'xml'},
    {'K': -1},
    {'grassmann': 0},
    {'samples': 0},
    {'grid': 4, 'K': 2},
    {'tolerances': {'exact': 0.0}},
    {'lie_algebra': 'g2'},
])
def test_validate_rejects(changes):
    settings = {'suites': ['clifford']}
    settings.update(changes)
    with pytest.raises(ConfigError):
        SuiteConfig(**settings).validate()


def test_effective_grid():
    grid = SuiteConfig(['cme:pc'], K=1, grid=8, backend='grid')
    assert grid.effective_grid('cme') == 8
    exact = SuiteConfig(['cme:pc'], K=1, grid=8, backend='exact')
    assert exact.effective_grid('cme') == 2 * PRODUCT_DEPTH['cme'] + 1
    assert exact.effective_grid('clifford') == 8
    large = SuiteConfig(['cme:pc'], K=1, grid=64, backend='exact')
    assert large.effective_grid('cme') == 64


def test_identity_suite_records():
    config = SuiteConfig(['galg-identities'], samples=2, backend='exact').validate()
    records, elapsed = run_suite(config, 'galg-identities')
    assert [r['check'] for r in records] == list(IDENTITY_IDS)
    assert all(r['pass'] and r['residual'] == 0 and r['tolerance'] == 0.0 for r in records)
    assert records[0]['reference'] == SUITE_REFERENCES['galg-identities']
    assert records[0]['detail']['samples'] == 2
    assert elapsed >= 0


def test_report_is_deterministic():
    config = SuiteConfig(['galg-identities', 'clifford'], samples=1, seed=3)
    first = run(config)
    second = run(config)
    assert first.to_json(timing=False) == second.to_json(timing=False)
    body = json.loads(first.to_json())
    assert body['pass'] is True
    assert body['failed'] == 0
    assert body['checks'] == len(first.records)
    assert set(body['timing']) == {'galg-identities', 'clifford', 'total'}
    assert body['config']['seed'] == 3


def test_markdown_report():
    report = run(SuiteConfig(['galg-identities'], samples=1, output_format='md'))
    text = report.render()
    assert text.startswith('# ')
    assert 'PASS' in text
    assert text.count('| galg-identities |') == len(IDENTITY_IDS)


def test_framelin_suite_passes():
    records, _ = run_suite(SuiteConfig(['framelin-lemmas'], samples=5).validate(), 'framelin-lemmas')
    checks = {r['check']: r for r in records}
    assert checks['lightlike frame rejected']['pass']
    assert all(r['pass'] for r in records), [r['check'] for r in records if not r['pass']]


def test_replay_filters_checks(point_factory):
    point = point_factory('pc', seed=5, grid=TorusGrid(13))
    config = SuiteConfig(['brackets:pc'], seed=5, K=1, grid=13)
    report = replay(config, point, 'brackets:LL')
    assert [r['check'] for r in report.records] == ['LL']
    assert set(report.timing) == {'replay'}


@pytest.mark.parametrize('check', ['clifford', 'brackets:XY'])
def test_replay_rejects(point_factory, check):
    point = point_factory('pc', seed=5, grid=TorusGrid(13))
    with pytest.raises(ConfigError):
        replay(SuiteConfig(['brackets:pc'], seed=5, grid=13), point, check)
