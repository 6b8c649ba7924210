import numpy as np
import pytest

from engine.bfv import (CME_KAPPA, LEDGER_GROUPS, LEDGER_TERMS, appendix_ledger_ym, check_bfv_hvf, check_cme,
                        constraint_kinds, constraint_part_density, eval_bfv_action, ghost_names, ledger_coverage,
                        sample_bfv_point, zero_antifields)
from engine.constraints import HVF_KAPPA
from engine.errors import GhostNumberError, StructuralError
from engine.fields import TorusGrid, integrate

# 2 * 8 * K + 1 points keep the master equation products alias free at K = 1
CME_GRID = 17


@pytest.fixture
def bfv_factory(point_factory):
    def factory(theory, seed=3, grid=CME_GRID, **kwargs):
        point = point_factory(theory, seed=seed, grid=TorusGrid(grid))
        return sample_bfv_point(theory, seed, point=point, budget=2, **kwargs)
    return factory


def test_ghost_content():
    assert ghost_names('pc') == ('c', 'xi', 'lam')
    assert ghost_names('ym') == ('c', 'xi', 'lam', 'mu')
    assert constraint_kinds('scalar') == ('L', 'P', 'H')
    assert constraint_kinds('ym') == ('L', 'P', 'H', 'M')


def test_antifields_carry_ghost_number_minus_one(bfv_factory):
    bp = bfv_factory('ym', grid=8)
    assert set(bp.antifields) == {'c', 'xi', 'lam', 'mu'}
    for name, field in bp.antifields.items():
        for form in (field if name == 'xi' else [field]):
            assert form.ghost == -1
            assert form.grassmann_parity() == 1
    assert bp.ghosts.c.ghost == 1
    assert bp.antifield_mask() != 0


def test_generators_are_disjoint(bfv_factory):
    bp = bfv_factory('spinor', grid=8)
    used = [g for gens in bp.generators.values() for g in gens]
    assert len(used) == len(set(used))
    spinor = {g for gens in bp.point.generators.values() for g in gens}
    assert not spinor & set(used)


def test_action_without_antifields_is_the_constraint_sum(bfv_factory):
    bp = bfv_factory('pc', grid=8)
    stripped = bp.without_antifields()
    action = eval_bfv_action('pc', stripped)
    expected = integrate(constraint_part_density(stripped), stripped.point.grid)
    assert (action - expected).max_abs() < 1e-12
    assert action.max_abs() > 0


def test_action_vanishes_without_ghosts(bfv_factory):
    bp = bfv_factory('scalar', grid=8, ghosts=(), antifields=False)
    assert eval_bfv_action('scalar', bp).max_abs() == 0


def test_action_is_odd(bfv_factory):
    bp = bfv_factory('pc', grid=8)
    assert eval_bfv_action('pc', bp).pruned(1e-14).parity() == 1


def test_wrong_ghost_number_is_rejected(bfv_factory):
    bp = bfv_factory('pc', grid=8)
    broken = bp.with_ghosts(bp.ghosts.replace(c=bp.ghosts.c.with_ghost(0)))
    with pytest.raises(GhostNumberError):
        eval_bfv_action('pc', broken)


def test_theory_mismatch(bfv_factory):
    bp = bfv_factory('pc', grid=8)
    with pytest.raises(StructuralError):
        eval_bfv_action('ym', bp)


def test_zero_antifields_shapes(point_factory):
    point = point_factory('ym')
    fields = zero_antifields(point)
    assert (fields['c'].i, fields['c'].j) == (3, 2)
    assert len(fields['xi']) == 3
    assert all(not f.comps for f in fields['xi'])


@pytest.mark.parametrize('theory', ['pc', 'scalar'])
def test_classical_master_equation(bfv_factory, theory):
    bp = bfv_factory(theory)
    record = check_cme(theory, 3, bp=bp)
    assert record['resolution'] == CME_GRID
    assert record['pass'], record
    assert record['field_max'] > 0
    assert record['kappa'] == CME_KAPPA
    assert record['ratio'][0] == pytest.approx(CME_KAPPA, rel=1e-4)


def test_bfv_vector_field_matches_variation(bfv_factory):
    bp = bfv_factory('pc')
    records = check_bfv_hvf('pc', bp, np.random.default_rng(8), directions=2)
    assert [r['species'] for r in records] == ['e', 'omega']
    for record in records:
        assert record['kappa'] == HVF_KAPPA
        assert record['pass'], record


def test_ledger_partitions_terms():
    assert ledger_coverage() == ([], [], [])
    assigned = [t for _, _, terms in LEDGER_GROUPS.values() for t in terms]
    assert sorted(assigned) == sorted(LEDGER_TERMS)


def test_ledger_needs_yang_mills(bfv_factory):
    with pytest.raises(StructuralError):
        appendix_ledger_ym(3, bp=bfv_factory('pc', grid=8))


def test_yang_mills_ledger(point_factory):
    point = point_factory('ym', seed=4, grid=TorusGrid(CME_GRID), reference_amplitude=0.2)
    ledger = appendix_ledger_ym(4, bp=sample_bfv_point('ym', 4, point=point, budget=2))
    assert ledger['coverage']['terms'] == ledger['coverage']['assigned'] == len(LEDGER_TERMS)
    failed = [g['group'] for g in ledger['groups'] if not g['pass']]
    assert failed == []
