import pytest

from engine.constraints import verify_bracket_table
from engine.dump import MAGIC, dump_point, load_point, parse_dump, read_dump, write_dump
from engine.errors import ChecksumError, DumpError
from engine.fields import TorusGrid

# magic, version and body length precede the body
BODY_OFFSET = len(MAGIC) + 2 + 8


def assert_same_point(first, second):
    assert first.theory == second.theory
    assert first.seed == second.seed
    assert first.K == second.K
    assert first.grid.M == second.grid.M
    assert first.Lambda == second.Lambda
    assert first.generators == second.generators
    assert (first.normal == second.normal).all()
    assert sorted(first.fields) == sorted(second.fields)
    for name, form in first.fields.items():
        other = second.fields[name]
        assert (form.i, form.j, form.ghost, form.bandwidth) == (other.i, other.j, other.ghost, other.bandwidth)
        assert sorted(form.comps) == sorted(other.comps)
        assert (form - other).max_abs() == 0


def test_round_trip(point_factory, theory):
    point = point_factory(theory, reference_amplitude=0.1)
    loaded = load_point(dump_point(point))
    assert_same_point(point, loaded)
    assert (loaded.reference() - point.reference()).max_abs() == 0
    if theory == 'ym':
        assert loaded.lie.name == point.lie.name
        assert (loaded.reference_A() - point.reference_A()).max_abs() == 0
    if theory == 'spinor':
        assert loaded.gamma is not None
        assert loaded.generator_count == point.generator_count


def test_dump_is_deterministic(point_factory):
    assert dump_point(point_factory('scalar')) == dump_point(point_factory('scalar'))


def test_write_and_read(point_factory, tmp_path):
    point = point_factory('pc')
    path = tmp_path / 'pc.pcbf'
    write_dump(point, str(path))
    assert_same_point(point, read_dump(str(path)))


def test_corrupted_body(point_factory):
    data = bytearray(dump_point(point_factory('pc')))
    data[BODY_OFFSET + 40] ^= 0xff
    with pytest.raises(ChecksumError):
        parse_dump(bytes(data))


def test_bad_magic(point_factory):
    data = dump_point(point_factory('pc'))
    with pytest.raises(DumpError):
        parse_dump(b'XXXX' + data[len(MAGIC):])


def test_unsupported_version(point_factory):
    data = bytearray(dump_point(point_factory('pc')))
    data[len(MAGIC)] ^= 0x7f
    with pytest.raises(DumpError) as info:
        parse_dump(bytes(data))
    assert not isinstance(info.value, ChecksumError)


def test_truncated(point_factory):
    data = dump_point(point_factory('pc'))
    with pytest.raises(DumpError):
        parse_dump(data[:len(data) // 2])


def test_exact_coefficients_cannot_be_dumped(point_factory, algebra, exact_sampler):
    point = point_factory('pc')
    broken = point.with_fields({'omega': exact_sampler.homogeneous(algebra, 1, 2, 0, ())})
    with pytest.raises(DumpError):
        dump_point(broken)


def test_replay_reproduces_residuals(point_factory):
    point = point_factory('pc', seed=8, grid=TorusGrid(13))
    loaded = load_point(dump_point(point))
    first = verify_bracket_table('pc', point.seed, point=point, budget=2, relations=['LL', 'HH'])
    second = verify_bracket_table('pc', loaded.seed, point=loaded, budget=2, relations=['LL', 'HH'])
    for a, b in zip(first, second):
        assert a['residual_abs'] == b['residual_abs']
        assert a['residual_rel'] == b['residual_rel']
        assert a['pass'] == b['pass']
