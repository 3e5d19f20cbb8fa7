import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from zpc.errors import (
    ChecksumMismatch,
    EmptyFile,
    InvariantViolation,
    NotAscending,
    ParseError,
    VersionMismatch,
)
from zpc.zero_store import (
    CountCertificate,
    Source,
    SyntheticSpec,
    ZeroRecord,
    ZeroSet,
    build_synthetic,
    ingest_odlyzko,
    load_native,
    save_native,
    to_csv,
    to_json_records,
    write_odlyzko,
)

from conftest import synthetic


def triples(zs):
    return [(r.beta, r.gamma, r.multiplicity) for r in zs]


# ---------------------------------------------------------------- records

@pytest.mark.parametrize("kw", [dict(gamma=0.0), dict(gamma=-1.0), dict(gamma=5.0, beta=0.0),
                                dict(gamma=5.0, beta=1.0), dict(gamma=5.0, multiplicity=0),
                                dict(gamma=5.0, multiplicity=1.5), dict(gamma=math.inf),
                                dict(gamma=5.0, abs_error=-1.0)])
def test_record_invariants(kw):
    with pytest.raises(InvariantViolation):
        ZeroRecord(**kw)


def test_set_rejects_unsorted_and_out_of_window():
    a, b = ZeroRecord(20.0), ZeroRecord(30.0)
    with pytest.raises(InvariantViolation):
        ZeroSet((b, a), 0.0, 40.0)
    with pytest.raises(InvariantViolation):
        ZeroSet((a, b), 0.0, 25.0)
    with pytest.raises(InvariantViolation):
        ZeroSet((a, ZeroRecord(20.0)), 0.0, 40.0)


def test_count_uses_multiplicity():
    zs = ZeroSet.from_records([ZeroRecord(10.0, multiplicity=2), ZeroRecord(20.0)], 0.0, 30.0)
    assert zs.count(15.0) == 2 and zs.count(30.0) == 3 and zs.weighted_count() == 3


def test_covers():
    zs = ZeroSet((), 10.0, 100.0, complete=True)
    assert zs.covers(0.0, 100.0)  # nothing below 14
    assert not zs.covers(0.0, 101.0)
    assert not ZeroSet((), 20.0, 100.0, complete=True).covers(0.0, 50.0)
    assert not ZeroSet((), 0.0, 100.0, complete=False).covers(0.0, 50.0)


def test_select_and_truncate(computed_100):
    part = computed_100.select(30.0, 50.0)
    assert all(30 < r.gamma <= 50 for r in part) and part.complete
    head = computed_100.truncate(5)
    assert len(head) == 5 and head.t_max == computed_100.records[4].gamma
    with pytest.raises(InvariantViolation):
        computed_100.truncate(0)


# ---------------------------------------------------------------- odlyzko text

def test_ingest_example(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("14.134725142\n21.022039639\n25.010857580\n")
    zs = ingest_odlyzko(p)
    assert len(zs) == 3 and zs.t_max >= 25.01 and zs.complete
    assert all(r.source is Source.INGESTED for r in zs)


def test_ingest_matches_computed(tmp_path, computed_100):
    p = tmp_path / "z.txt"
    write_odlyzko(computed_100, p)
    zs = ingest_odlyzko(p)
    assert len(zs) == 29
    assert max(abs(a.gamma - b.gamma) for a, b in zip(zs, computed_100)) < 1e-9


def test_ingest_skips_comments(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("# header\n\n14.134725142\n  21.022039639  \n")
    assert len(ingest_odlyzko(p)) == 2


def test_parse_error_line(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("14.134725142\nabc\n")
    with pytest.raises(ParseError) as exc:
        ingest_odlyzko(p)
    assert exc.value.line == 2


def test_not_ascending(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("21.0\n14.1\n")
    with pytest.raises(NotAscending) as exc:
        ingest_odlyzko(p)
    assert exc.value.line == 2


def test_empty_file(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("")
    with pytest.raises(EmptyFile):
        ingest_odlyzko(p)


# ---------------------------------------------------------------- native format

def test_native_round_trip(tmp_path, computed_100):
    p = tmp_path / "z.zpc"
    save_native(computed_100, p)
    assert load_native(p) == computed_100


def test_native_is_deterministic(tmp_path, computed_100):
    a, b = tmp_path / "a", tmp_path / "b"
    save_native(computed_100, a)
    save_native(load_native(a), b)
    assert a.read_bytes() == b.read_bytes()


def test_truncated_file(tmp_path, computed_100):
    p = tmp_path / "z.zpc"
    save_native(computed_100, p)
    data = p.read_bytes()
    p.write_bytes(data[: len(data) // 2])
    with pytest.raises(ChecksumMismatch):
        load_native(p)


def test_corrupted_byte(tmp_path, computed_100):
    p = tmp_path / "z.zpc"
    save_native(computed_100, p)
    data = bytearray(p.read_bytes())
    i = data.index(b"21.02")
    data[i + 3] = ord("9")
    p.write_bytes(bytes(data))
    with pytest.raises(ChecksumMismatch):
        load_native(p)


def test_version_header(tmp_path, computed_100):
    p = tmp_path / "z.zpc"
    save_native(computed_100, p)
    p.write_bytes(b"ZPC0" + p.read_bytes()[4:])
    with pytest.raises(VersionMismatch):
        load_native(p)


def test_synthetic_round_trip(tmp_path):
    zs = synthetic((0.4, 20, 1), (0.5, 20, 1), (0.5, 10, 2))
    p = tmp_path / "s.zpc"
    save_native(zs, p)
    assert load_native(p) == zs


record_st = st.builds(
    ZeroRecord,
    gamma=st.floats(0.5, 1e6, allow_nan=False),
    beta=st.floats(0.01, 0.99),
    multiplicity=st.integers(1, 4),
    abs_error=st.floats(0, 1e-3),
    source=st.sampled_from(list(Source)),
)


@settings(max_examples=50, deadline=None)
@given(st.lists(record_st, max_size=30, unique_by=lambda r: (r.gamma, r.beta)))
def test_native_round_trip_property(tmp_path_factory, records):
    zs = ZeroSet.from_records(records, 0.0, 2e6, metadata="prop γ test", complete=True,
                              certificate=CountCertificate((0.0, 2e6), 1, 1.0, True, 0.0, 1.25))
    p = tmp_path_factory.mktemp("rt") / "z.zpc"
    save_native(zs, p)
    assert load_native(p) == zs


def test_exports(computed_100):
    text = to_csv(computed_100)
    lines = text.splitlines()
    assert lines[0] == "gamma,beta,multiplicity" and len(lines) == 30
    assert float(lines[1].split(",")[0]) == computed_100.records[0].gamma
    js = json.loads(json.dumps(to_json_records(computed_100)))
    assert js[0]["gamma"] == computed_100.records[0].gamma


# ---------------------------------------------------------------- synthetic

def test_completion_adds_partner():
    assert sorted(triples(synthetic((0.6, 20, 1)))) == [(0.4, 20.0, 1), (0.6, 20.0, 1)]


def test_on_line_seed_alone():
    assert triples(synthetic((0.5, 10, 2))) == [(0.5, 10.0, 2)]


def test_completion_idempotent():
    zs = synthetic((0.6, 20, 1), (0.4, 20, 1))
    assert len(zs) == 2


def test_completion_off():
    zs = build_synthetic(SyntheticSpec(((0.6, 20, 1),), symmetry_completion=False))
    assert triples(zs) == [(0.6, 20.0, 1)]


def test_invalid_seed():
    with pytest.raises(InvariantViolation):
        synthetic((1.2, 20, 1))
    with pytest.raises(InvariantViolation):
        synthetic((0.5, -3, 1))


def test_spec_from_json():
    spec = SyntheticSpec.from_json({"seeds": [[0.6, 20, 1]], "symmetry_completion": False})
    assert spec.seeds == ((0.6, 20.0, 1),) and not spec.symmetry_completion
    assert SyntheticSpec.from_json([[0.5, 10, 2]]).seeds == ((0.5, 10.0, 2),)


def test_ingest_abs_error_override(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("14.134725142\n")
    assert ingest_odlyzko(p).records[0].abs_error == 4e-9
    assert ingest_odlyzko(p, abs_error=1e-6).records[0].abs_error == 1e-6


seed_st = st.tuples(st.sampled_from([0.1, 0.2, 0.25, 0.5, 0.6, 0.75, 0.9]),
                    st.sampled_from([20.0, 30.0, 41.5]), st.integers(1, 3))


@settings(max_examples=100, deadline=None)
@given(st.lists(seed_st, min_size=1, max_size=12))
def test_completion_is_reflection_invariant(seeds):
    zs = synthetic(*seeds)
    off = {(round(r.beta, 12), r.gamma, r.multiplicity) for r in zs if not r.on_line}
    assert off == {(round(1 - b, 12), g, m) for b, g, m in off}
