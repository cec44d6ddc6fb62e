from fractions import Fraction
from pathlib import Path

import os
import pytest

from rankpair import (
    CorrelationSequence,
    LevelFunction,
    PolynomialSpec,
    RankOneSpec,
    StageSpec,
    WalshPolynomial,
    generate_schedule,
    plan_pair,
)
from rankpair import serialize as ser


class TestFractions:
    def test_round_trip(self):
        for x in (Fraction(0), Fraction(-3, 7), Fraction(10 ** 12, 13)):
            assert ser.fraction_from_str(ser.fraction_to_str(x)) == x


class TestRoundTrips:
    def test_spec(self, small_spec):
        assert ser.spec_from_dict(ser.spec_to_dict(small_spec)) == small_spec

    def test_level_function(self):
        f = LevelFunction.from_dict(2, {0: Fraction(1), 3: Fraction(-1, 2)})
        assert ser.level_function_from_dict(ser.level_function_to_dict(f)) == f

    def test_schedule(self):
        s = generate_schedule(5, 300)
        assert ser.schedule_from_dict(ser.schedule_to_dict(s)) == s

    def test_polynomial(self):
        p = PolynomialSpec.from_dict({0: Fraction(1, 2), 2: Fraction(1, 4)})
        assert ser.polynomial_from_dict(ser.polynomial_to_dict(p)) == p

    def test_walsh(self):
        w = WalshPolynomial.from_terms(
            [((0, 2), Fraction(1, 2)), ((-1,), Fraction(-3, 4))]
        )
        assert ser.walsh_from_dict(ser.walsh_to_dict(w)) == w

    def test_certificate(self):
        result = plan_pair(generate_schedule(8, 300))
        d = ser.certificate_to_dict(result.cert_s)
        back = ser.certificate_from_dict(d)
        assert ser.certificate_to_dict(back) == d
        assert back.ok == result.cert_s.ok

    def test_correlation_table(self):
        seq = CorrelationSequence(
            entries={
                0: (Fraction(1), Fraction(1)),
                3: (Fraction(-1, 7), Fraction(2, 7)),
            },
            norm_sq=Fraction(1),
            subject="demo",
        )
        back = ser.correlation_table_from_tsv(ser.correlation_table_to_tsv(seq))
        assert back.entries == seq.entries
        assert back.norm_sq == seq.norm_sq
        assert back.subject == "demo"


class TestAtomicWrites:
    def test_write_and_replace(self, tmp_path):
        target = tmp_path / "out.json"
        ser.write_json(target, {"a": 1})
        ser.write_json(target, {"a": 2})
        assert ser.read_json(target) == {"a": 2}
        assert [p.name for p in tmp_path.iterdir()] == ["out.json"]

    def test_no_partial_file_on_failure(self, tmp_path):
        target = tmp_path / "out.json"
        with pytest.raises(TypeError):
            ser.write_json(target, object())
        assert list(tmp_path.iterdir()) == []


class TestManifest:
    def test_manifest_written(self, tmp_path):
        m = ser.RunManifest.start("demo", {"x": 1})
        m.outputs.append("a.json")
        m.finish(tmp_path / "manifest.json")
        d = ser.read_json(tmp_path / "manifest.json")
        assert d["command"] == "demo"
        assert d["arguments"] == {"x": 1}
        assert d["outputs"] == ["a.json"]
        assert d["started_at"] <= d["finished_at"]
