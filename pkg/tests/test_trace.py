"""Tests for trace parsing and canonical serialization."""

import json
import math

import pytest

from semdrift.errors import TraceFormatError, ZeroVectorError
from semdrift.trace import (
    TRACE_VERSION,
    canonical_json,
    load_trace,
    parse_trace,
    serialize_trace,
    trace_to_dict,
)


def minimal_trace(vectors=None):
    vectors = vectors or [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
    return {
        "version": TRACE_VERSION,
        "dim": 3,
        "slices": [
            {
                "time_index": 0,
                "tokens": [
                    {
                        "token_id": i,
                        "surface": f"w{i}",
                        "char_start": i * 4,
                        "char_end": i * 4 + 2,
                        "vector": v,
                    }
                    for i, v in enumerate(vectors)
                ],
            }
        ],
    }


class TestParseTrace:
    def test_minimal_valid(self):
        t = parse_trace(minimal_trace())
        assert t.dim == 3
        assert len(t.samples) == 1
        assert t.samples[0].tokens[0].surface == "w0"

    def test_normalizes_raw_vectors(self):
        t = parse_trace(minimal_trace([[3.0, 0.0, 0.0], [0.0, 2.0, 0.0]]))
        assert t.samples[0].tokens[0].vector.coords[0] == 1.0

    def test_missing_top_level_keys(self):
        for key in ("version", "dim", "slices"):
            data = minimal_trace()
            del data[key]
            with pytest.raises(TraceFormatError):
                parse_trace(data)

    def test_time_indices_must_increase(self):
        data = minimal_trace()
        data["slices"].append(dict(data["slices"][0]))
        with pytest.raises(TraceFormatError, match="strictly increasing"):
            parse_trace(data)

    def test_vector_length_checked(self):
        data = minimal_trace()
        data["slices"][0]["tokens"][0]["vector"] = [1.0, 0.0]
        with pytest.raises(TraceFormatError, match="length"):
            parse_trace(data)

    def test_zero_vector_reported_with_context(self):
        data = minimal_trace([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        with pytest.raises(ZeroVectorError, match="slice 0 token 0"):
            parse_trace(data)

    def test_sparse_token_ids_rejected(self):
        data = minimal_trace()
        data["slices"][0]["tokens"][1]["token_id"] = 7
        with pytest.raises(TraceFormatError):
            parse_trace(data)

    def test_empty_slices_rejected(self):
        data = minimal_trace()
        data["slices"] = []
        with pytest.raises(TraceFormatError):
            parse_trace(data)

    def test_encoder_metadata_optional(self):
        data = minimal_trace()
        data["encoder"] = {"model": "m", "layer": -2}
        t = parse_trace(data)
        assert t.encoder == {"model": "m", "layer": -2}


class TestCanonicalJson:
    def test_keys_sorted(self):
        assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'

    def test_seventeen_digit_floats(self):
        assert canonical_json(1 / 3) == "0.33333333333333331"

    def test_integers_stay_integers(self):
        assert canonical_json({"n": 5}) == '{"n":5}'

    def test_non_finite_rejected(self):
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(ValueError):
                canonical_json({"x": bad})

    def test_non_ascii_escaped(self):
        out = canonical_json({"s": "café"})
        assert out == '{"s":"caf\\u00e9"}'
        assert out.encode("ascii")

    def test_nested_arrays(self):
        assert canonical_json([1, [2.5, "x"], None, True]) == '[1,[2.5,"x"],null,true]'


class TestRoundTrip:
    def test_byte_identity_for_canonical_files(self, tmp_path):
        trace = parse_trace(minimal_trace())
        path = tmp_path / "t.trace.json"
        path.write_text(serialize_trace(trace))
        again = load_trace(path)
        assert serialize_trace(again) == path.read_text()

    def test_round_trip_survives_normalization(self, tmp_path):
        # Raw input has non-unit vectors; after one serialize the file is
        # canonical and must then be a fixed point.
        raw = minimal_trace([[2.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
        first = serialize_trace(parse_trace(raw))
        path = tmp_path / "t.trace.json"
        path.write_text(first)
        assert serialize_trace(load_trace(path)) == first

    def test_serialize_ends_with_newline(self):
        assert serialize_trace(parse_trace(minimal_trace())).endswith("\n")

    def test_dict_form_sorted(self):
        doc = trace_to_dict(parse_trace(minimal_trace()))
        assert list(doc["slices"][0]["tokens"][0].keys()) == sorted(
            doc["slices"][0]["tokens"][0].keys()
        )

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "bad.trace.json"
        path.write_text("{not json")
        with pytest.raises(TraceFormatError):
            load_trace(path)

    def test_encoder_metadata_round_trips(self, tmp_path):
        data = minimal_trace()
        data["encoder"] = {"model": "m", "revision": "r", "layer": -2}
        trace = parse_trace(data)
        path = tmp_path / "t.trace.json"
        path.write_text(serialize_trace(trace))
        assert load_trace(path).encoder == data["encoder"]
