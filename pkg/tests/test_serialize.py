import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gramcert import serialize as ser
from gramcert.douglas import DouglasInstance, solve
from gramcert.errors import SchemaError
from gramcert.gramfactor import gram_factor
from gramcert.positivity import positivity_verdict
from gramcert.schwarz import SchwarzProblem, optimize_s, schwarz_constant_exact
from gramcert.spectral import CoercivityInstance, gap_certificate
from gramcert.testkit import InstanceSpec, generate


def roundtrip(doc):
    return ser.loads(ser.dumps(doc))


@given(st.integers(0, 2**31 - 1), st.sampled_from(["psd-from-factor", "indefinite-shifted", "rank-one-coupled"]))
def test_blockmatrix_roundtrip_bit_exact(seed, kind):
    T, _ = generate(InstanceSpec(seed, kind, module_rank=1 + seed % 2))
    doc = roundtrip(ser.blockmatrix_to_json(T))
    jsonschema.validate(doc, ser.BLOCKMATRIX_SCHEMA)
    back = ser.blockmatrix_from_json(doc)
    assert np.array_equal(back.entries, T.entries)
    assert back.partition == T.partition and back.module_rank == T.module_rank


def test_numbers():
    assert ser.number(np.inf) == "inf" and ser.number(-np.inf) == "-inf" and ser.number(np.nan) == "nan"
    assert ser.parse_number("inf") == np.inf and ser.parse_number(2) == 2.0
    assert np.isnan(ser.parse_number("nan"))
    with pytest.raises(SchemaError):
        ser.parse_number("abc")


def test_matrix_encoding_real_and_complex():
    A = np.array([[1 + 2j, -0.5], [0, 3j]])
    assert np.array_equal(ser.decode_matrix(roundtrip(ser.encode_matrix(A))), A)
    assert np.array_equal(ser.decode_matrix([[1, 2], [3, 4]]), np.array([[1, 2], [3, 4]], dtype=complex))
    with pytest.raises(SchemaError):
        ser.decode_matrix([[1, 2], [3]])


def test_rejects_duplicate_keys():
    text = '{"partition": [1], "blocks": {"1,1": [[1]], "1,1": [[2]]}}'
    with pytest.raises(SchemaError):
        ser.loads(text)


def test_rejects_upper_and_out_of_range_keys():
    with pytest.raises(SchemaError):
        ser.blockmatrix_from_json({"partition": [1, 1], "blocks": {"1,2": [[1]]}})
    with pytest.raises(SchemaError):
        ser.blockmatrix_from_json({"partition": [1, 1], "blocks": {"3,1": [[1]]}})
    with pytest.raises(SchemaError):
        ser.blockmatrix_from_json({"partition": [1], "blocks": {"a": [[1]]}})


def test_rejects_bad_shapes_and_fields():
    with pytest.raises(SchemaError):
        ser.blockmatrix_from_json({"partition": [2], "blocks": {"1,1": [[1]]}})
    with pytest.raises(SchemaError):
        ser.blockmatrix_from_json({"blocks": {}})
    with pytest.raises(SchemaError):
        ser.blockmatrix_from_json({"partition": [0], "blocks": {}})
    with pytest.raises(SchemaError):
        ser.loads("{not json")


def test_module_vector_roundtrip():
    T, _ = generate(InstanceSpec(5, "indefinite-shifted", module_rank=2))
    cert = positivity_verdict(T)
    doc = roundtrip(ser.module_vector_to_json(cert.witness))
    jsonschema.validate(doc, ser.MODULE_VECTOR_SCHEMA)
    back = ser.module_vector_from_json(doc)
    assert np.array_equal(back.stacked(), cert.witness.stacked())


def test_certificate_schema(example41, pm1):
    for T in (example41, pm1):
        doc = roundtrip(ser.certificate_to_json(positivity_verdict(T)))
        jsonschema.validate(doc, ser.CERTIFICATE_SCHEMA)
        assert set(doc["ratios"]) == {"1,2", "1,3", "2,3"}


def test_factor_schema_and_product(example41):
    F = gram_factor(example41)
    doc = roundtrip(ser.factor_to_json(F))
    jsonschema.validate(doc, ser.FACTOR_SCHEMA)
    P = ser.factor_product_from_json(doc)
    assert np.linalg.norm(P.entries - example41.entries, 2) <= 1e-8
    bad = dict(doc, X=[[1.0]])
    with pytest.raises(SchemaError):
        ser.factor_product_from_json(bad)


def test_schwarz_schema():
    prob = SchwarzProblem(np.diag([2.0, 1.0]), 0.5)
    doc = roundtrip(ser.schwarz_to_json(schwarz_constant_exact(prob), optimize_s(prob, [0, 0.5, 1], 50)))
    jsonschema.validate(doc, ser.SCHWARZ_SCHEMA)
    assert doc["constant"] == pytest.approx(np.sqrt(2))


def test_douglas_schema_and_input_roundtrip():
    inst, _ = generate(InstanceSpec(3, "douglas-solvable"))
    doc = roundtrip(ser.douglas_to_json(solve(inst)))
    jsonschema.validate(doc, ser.DOUGLAS_SCHEMA)
    unsolv = roundtrip(ser.douglas_to_json(solve(DouglasInstance(np.diag([1.0, 0.0]), [[0.0], [1.0]]))))
    jsonschema.validate(unsolv, ser.DOUGLAS_SCHEMA)
    assert unsolv["lambda_star"] == "inf"
    back = ser.douglas_from_json(roundtrip(ser.douglas_input_to_json(inst)))
    assert np.array_equal(back.A, inst.A) and np.array_equal(back.C, inst.C)


def test_gap_schema_and_input_roundtrip():
    inst, _ = generate(InstanceSpec(4, "coercive-pair"))
    doc = roundtrip(ser.gap_to_json(gap_certificate(inst)))
    jsonschema.validate(doc, ser.GAP_SCHEMA)
    back = ser.coercivity_from_json(roundtrip(ser.coercivity_input_to_json(inst)))
    assert np.array_equal(back.B, inst.B) and back.a == inst.a and back.c == inst.c
    # a two-block block matrix also works as gap input
    T = {"partition": [1, 1], "blocks": {"1,1": [[4]], "2,1": [[1]], "2,2": [[1]]}}
    c2 = ser.coercivity_from_json(T)
    assert gap_certificate(c2).lambda_min_H == pytest.approx(2.5 - np.sqrt(3.25))


def test_dumps_is_strict():
    with pytest.raises(ValueError):
        ser.dumps({"x": float("nan")})
    assert json.loads(ser.dumps({"x": ser.number(float("nan"))})) == {"x": "nan"}


def test_coercivity_input_errors():
    with pytest.raises(SchemaError):
        ser.coercivity_from_json({"A": [[1]], "B": [[1]]})
    with pytest.raises(SchemaError):
        ser.coercivity_from_json({"partition": [1, 1, 1], "blocks": {}})


def test_instance_is_reusable_after_parse():
    inst = CoercivityInstance([[4.0]], [[1.0]], [[1.0]], 4.0, 1.0)
    doc = roundtrip(ser.coercivity_input_to_json(inst))
    assert ser.coercivity_from_json(doc).a == 4.0
