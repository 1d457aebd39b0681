import pytest

from tabredact.errors import DataError
from tabredact.schema import FeatureKind, FeatureSchema, FeatureSpec, infer_schema


def infer_single(cells, discrete_threshold=20):
    header = ["col", "y"]
    rows = [[c, "a" if i % 2 else "b"] for i, c in enumerate(cells)]
    schema = infer_schema(header, rows, label_column="y", discrete_threshold=discrete_threshold)
    return schema.features[0]


def test_non_numeric_strings_become_categorical():
    spec = infer_single(["a", "b", "a"])
    assert spec.kind is FeatureKind.CATEGORICAL
    assert spec.categories == ("a", "b")


def test_fractional_values_force_numeric():
    spec = infer_single(["1.5", "2.0", "3.25"])
    assert spec.kind is FeatureKind.NUMERIC
    assert spec.num_range == (1.5, 3.25)


def test_integral_low_cardinality_becomes_discrete():
    spec = infer_single(["1", "2", "3", "1", "2"], discrete_threshold=20)
    assert spec.kind is FeatureKind.DISCRETE
    assert spec.num_range == (1.0, 3.0)


def test_integral_high_cardinality_stays_numeric():
    spec = infer_single([str(i) for i in range(30)], discrete_threshold=20)
    assert spec.kind is FeatureKind.NUMERIC


def test_mixed_column_rejected():
    with pytest.raises(DataError, match="mixes numeric"):
        infer_single(["1", "a", "2"])


def test_empty_rows_rejected():
    with pytest.raises(DataError, match="no data rows"):
        infer_schema(["a", "y"], [], label_column="y")


def test_ragged_rows_rejected():
    with pytest.raises(DataError, match="row 2"):
        infer_schema(["a", "y"], [["1", "x"], ["1"]], label_column="y")


def test_missing_value_rejected():
    with pytest.raises(DataError, match="missing value"):
        infer_schema(["a", "y"], [["1", "x"], ["", "x2"]], label_column="y")


def test_label_values_sorted_and_stable():
    schema = infer_schema(
        ["a", "y"], [["1", "pos"], ["2", "neg"], ["3", "pos"]], label_column="y"
    )
    assert schema.label_values == ("neg", "pos")
    assert schema.num_classes == 2
    assert schema.label_index("pos") == 1


def test_schema_invariants():
    with pytest.raises(DataError):
        FeatureSpec("x", FeatureKind.NUMERIC, num_range=(2.0, 1.0))
    with pytest.raises(DataError):
        FeatureSpec("x", FeatureKind.CATEGORICAL, categories=("a", "a"))
    with pytest.raises(DataError):
        FeatureSpec("x", FeatureKind.CATEGORICAL, categories=())
    with pytest.raises(DataError):
        FeatureSpec("x", FeatureKind.NUMERIC, num_range=(0.0, 1.0), categories=("a",))
    feats = (FeatureSpec("x", FeatureKind.NUMERIC, num_range=(0.0, 1.0)),)
    with pytest.raises(DataError, match="label column"):
        FeatureSchema(features=feats, label_column="x", label_values=("0", "1"))
    with pytest.raises(DataError, match="2 classes"):
        FeatureSchema(features=feats, label_column="y", label_values=("0",))


def test_schema_file_round_trip(tmp_path):
    schema = FeatureSchema(
        features=(
            FeatureSpec("age", FeatureKind.DISCRETE, num_range=(17.0, 90.0)),
            FeatureSpec("rate", FeatureKind.NUMERIC, num_range=(0.0, 1.0)),
            FeatureSpec("color", FeatureKind.CATEGORICAL, categories=("r", "g", "b")),
        ),
        label_column="y",
        label_values=("no", "yes"),
    )
    path = tmp_path / "schema.json"
    schema.save(path)
    assert FeatureSchema.load(path) == schema


def test_schema_file_version_checked(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text('{"schema_version": 99, "features": [], "label_column": "y", "label_values": []}')
    with pytest.raises(DataError, match="schema_version"):
        FeatureSchema.load(path)
