from tabredact.realism import build_pair_index, clip_quantize, is_realistic

from .helpers import adult_like_dataset, numeric_dataset


def test_unseen_pair_rejected():
    data = adult_like_dataset()  # never contains (Wife, Male)
    index = build_pair_index(data)
    candidate = (40, 40.0, "Wife", "Male")
    assert is_realistic(candidate, index, data.schema) is False


def test_seen_pairs_accepted():
    data = adult_like_dataset()
    index = build_pair_index(data)
    candidate = (40, 40.0, "Wife", "Female")
    assert is_realistic(candidate, index, data.schema) is True


def test_indexed_rows_all_accepted():
    data = adult_like_dataset()
    index = build_pair_index(data)
    assert all(is_realistic(row, index, data.schema) for row in data.rows)


def test_index_is_exact():
    data = adult_like_dataset()
    index = build_pair_index(data)
    marital_gender = index.observed[(2, 3)]
    expected = {(r[2], r[3]) for r in data.rows}
    assert marital_gender == frozenset(expected)


def test_no_categorical_features_vacuous():
    data = numeric_dataset([(0.1, 0.2)], [0])
    index = build_pair_index(data)
    assert index.is_empty
    assert is_realistic((0.5, 0.5), index, data.schema) is True


def test_clip_quantize_rules():
    data = adult_like_dataset()
    row = (43.6, 120.0, "Single", "Male")
    fixed = clip_quantize(row, data.schema)
    assert fixed[0] == 44  # discrete rounds
    assert fixed[1] == 100.0  # numeric clamps to range
    assert fixed[2:] == ("Single", "Male")


def test_clip_quantize_clamps_discrete():
    data = adult_like_dataset()
    assert clip_quantize((140.2, 1.0, "Single", "Male"), data.schema)[0] == 90
    assert clip_quantize((3.0, 1.0, "Single", "Male"), data.schema)[0] == 17


def test_clip_quantize_idempotent():
    data = adult_like_dataset()
    row = (43.6, 120.0, "Single", "Male")
    once = clip_quantize(row, data.schema)
    assert clip_quantize(once, data.schema) == once
