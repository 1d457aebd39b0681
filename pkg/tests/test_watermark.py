import numpy as np
import pytest

from tabredact.encoding import Encoder, dataset_encoder, sq_distance
from tabredact.errors import DataError
from tabredact.watermark import generate_watermark_candidates, watermark

from .helpers import adult_like_dataset, adult_like_schema


def test_gamma_zero_reproduces_base():
    schema = adult_like_schema()
    base = (52, 45.0, "Wife", "Female")
    target = (38, 40.0, "Single", "Male")
    assert watermark(base, target, 0.0, schema) == base


def test_gamma_one_reproduces_target():
    schema = adult_like_schema()
    base = (52, 45.0, "Wife", "Female")
    target = (38, 40.0, "Single", "Male")
    assert watermark(base, target, 1.0, schema) == target


def test_discrete_age_interpolation_rounds():
    # ages 38 (target) and 52 (base): 52 - 14 * 0.643 = 42.998 -> rounds to 43
    schema = adult_like_schema()
    base = (52, 40.0, "Single", "Male")
    target = (38, 40.0, "Single", "Male")
    row = watermark(base, target, 0.643, schema)
    assert row[0] == 43


def test_numeric_follows_stated_formula_exactly():
    schema = adult_like_schema()
    base = (52, 52.0, "Single", "Male")
    target = (38, 38.0, "Single", "Male")
    gamma = 0.643
    row = watermark(base, target, gamma, schema)
    assert row[1] == pytest.approx(gamma * 38.0 + (1 - gamma) * 52.0)
    assert row[1] == pytest.approx(52.0 - 14.0 * gamma)


def test_categorical_switches_at_half():
    schema = adult_like_schema()
    base = (52, 45.0, "Wife", "Female")
    target = (38, 40.0, "Single", "Male")
    assert watermark(base, target, 0.49, schema)[2:] == ("Wife", "Female")
    assert watermark(base, target, 0.5, schema)[2:] == ("Single", "Male")


def test_gamma_out_of_range_rejected():
    schema = adult_like_schema()
    row = (38, 40.0, "Single", "Male")
    with pytest.raises(DataError, match="gamma"):
        watermark(row, row, 1.5, schema)
    with pytest.raises(DataError, match="gamma"):
        watermark(row, row, -0.1, schema)


def test_grid_excludes_gamma_one():
    data = adult_like_dataset()
    enc = dataset_encoder(data)
    base = (52, 45.0, "Wife", "Female")
    target = (38, 40.0, "Single", "Male")
    cands = generate_watermark_candidates([base], target, 4, data.schema, enc)
    assert len(cands) == 4
    gammas = [c.provenance.gamma for c in cands]
    assert gammas == [0.0, 0.25, 0.5, 0.75]


def test_grid_count_scales_with_bases():
    data = adult_like_dataset()
    enc = dataset_encoder(data)
    bases = [(52, 45.0, "Wife", "Female"), (61, 20.0, "Husband", "Male"),
             (29, 38.0, "Single", "Female")]
    target = (38, 40.0, "Single", "Male")
    cands = generate_watermark_candidates(bases, target, 10, data.schema, enc)
    assert len(cands) == 30


def test_candidates_skip_rows_equal_to_target():
    data = adult_like_dataset()
    enc = dataset_encoder(data)
    target = (38, 40.0, "Single", "Male")
    base = (38, 40.0, "Single", "Female")  # differs only in one categorical
    cands = generate_watermark_candidates([base], target, 4, data.schema, enc)
    # gamma >= 0.5 collapses onto the target; only gamma 0 and 0.25 survive
    assert [c.provenance.gamma for c in cands] == [0.0, 0.25]
    assert all(c.row != target for c in cands)


def test_distance_nonincreasing_in_gamma():
    data = adult_like_dataset()
    enc = dataset_encoder(data)
    target = (38, 40.0, "Single", "Male")
    for base in [(52, 45.0, "Wife", "Female"), (61, 20.0, "Husband", "Male")]:
        cands = generate_watermark_candidates([base], target, 20, data.schema, enc)
        target_vec = enc.encode(target)
        dists = []
        for c in sorted(cands, key=lambda c: c.provenance.gamma):
            # independent distance recomputation over the gamma grid
            dists.append(sq_distance(enc.encode(c.row), target_vec))
            assert c.distance_to_target == pytest.approx(dists[-1])
        for a, b in zip(dists, dists[1:]):
            assert b <= a + 1e-12


def test_random_triples_watermark_laws():
    rng = np.random.default_rng(99)
    schema = adult_like_schema()
    cats_m = ("Wife", "Husband", "Single")
    cats_g = ("Male", "Female")
    for _ in range(300):
        base = (int(rng.integers(17, 91)), float(rng.uniform(0, 100)),
                cats_m[rng.integers(0, 3)], cats_g[rng.integers(0, 2)])
        target = (int(rng.integers(17, 91)), float(rng.uniform(0, 100)),
                  cats_m[rng.integers(0, 3)], cats_g[rng.integers(0, 2)])
        gamma = float(rng.uniform(0, 1))
        row = watermark(base, target, gamma, schema)
        assert isinstance(row[0], int)  # discrete stays integral
        assert row[2] in (base[2], target[2])
        assert row[3] in (base[3], target[3])
        assert watermark(base, target, 0.0, schema) == base
        assert watermark(base, target, 1.0, schema) == target
