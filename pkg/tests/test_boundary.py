import itertools

import numpy as np
import pytest

from tabredact.boundary import (
    ABSTAIN,
    AbstainMode,
    EMConfig,
    LabelMatrix,
    LabelModelParams,
    PDB,
    build_label_matrix,
    crossing_mask,
    fit_label_model,
    lf_vote,
    load_pdb,
    majority_vote_labels,
    pdb_precision,
    posterior_from_votes,
    save_pdb,
    _log_likelihood,
)
from tabredact.errors import DataError
from tabredact.labelers import LabelerFamily, LabelerSpec, train_arrays

from .test_labelers import blob_arrays


class FixedProbaLabeler:
    """Test double emitting canned probability vectors."""

    def __init__(self, probs, name="fixed"):
        self.probs = np.asarray(probs, dtype=float)
        self.num_classes = self.probs.shape[-1]
        self.input_dim = 1
        self.spec = LabelerSpec(name, LabelerFamily.NAIVE_BAYES)

    def predict_proba(self, x):
        return self.probs if self.probs.ndim == 1 else self.probs[0]

    def predict_proba_matrix(self, X):
        if self.probs.ndim == 1:
            return np.tile(self.probs, (len(X), 1))
        return self.probs[: len(X)]


# -- labeling function votes -------------------------------------------------


def test_lf_vote_confident_either_mode():
    lab = FixedProbaLabeler([0.9, 0.1])
    assert lf_vote(lab, np.zeros(1), beta=0.1, mode=AbstainMode.LITERAL) == 0
    assert lf_vote(lab, np.zeros(1), beta=0.1, mode=AbstainMode.MARGIN) == 0


def test_lf_vote_margin_abstains_on_low_margin():
    lab = FixedProbaLabeler([0.52, 0.48])
    # margin cutoff: 1/2 + 0.1 = 0.6 >= 0.52 -> abstain
    assert lf_vote(lab, np.zeros(1), beta=0.1, mode=AbstainMode.MARGIN) == ABSTAIN


def test_lf_vote_literal_rule_as_written():
    lab = FixedProbaLabeler([0.52, 0.48])
    # literal cutoff: 0.1 / 2 = 0.05 < 0.52 -> vote
    assert lf_vote(lab, np.zeros(1), beta=0.1, mode=AbstainMode.LITERAL) == 0


def test_lf_vote_rejects_invalid_probabilities():
    lab = FixedProbaLabeler([0.9, 0.4])
    with pytest.raises(DataError, match="invalid probability"):
        lf_vote(lab, np.zeros(1), beta=0.1)


def test_beta_monotone_abstentions():
    rng = np.random.default_rng(0)
    X, y = blob_arrays(n_per_class=30, separation=1.0, seed=3)
    model = train_arrays(
        LabelerSpec("nb", LabelerFamily.NAIVE_BAYES), X, y, 2)
    probe = rng.normal(0.5, 2.0, size=(60, X.shape[1]))
    prev = -1
    for beta in (0.0, 0.1, 0.2, 0.4):
        votes = build_label_matrix([model], probe, beta, AbstainMode.MARGIN).votes
        abstains = int((votes == ABSTAIN).sum())
        assert abstains >= prev
        prev = abstains


# -- label matrix -------------------------------------------------------------


def test_matrix_shape_and_cell_oracle():
    labs = [
        FixedProbaLabeler([0.9, 0.1], "l0"),
        FixedProbaLabeler([0.2, 0.8], "l1"),
        FixedProbaLabeler([0.55, 0.45], "l2"),
    ]
    X = np.zeros((4, 1))
    matrix = build_label_matrix(labs, X, beta=0.1)
    assert matrix.votes.shape == (3, 4)
    for i, lab in enumerate(labs):
        for j in range(4):
            assert matrix.votes[i, j] == lf_vote(lab, X[j], 0.1)


def test_single_cell_matrix():
    matrix = build_label_matrix([FixedProbaLabeler([1.0, 0.0])], np.zeros((1, 1)), 0.1)
    assert matrix.votes.shape == (1, 1)
    assert matrix.votes[0, 0] == 0


def test_fully_confident_labelers_never_abstain():
    labs = [FixedProbaLabeler([0.99, 0.01]), FixedProbaLabeler([0.02, 0.98])]
    matrix = build_label_matrix(labs, np.zeros((5, 1)), beta=0.1)
    assert (matrix.votes != ABSTAIN).all()


def test_empty_inputs_rejected():
    with pytest.raises(DataError):
        build_label_matrix([], np.zeros((2, 1)), 0.1)
    with pytest.raises(DataError):
        build_label_matrix([FixedProbaLabeler([1.0, 0.0])], np.zeros((0, 1)), 0.1)


# -- label model fitting -------------------------------------------------------


def test_unanimous_votes_give_high_accuracy_and_posterior():
    votes = np.ones((3, 10), dtype=int)
    params = fit_label_model(LabelMatrix(votes), 2)
    assert (params.accuracies >= 0.9).all()
    post = posterior_from_votes(LabelMatrix(votes), params)
    assert (post[:, 1] >= 0.99).all()


def test_propensity_closed_form():
    votes = np.array([[0, 0, 1, 1, ABSTAIN, ABSTAIN, ABSTAIN, ABSTAIN],
                      [0, 0, 1, 1, 0, 1, 0, 1]])
    params = fit_label_model(LabelMatrix(votes), 2)
    assert params.propensities[0] == pytest.approx(0.5, abs=1e-6)
    assert params.propensities[1] == pytest.approx(1.0, abs=1e-6)


def test_all_abstain_matrix_rejected():
    votes = np.full((2, 4), ABSTAIN)
    with pytest.raises(DataError, match="abstained"):
        fit_label_model(LabelMatrix(votes), 2)


def test_all_abstain_columns_dropped_with_warning():
    votes = np.array([[0, ABSTAIN, 1], [0, ABSTAIN, 1]])
    with pytest.warns(UserWarning, match="all-abstain"):
        params = fit_label_model(LabelMatrix(votes), 2)
    assert params.num_classes == 2


def test_em_log_likelihood_nondecreasing():
    rng = np.random.default_rng(7)
    votes = rng.integers(-1, 2, size=(4, 30))
    if not (votes != ABSTAIN).any(axis=0).all():
        votes[0] = np.abs(votes[0])
    _, history = fit_label_model(LabelMatrix(votes), 2, track_likelihood=True)
    for prev, cur in zip(history, history[1:]):
        assert cur >= prev - 1e-9


def grid_search_oracle(votes: np.ndarray, grid_points: int = 100):
    """Maximize the marginal likelihood over per-LF accuracies and the class-1
    prior on a dense grid. Binary classes only. Returns (best_ll, best_params).

    Propensities are fixed at their closed-form MLE (observed non-abstain
    rate), which is optimal independently of the other parameters.
    """
    m, n = votes.shape
    active = votes != ABSTAIN
    props = np.clip(active.mean(axis=1), 1e-9, 1.0)
    prop_ll = 0.0
    for i in range(m):
        k = int(active[i].sum())
        if 0 < k:
            prop_ll += k * np.log(props[i])
        if k < n:
            prop_ll += (n - k) * np.log(max(1.0 - props[i], 1e-300))

    axis = np.linspace(0.005, 0.995, grid_points)
    grids = np.meshgrid(*([axis] * m), axis, indexing="ij")
    acc = grids[:m]
    prior1 = grids[m]
    log_j0 = np.zeros_like(prior1)
    ll = np.log(1.0 - prior1) * 0.0
    # accumulate per-row log( P(y=0) f(votes|0) + P(y=1) f(votes|1) )
    total = np.zeros_like(prior1)
    for j in range(n):
        f0 = np.ones_like(prior1)
        f1 = np.ones_like(prior1)
        for i in range(m):
            if votes[i, j] == ABSTAIN:
                continue
            if votes[i, j] == 0:
                f0 = f0 * acc[i]
                f1 = f1 * (1.0 - acc[i])
            else:
                f0 = f0 * (1.0 - acc[i])
                f1 = f1 * acc[i]
        total = total + np.log((1.0 - prior1) * f0 + prior1 * f1)
    total = total + prop_ll
    best_flat = int(np.argmax(total))
    best_idx = np.unravel_index(best_flat, total.shape)
    best_acc = [float(acc[i][best_idx]) for i in range(m)]
    best_prior1 = float(prior1[best_idx])
    return float(total[best_idx]), (best_acc, best_prior1)


def test_em_matches_grid_oracle_on_toy_matrix():
    votes = np.array([[0, 0, 1, 1], [0, ABSTAIN, 1, 0]])
    params, history = fit_label_model(
        LabelMatrix(votes), 2, EMConfig(max_iters=500, tol=1e-12), track_likelihood=True)
    em_ll = history[-1]
    oracle_ll, (oracle_acc, oracle_prior1) = grid_search_oracle(votes)
    assert em_ll >= oracle_ll - 1e-3

    # parameters match the oracle argmax up to the binary label flip
    direct = max(abs(params.accuracies[0] - oracle_acc[0]),
                 abs(params.accuracies[1] - oracle_acc[1]),
                 abs(params.class_priors[1] - oracle_prior1))
    flipped = max(abs(params.accuracies[0] - (1 - oracle_acc[0])),
                  abs(params.accuracies[1] - (1 - oracle_acc[1])),
                  abs(params.class_priors[1] - (1 - oracle_prior1)))
    assert min(direct, flipped) <= 0.02


def test_em_likelihood_formula_matches_manual():
    votes = np.array([[0, 1, ABSTAIN], [1, 1, 0]])
    params = LabelModelParams(
        np.array([0.4, 0.6]), np.array([0.7, 0.8]), np.array([2 / 3, 1.0]))
    manual = 0.0
    for j in range(3):
        row = 0.0
        for c, prior in enumerate([0.4, 0.6]):
            f = prior
            for i, a in enumerate([0.7, 0.8]):
                v = votes[i, j]
                if v == ABSTAIN:
                    continue
                f *= a if v == c else (1 - a)
            row += f
        manual += np.log(row)
    manual += 2 * np.log(2 / 3) + 1 * np.log(1 / 3)  # LF0 propensity factors
    assert _log_likelihood(votes, params) == pytest.approx(manual, abs=1e-12)


# -- posterior ----------------------------------------------------------------


def bayes_enumeration_posterior(votes_col, priors, accuracies):
    """Direct Bayes computation for one row (independent loops, no shortcuts)."""
    C = len(priors)
    scores = []
    for c in range(C):
        p = priors[c]
        for i, v in enumerate(votes_col):
            if v == ABSTAIN:
                continue
            p *= accuracies[i] if v == c else (1 - accuracies[i]) / (C - 1)
        scores.append(p)
    total = sum(scores)
    return [s / total for s in scores]


def test_posterior_all_abstain_returns_priors():
    params = LabelModelParams(np.array([0.3, 0.7]), np.array([0.8]), np.array([0.5]))
    post = posterior_from_votes(LabelMatrix(np.array([[ABSTAIN]])), params)
    assert post[0].tolist() == pytest.approx([0.3, 0.7])


def test_posterior_single_confident_lf():
    params = LabelModelParams(np.array([0.5, 0.5]), np.array([0.8]), np.array([1.0]))
    post = posterior_from_votes(LabelMatrix(np.array([[0]])), params)
    assert post[0].tolist() == pytest.approx([0.8, 0.2])


def test_posterior_matches_bayes_enumeration():
    rng = np.random.default_rng(11)
    priors = np.array([0.25, 0.35, 0.4])
    accuracies = np.array([0.9, 0.6, 0.75])
    params = LabelModelParams(priors, accuracies, np.array([0.9, 0.8, 0.7]))
    for _ in range(50):
        col = rng.integers(-1, 3, size=3)
        post = posterior_from_votes(LabelMatrix(col[:, None]), params)[0]
        expected = bayes_enumeration_posterior(col, priors, accuracies)
        assert post.tolist() == pytest.approx(expected, abs=1e-12)


def test_posterior_sums_to_one():
    rng = np.random.default_rng(13)
    params = LabelModelParams(
        np.array([0.2, 0.5, 0.3]), np.array([0.55, 0.9]), np.array([0.5, 0.5]))
    for _ in range(100):
        col = rng.integers(-1, 3, size=2)
        post = posterior_from_votes(LabelMatrix(col[:, None]), params)[0]
        assert post.sum() == pytest.approx(1.0, abs=1e-9)
        assert (post >= 0).all()


# -- crossing -----------------------------------------------------------------


def test_crossing_examples():
    posts = np.array([[0.97, 0.03], [0.03, 0.97], [0.10, 0.90]])
    mask = crossing_mask(posts, target_class=0, alpha=0.95)
    assert mask.tolist() == [False, True, False]


def test_crossing_alpha_monotone_subsets():
    rng = np.random.default_rng(17)
    posts = rng.dirichlet([1.0, 1.0], size=500)
    previous = None
    for alpha in (0.5, 0.7, 0.9, 0.95):
        mask = crossing_mask(posts, 0, alpha)
        if previous is not None:
            assert np.all(mask <= previous)  # pointwise subset
        previous = mask


# -- precision ----------------------------------------------------------------


def fitted_pdb(alpha=0.95, beta=0.1):
    X, y = blob_arrays(n_per_class=60, separation=3.0, seed=5)
    specs = [
        LabelerSpec("nb", LabelerFamily.NAIVE_BAYES),
        LabelerSpec("lr", LabelerFamily.LOGISTIC_REGRESSION,
                    {"learning_rate": 0.05, "epochs": 60}),
        LabelerSpec("dt", LabelerFamily.DECISION_TREE, {"max_depth": 4}),
    ]
    labelers = tuple(train_arrays(s, X, y, 2) for s in specs)
    matrix = build_label_matrix(list(labelers), X, beta)
    params = fit_label_model(matrix, 2)
    return PDB(params, labelers, alpha, beta), X, y


def test_precision_all_crossing_truly_different():
    pdb, X, y = fitted_pdb()
    crossing = pdb.across_boundary_matrix(X, 0)
    assert crossing.any()
    # blobs are well separated: crossing rows should really be class 1
    assert pdb_precision(pdb, X, y, 0) >= 0.95


def test_precision_none_when_nothing_crosses():
    pdb, X, y = fitted_pdb(alpha=0.95)
    # rows deep inside class 1's blob never cross a boundary protecting class 1
    own = X[y == 1][:10]
    crossing = pdb.across_boundary_matrix(own, 1)
    assert not crossing.any()
    assert pdb_precision(pdb, own, np.ones(10, dtype=int), 1) is None


def test_across_boundary_scalar_view():
    pdb, X, y = fitted_pdb()
    idx1 = int(np.flatnonzero(y == 1)[0])
    assert pdb.across_boundary(X[idx1], 0) == bool(pdb.across_boundary_matrix(X[[idx1]], 0)[0])


def test_majority_vote_labels_tie_breaks_low():
    votes = np.array([[0], [1]])
    assert majority_vote_labels(LabelMatrix(votes), 2)[0] == 0


# -- persistence ----------------------------------------------------------------


def test_pdb_save_load_round_trip(tmp_path):
    pdb, X, y = fitted_pdb()
    path = tmp_path / "boundary.json"
    save_pdb(pdb, path)
    clone = load_pdb(path)
    assert clone.alpha == pdb.alpha and clone.beta == pdb.beta
    assert np.array_equal(clone.posterior_matrix(X[:20]), pdb.posterior_matrix(X[:20]))
