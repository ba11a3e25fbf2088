import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fingerbci import decompose, exhaustive_code, fit_ecoc, load_model, make_bank, predict_ecoc, save_model
from fingerbci.ecoc import (
    CodeMatrix,
    decode,
    fit_binary,
    hamming,
    predict_binary_trials,
    predict_trials,
    resolve_feature_grid,
)


def brute_force_nearest(rows: np.ndarray, word) -> int:
    """Independent oracle: linear scan with lowest-index tie-break."""
    best_index, best_distance = None, None
    for i, row in enumerate(rows):
        distance = sum(1 for a, b in zip(row, word) if a != b)
        if best_distance is None or distance < best_distance:
            best_index, best_distance = i, distance
    return best_index


class TestExhaustiveCode:
    def test_four_class_rows(self):
        code = exhaustive_code(4)
        expected = np.array(
            [
                [1, 1, 1, 1, 1, 1, 1],
                [0, 0, 0, 0, 1, 1, 1],
                [0, 0, 1, 1, 0, 0, 1],
                [0, 1, 0, 1, 0, 1, 0],
            ]
        )
        assert np.array_equal(code.bits, expected)

    def test_three_class_rows(self):
        code = exhaustive_code(3)
        assert np.array_equal(code.bits, [[1, 1, 1], [0, 0, 1], [0, 1, 0]])

    def test_codeword_length(self):
        for p in range(3, 9):
            assert exhaustive_code(p).n_columns == 2 ** (p - 1) - 1

    def test_minimum_distance_four_class(self):
        code = exhaustive_code(4)
        distances = [
            hamming(code.bits[i], code.bits[j]) for i in range(4) for j in range(i + 1, 4)
        ]
        assert min(distances) == 4

    def test_invariants_hold_for_all_supported_sizes(self):
        for p in range(3, 9):
            exhaustive_code(p).validate()

    def test_out_of_range_rejected(self):
        for p in (2, 9):
            with pytest.raises(ValueError):
                exhaustive_code(p)

    def test_printed_table_variant_fails_validation(self):
        # A class-2 row of 0001111 creates a constant column and breaks the
        # distance structure; the run-length construction is the valid one.
        bits = exhaustive_code(4).bits.copy()
        bits[1] = [0, 0, 0, 1, 1, 1, 1]
        with pytest.raises(ValueError):
            CodeMatrix(bits=bits).validate()


class TestHamming:
    def test_identical_is_zero(self):
        word = np.array([1, 0, 1, 1])
        assert hamming(word, word) == 0

    def test_reference_rows(self):
        assert hamming(np.array([1] * 7), np.array([0, 0, 0, 0, 1, 1, 1])) == 4

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=20), st.data())
    def test_symmetry(self, a, data):
        b = data.draw(st.lists(st.integers(0, 1), min_size=len(a), max_size=len(a)))
        assert hamming(np.array(a), np.array(b)) == hamming(np.array(b), np.array(a))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            hamming(np.array([1, 0]), np.array([1, 0, 1]))


class TestDecode:
    def test_exact_row_decodes_to_class(self):
        code = exhaustive_code(4)
        for c in range(4):
            assert decode(code, code.bits[c]) == c

    def test_one_bit_from_class_one(self):
        code = exhaustive_code(4)
        word = np.array([1, 1, 1, 1, 1, 1, 0])
        distances = [hamming(word, code.bits[c]) for c in range(4)]
        assert distances == [1, 5, 5, 3]
        assert decode(code, word) == 0

    def test_brute_forced_tie_case(self):
        # Distances to the four rows are (4, 4, 2, 2): tie between the last
        # two classes, resolved to the lower index.
        code = exhaustive_code(4)
        word = np.array([0, 0, 1, 1, 0, 1, 0])
        distances = [hamming(word, code.bits[c]) for c in range(4)]
        assert distances == [4, 4, 2, 2]
        assert decode(code, word) == 2
        assert decode(code, word) == brute_force_nearest(code.bits, word)

    def test_all_words_match_brute_force_p3(self):
        code = exhaustive_code(3)
        for word in itertools.product((0, 1), repeat=3):
            assert decode(code, np.array(word)) == brute_force_nearest(code.bits, word)

    def test_single_bit_correction_p4(self):
        code = exhaustive_code(4)
        for c in range(4):
            for j in range(7):
                word = code.bits[c].copy()
                word[j] ^= 1
                assert decode(code, word) == c

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            decode(exhaustive_code(3), np.array([1, 0]))


class TestFeatureGrid:
    def test_default_grid(self):
        assert resolve_feature_grid(None, 9) == [1, 3, 9]
        assert resolve_feature_grid(None, 1) == [1]

    def test_explicit_grid_clamped(self):
        assert resolve_feature_grid([0, 4, 99], 8) == [1, 4, 8]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            resolve_feature_grid([], 4)


@pytest.fixture(scope="module")
def mini_decomp(request):
    dataset = request.getfixturevalue("mini_four_class")
    bank = make_bank(8.0, 14.0, 2.0, taps=63)
    return dataset, decompose(dataset, bank)


def fit_small_ecoc(decomp, labels, seed=3):
    return fit_ecoc(
        decomp,
        labels,
        exhaustive_code(4),
        n_pairs=1,
        folds=2,
        max_features_grid=[1],
        min_samples_split_grid=[2],
        n_estimators_grid=[10],
        seed=seed,
        taps=63,
    )


class TestFitEcoc:
    def test_seven_columns_with_bands(self, mini_decomp):
        dataset, decomp = mini_decomp
        model = fit_small_ecoc(decomp, dataset.labels())
        assert len(model.columns) == 7
        for column in model.columns:
            assert column.selected_bands
            assert len(column.csp_models) == len(column.selected_bands)

    def test_degenerate_code_rejected(self, mini_decomp):
        dataset, decomp = mini_decomp
        bits = exhaustive_code(4).bits.copy()
        bits[1] = [0, 0, 0, 1, 1, 1, 1]  # printed-table variant: column 4 all ones
        with pytest.raises(ValueError, match="one side"):
            fit_ecoc(decomp, dataset.labels(), CodeMatrix(bits=bits), n_pairs=1, folds=2,
                     max_features_grid=[1], min_samples_split_grid=[2], n_estimators_grid=[10], taps=63)

    def test_deterministic(self, mini_decomp):
        dataset, decomp = mini_decomp
        first = fit_small_ecoc(decomp, dataset.labels(), seed=9)
        second = fit_small_ecoc(decomp, dataset.labels(), seed=9)
        predictions_first = predict_trials(first, dataset.trials[:6])
        predictions_second = predict_trials(second, dataset.trials[:6])
        assert np.array_equal(predictions_first, predictions_second)
        assert [c.selected_bands for c in first.columns] == [c.selected_bands for c in second.columns]

    def test_missing_class_rejected(self, mini_decomp):
        dataset, decomp = mini_decomp
        labels = dataset.labels()
        labels[labels == 3] = 2
        with pytest.raises(ValueError, match="classes"):
            fit_small_ecoc(decomp, labels)

    def test_single_trial_prediction_matches_batch(self, mini_decomp):
        dataset, decomp = mini_decomp
        model = fit_small_ecoc(decomp, dataset.labels())
        batch = predict_trials(model, dataset.trials[:4])
        singles = [predict_ecoc(model, t) for t in dataset.trials[:4]]
        assert list(batch) == singles

    def test_channel_mismatch_rejected(self, mini_decomp):
        from fingerbci import Trial

        dataset, decomp = mini_decomp
        model = fit_small_ecoc(decomp, dataset.labels())
        bad = Trial(label=0, samples=np.zeros((7, 512), dtype=np.float32), sample_rate=128.0)
        with pytest.raises(ValueError, match="channels"):
            predict_ecoc(model, bad)

    def test_mostly_correct_on_training_distribution(self, mini_decomp):
        dataset, decomp = mini_decomp
        model = fit_small_ecoc(decomp, dataset.labels())
        predictions = predict_trials(model, dataset.trials)
        assert np.mean(predictions == dataset.labels()) >= 0.8


class TestBinaryModel:
    def test_fit_and_predict_pair(self, mini_decomp):
        from fingerbci.trialstore import subset_classes

        dataset, _ = mini_decomp
        pair_view = subset_classes(dataset, 0, 2)
        bank = make_bank(8.0, 14.0, 2.0, taps=63)
        decomp = decompose(pair_view, bank)
        model = fit_binary(
            decomp, pair_view.labels(), (0, 2), dataset.class_names,
            n_pairs=1, folds=2, max_features_grid=[1], min_samples_split_grid=[2],
            n_estimators_grid=[10], seed=4, taps=63,
        )
        predictions = predict_binary_trials(model, pair_view.trials)
        assert set(np.unique(predictions)) <= {0, 2}
        truth = np.where(pair_view.labels() == 1, 2, 0)
        assert np.mean(predictions == truth) >= 0.9


class TestModelBundle:
    def test_round_trip_predictions_and_bytes(self, mini_decomp, tmp_path):
        dataset, decomp = mini_decomp
        model = fit_small_ecoc(decomp, dataset.labels())
        first_dir = tmp_path / "one"
        second_dir = tmp_path / "two"
        save_model(model, first_dir)
        loaded = load_model(first_dir)
        save_model(loaded, second_dir)
        assert (first_dir / "model.json").read_bytes() == (second_dir / "model.json").read_bytes()
        probes = dataset.trials[:5]
        assert np.array_equal(predict_trials(model, probes), predict_trials(loaded, probes))

    def test_binary_round_trip(self, mini_decomp, tmp_path):
        from fingerbci.trialstore import subset_classes

        dataset, _ = mini_decomp
        pair_view = subset_classes(dataset, 0, 1)
        bank = make_bank(8.0, 14.0, 2.0, taps=63)
        decomp = decompose(pair_view, bank)
        model = fit_binary(
            decomp, pair_view.labels(), (0, 1), dataset.class_names,
            n_pairs=1, folds=2, max_features_grid=[1], min_samples_split_grid=[2],
            n_estimators_grid=[10], seed=5, taps=63,
        )
        save_model(model, tmp_path / "bin")
        loaded = load_model(tmp_path / "bin")
        assert loaded.pair == (0, 1)
        probes = pair_view.trials[:4]
        assert np.array_equal(predict_binary_trials(model, probes), predict_binary_trials(loaded, probes))

    def test_missing_bundle_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_model(tmp_path)
