"""Basin grids: per-cell classification, agreement scoring, parallelism."""

import numpy as np
import pytest

from nldm.basin import (
    DIVERGED,
    UNRESOLVED,
    BasinGrid,
    classify_series,
    grid_agreement,
    ground_truth_grid,
    label_operator_cell,
    operator_grid,
)
from nldm.core import DimensionError, FeatureConfig, LearnedOperator
from nldm.odes import CycleAttractor, PointAttractor, make_system

WINDOW = ((-3.0, 3.0), (-3.0, 3.0))


def plain_grid(labels):
    labels = np.array(labels, dtype=object)
    return BasinGrid(
        x_range=(0.0, 1.0),
        y_range=(0.0, 1.0),
        resolution=labels.shape[0],
        labels=labels,
        source={},
        meta={},
    )


def scaling_operator(factor, num_states=2):
    config = FeatureConfig(num_states, 1, 1)
    return LearnedOperator(factor * np.eye(num_states), config, dt=0.1)


@pytest.fixture(scope="module")
def truth3():
    system = make_system("two_attractor")
    return ground_truth_grid(system, WINDOW, 3, horizon=10.0)


# ---------------------------------------------------------------- truth grids


def test_truth_grid_splits_bistable_window_by_sign(truth3):
    # x < 0 flows to the left sink, x > 0 to the right one, and the
    # x = 0 column rides the separatrix into the saddle: never captured.
    assert list(truth3.labels[0]) == ["left_sink"] * 3
    assert list(truth3.labels[1]) == [UNRESOLVED] * 3
    assert list(truth3.labels[2]) == ["right_sink"] * 3


def test_truth_grid_metadata(truth3):
    assert truth3.source["kind"] == "integrator"
    assert truth3.source["system"] == "two_attractor"
    assert truth3.meta["horizon"] == 10.0
    assert truth3.meta["tol"] == 0.05
    assert truth3.meta["persistence"] == 10
    np.testing.assert_array_equal(truth3.xs, np.linspace(-3.0, 3.0, 3))
    np.testing.assert_array_equal(truth3.ys, np.linspace(-3.0, 3.0, 3))


def test_refining_resolution_keeps_shared_cell_labels(truth3):
    # Cells are classified independently, so the 5-point axis (which
    # contains the 3-point axis as every other entry) must agree with the
    # coarse grid wherever coordinates coincide.
    fine = ground_truth_grid(make_system("two_attractor"), WINDOW, 5, horizon=10.0)
    for ci, fi in enumerate((0, 2, 4)):
        assert fine.xs[fi] == truth3.xs[ci]
        for cj, fj in enumerate((0, 2, 4)):
            assert fine.labels[fi, fj] == truth3.labels[ci, cj]


def test_parallel_truth_grid_matches_serial(truth3):
    parallel = ground_truth_grid(
        make_system("two_attractor"), WINDOW, 3, horizon=10.0, n_jobs=2
    )
    np.testing.assert_array_equal(parallel.labels, truth3.labels)


def test_truth_grid_validation():
    system = make_system("two_attractor")
    with pytest.raises(ValueError, match="resolution"):
        ground_truth_grid(system, WINDOW, 1, horizon=5.0)
    with pytest.raises(ValueError, match="extent"):
        ground_truth_grid(system, ((1.0, 1.0), (-1.0, 1.0)), 3, horizon=5.0)
    with pytest.raises(ValueError, match="horizon"):
        ground_truth_grid(system, WINDOW, 3, horizon=0.0)
    with pytest.raises(ValueError, match="no attractors"):
        ground_truth_grid(make_system("lorenz"), WINDOW, 3, horizon=5.0)


# ---------------------------------------------------------- series classifier


def test_capture_needs_full_persistence_run():
    attractors = (PointAttractor("home", (0.0, 0.0)),)
    near = [0.0, 0.0]
    far = [5.0, 5.0]
    assert classify_series([far] + [near] * 4, attractors, 0.05, persistence=4) == "home"
    assert (
        classify_series([far] + [near] * 3, attractors, 0.05, persistence=4)
        == UNRESOLVED
    )


def test_interrupted_run_starts_over():
    attractors = (PointAttractor("home", (0.0, 0.0)),)
    near, far = [0.0, 0.0], [5.0, 5.0]
    rows = [near] * 3 + [far] + [near] * 3
    assert classify_series(rows, attractors, 0.05, persistence=4) == UNRESOLVED
    assert classify_series(rows + [near], attractors, 0.05, persistence=4) == "home"


def test_earliest_completed_capture_wins():
    # The second catalog entry finishes its run first, so it wins even
    # though the first entry would capture later in the same series.
    attractors = (
        PointAttractor("slow", (4.0, 0.0)),
        PointAttractor("fast", (0.0, 0.0)),
    )
    rows = [[0.0, 0.0]] * 3 + [[4.0, 0.0]] * 3
    assert classify_series(rows, attractors, 0.05, persistence=3) == "fast"


def test_same_step_ties_go_to_earlier_catalog_entry():
    first = PointAttractor("first", (0.0, 0.0))
    second = PointAttractor("second", (0.02, 0.0))
    rows = [[0.01, 0.0]] * 2
    assert classify_series(rows, (first, second), 0.05, persistence=2) == "first"
    assert classify_series(rows, (second, first), 0.05, persistence=2) == "second"


def test_nonfinite_sample_before_capture_means_diverged():
    attractors = (PointAttractor("home", (0.0, 0.0)),)
    near = [0.0, 0.0]
    blown = [np.nan, 0.0]
    assert classify_series([near] * 3 + [blown], attractors, 0.05, 4) == DIVERGED
    # A capture completed before the blowup still counts.
    assert classify_series([near] * 4 + [blown], attractors, 0.05, 4) == "home"


def test_short_series_stays_unresolved():
    attractors = (PointAttractor("home", (0.0, 0.0)),)
    assert classify_series([[0.0, 0.0]] * 2, attractors, 0.05, persistence=10) == UNRESOLVED


def test_cycle_capture_checks_radius_and_pinned_plane():
    orbit = CycleAttractor("orbit", radius=1.0, axes=(0, 1), plane=((2, 0.5),))
    angles = np.linspace(0.0, 2 * np.pi, 5)
    on_cycle = [[np.cos(a), np.sin(a), 0.5] for a in angles]
    assert classify_series(on_cycle, (orbit,), 0.05, persistence=3) == "orbit"
    wrong_height = [[np.cos(a), np.sin(a), 0.9] for a in angles]
    assert classify_series(wrong_height, (orbit,), 0.05, persistence=3) == UNRESOLVED
    wrong_radius = [[1.2 * np.cos(a), 1.2 * np.sin(a), 0.5] for a in angles]
    assert classify_series(wrong_radius, (orbit,), 0.05, persistence=3) == UNRESOLVED


# -------------------------------------------------------------- operator grids


def test_contracting_operator_labels_every_cell_captured():
    operator = scaling_operator(0.5)
    grid = operator_grid(
        operator, make_system("lho"), ((-2.0, 2.0), (-2.0, 2.0)), 4, steps=60
    )
    assert (grid.labels == "origin").all()
    assert grid.source["kind"] == "operator"
    assert grid.meta["steps"] == 60
    assert grid.meta["dt"] == operator.dt


def test_doubling_operator_diverges_everywhere_but_the_origin_cell():
    operator = scaling_operator(2.0)
    grid = operator_grid(
        operator, make_system("lho"), ((-2.0, 2.0), (-2.0, 2.0)), 5, steps=30
    )
    assert grid.labels[2, 2] == "origin"
    off_center = grid.labels.copy()
    off_center[2, 2] = DIVERGED
    assert (off_center == DIVERGED).all()


def test_single_cell_labels_match_grid_cells():
    operator = scaling_operator(2.0)
    system = make_system("lho")
    grid = operator_grid(operator, system, ((-2.0, 2.0), (-2.0, 2.0)), 3, steps=30)
    for i, x in enumerate(grid.xs):
        for j, y in enumerate(grid.ys):
            assert label_operator_cell(operator, system, (x, y), steps=30) == grid.labels[i, j]


def test_divergence_threshold_is_adjustable():
    operator = scaling_operator(2.0)
    system = make_system("lho")
    point = (1.0, 0.0)
    assert label_operator_cell(operator, system, point, steps=3) == UNRESOLVED
    assert (
        label_operator_cell(operator, system, point, steps=3, divergence_threshold=1.5)
        == DIVERGED
    )


def test_fixed_coordinates_slice_higher_dimensional_systems():
    operator = scaling_operator(0.5, num_states=3)
    system = make_system("mfcd")
    with pytest.raises(DimensionError, match="free axes"):
        operator_grid(operator, system, ((-2.0, 2.0), (-2.0, 2.0)), 3, steps=15)
    grid = operator_grid(
        operator,
        system,
        ((-2.0, 2.0), (-2.0, 2.0)),
        3,
        steps=15,
        fixed_coords={2: 1.0},
    )
    # Contraction leaves the cycle band immediately, so nothing captures.
    assert (grid.labels == UNRESOLVED).all()
    assert grid.meta["fixed_coords"] == {2: 1.0}


def test_operator_grid_validation():
    operator = scaling_operator(0.5)
    with pytest.raises(ValueError, match="no attractors"):
        operator_grid(operator, make_system("lorenz"), WINDOW, 3)
    with pytest.raises(DimensionError, match="states"):
        operator_grid(operator, make_system("mfcd"), WINDOW, 3)
    with pytest.raises(ValueError, match="steps"):
        operator_grid(operator, make_system("lho"), WINDOW, 3, steps=0)


# ------------------------------------------------------------------ agreement


def test_agreement_fraction_skips_mutually_unresolved_cells():
    truth = plain_grid([["left_sink", UNRESOLVED], ["right_sink", "right_sink"]])
    other = plain_grid([["left_sink", UNRESOLVED], ["left_sink", "right_sink"]])
    result = grid_agreement(truth, other)
    assert result.compared_cells == 3
    assert result.fraction_agree == pytest.approx(2.0 / 3.0)
    # The confusion table still counts all four cells.
    assert result.confusion == {
        "left_sink": {"left_sink": 1},
        "unresolved": {"unresolved": 1},
        "right_sink": {"left_sink": 1, "right_sink": 1},
    }


def test_one_sided_unresolved_counts_as_disagreement():
    truth = plain_grid([["left_sink", UNRESOLVED], [UNRESOLVED, UNRESOLVED]])
    other = plain_grid([["left_sink", "left_sink"], [UNRESOLVED, UNRESOLVED]])
    result = grid_agreement(truth, other)
    assert result.compared_cells == 2
    assert result.fraction_agree == pytest.approx(0.5)


def test_agreement_is_vacuously_perfect_when_nothing_resolves():
    blank = plain_grid([[UNRESOLVED] * 2] * 2)
    result = grid_agreement(blank, plain_grid([[UNRESOLVED] * 2] * 2))
    assert result.compared_cells == 0
    assert result.fraction_agree == 1.0


def test_agreement_with_itself_is_perfect(truth3):
    result = grid_agreement(truth3, truth3)
    assert result.fraction_agree == 1.0
    assert result.compared_cells == 6  # separatrix column unresolved twice
    total = sum(sum(row.values()) for row in result.confusion.values())
    assert total == 9


def test_agreement_rejects_mismatched_grids(truth3):
    shifted = BasinGrid(
        x_range=(-3.0, 4.0),
        y_range=truth3.y_range,
        resolution=3,
        labels=truth3.labels,
        source={},
        meta={},
    )
    with pytest.raises(DimensionError, match="window"):
        grid_agreement(truth3, shifted)
    finer = ground_truth_grid(make_system("two_attractor"), WINDOW, 5, horizon=10.0)
    with pytest.raises(DimensionError, match="window"):
        grid_agreement(truth3, finer)
