import json
import math

import numpy as np
import pytest

from qfilter import (
    InvalidInputError,
    load_problem,
    optimal_filtering,
    problem_from_dict,
    problem_to_dict,
    save_problem,
)


def valid_payload():
    s = 1 / math.sqrt(2)
    return {
        "dimension": 2,
        "states": [
            {"amplitudes": [[1.0, 0.0], [0.0, 0.0]], "prior": 0.5},
            {"amplitudes": [[s, 0.0], [s, 0.0]], "prior": 0.5},
        ],
        "target_index": 0,
    }


class TestParsing:
    def test_valid_payload(self):
        problem = problem_from_dict(valid_payload())
        assert problem.n_states == 2
        assert problem.dimension == 2

    def test_target_index_reordering(self):
        payload = valid_payload()
        payload["target_index"] = 1
        problem = problem_from_dict(payload)
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(problem.target.amplitudes, [s, s])

    @pytest.mark.parametrize(
        "mutate,message",
        [
            (lambda p: p.pop("dimension"), "missing"),
            (lambda p: p.update(extra=1), "unknown"),
            (lambda p: p["states"][0].update(label="x"), "unknown"),
            (lambda p: p["states"][0].pop("prior"), "missing"),
            (lambda p: p["states"][0].update(amplitudes=[[1.0, 0.0]]), "pairs"),
            (lambda p: p["states"][0].update(amplitudes=[[1.0], [0.0]]), "pairs"),
            (lambda p: p.update(states=[]), "nonempty"),
            (lambda p: p.update(target_index="0"), "integer"),
            (lambda p: p.update(dimension=0), "positive"),
        ],
    )
    def test_schema_violations(self, mutate, message):
        payload = valid_payload()
        mutate(payload)
        with pytest.raises(InvalidInputError, match=message):
            problem_from_dict(payload)

    def test_unnormalized_state_named(self):
        payload = valid_payload()
        payload["states"][1]["amplitudes"] = [[1.0, 0.0], [1.0, 0.0]]
        with pytest.raises(InvalidInputError, match="state 1"):
            problem_from_dict(payload)


class TestRoundTrip:
    def test_save_load_preserves_report(self, tmp_path, figure_point_problem):
        path = tmp_path / "ensemble.json"
        save_problem(figure_point_problem, path)
        loaded = load_problem(path)
        original = optimal_filtering(figure_point_problem)
        recomputed = optimal_filtering(loaded)
        assert recomputed.optimal_Q == pytest.approx(original.optimal_Q, abs=1e-12)
        assert recomputed.regime == original.regime
        np.testing.assert_allclose(
            recomputed.per_state_failure, original.per_state_failure, atol=1e-12
        )

    def test_serialized_form_is_exact(self, figure_point_problem):
        payload = problem_to_dict(figure_point_problem)
        reparsed = problem_from_dict(json.loads(json.dumps(payload)))
        np.testing.assert_array_equal(
            reparsed.state_matrix, figure_point_problem.state_matrix
        )
