import numpy as np
import pytest

from identity_labeling.errors import DataFormatError, MalformedModelError, UnknownConceptError
from identity_labeling.pcs import (
    ActivationParams,
    BetaScores,
    Node,
    SemanticNetwork,
    beta_from_activation,
    beta_table,
    load_handcoded_betas,
    load_network,
    pcs_probability,
    spread_activation,
    write_betas,
)


def pair(weight):
    return SemanticNetwork([Node("cue", "cue"), Node("x")], [("cue", "x", weight)])


class TestSpreadActivation:
    # Fixed points solved by hand: w (1 - a) = decay (a - rest) for w > 0,
    # w (a - floor) = decay (a - rest) for w < 0, with the cue held at 1.
    def test_excitatory_fixed_point(self):
        state = spread_activation(pair(0.5), ["cue"])
        assert state.converged
        assert state["x"] == pytest.approx(0.49 / 0.6, abs=1e-4)
        assert state["cue"] == 1.0

    def test_inhibitory_fixed_point(self):
        state = spread_activation(pair(-0.5), ["cue"])
        assert state.converged
        assert state["x"] == pytest.approx(-0.11 / 0.6, abs=1e-4)

    def test_no_cue_stays_at_rest(self):
        state = spread_activation(pair(0.5), [])
        np.testing.assert_allclose(state.activation, -0.1)

    def test_monotone_in_link_weight(self):
        levels = [spread_activation(pair(w), ["cue"])["x"] for w in (0.05, 0.2, 0.5, 1.0)]
        assert all(a < b for a, b in zip(levels, levels[1:]))

    def test_activation_bounded(self, rng):
        tokens = [f"n{i}" for i in range(8)]
        edges = [(tokens[i], tokens[j], rng.normal(0, 2))
                 for i in range(8) for j in range(i + 1, 8) if rng.random() < 0.5]
        state = spread_activation(SemanticNetwork(tokens, edges), ["n0"])
        assert np.all(state.activation >= -0.2) and np.all(state.activation <= 1.0)

    def test_closer_to_cue_more_active(self):
        net = SemanticNetwork(["cue", "near", "far"], [("cue", "near", 0.4), ("near", "far", 0.4)])
        state = spread_activation(net, ["cue"])
        assert state["near"] > state["far"] > -0.1

    def test_unknown_cue(self):
        with pytest.raises(UnknownConceptError):
            spread_activation(pair(0.5), ["nobody"])

    def test_iteration_cap(self):
        state = spread_activation(pair(0.5), ["cue"], ActivationParams(max_iterations=3))
        assert state.iterations == 3 and not state.converged

    def test_betas_from_state(self):
        state = spread_activation(pair(0.5), ["cue"])
        b = beta_from_activation(state, ["x"], "cue")
        assert b["x"] == pytest.approx(state["x"])


class TestNetwork:
    def test_undirected(self):
        W = pair(0.3).weight_matrix()
        np.testing.assert_array_equal(W, W.T)

    def test_rejects_self_loop_and_unknown_node(self):
        with pytest.raises(MalformedModelError):
            SemanticNetwork(["a"], [("a", "a", 1.0)])
        with pytest.raises(MalformedModelError):
            SemanticNetwork(["a"], [("a", "b", 1.0)])
        with pytest.raises(MalformedModelError):
            SemanticNetwork(["a", "a"])

    def test_load_network(self, tmp_path):
        path = tmp_path / "net.txt"
        path.write_text(
            "[nodes]\ntoken,role,resting\ndoctor,cue,\npatient,identity,\n"
            "[edges]\nfrom,to,weight\ndoctor,patient,0.5\n"
        )
        net = load_network(path)
        assert net.tokens == ["doctor", "patient"]
        assert net.weight_matrix()[1, 0] == 0.5


class TestHandcoded:
    def test_table_has_both_tasks(self, betas):
        table = beta_table(betas)
        assert table[(2, "doctor")]["patient"] == 5
        assert table[(1, "Ethel")]["grandmother"] == 4

    def test_ordering_of_association_levels(self, betas):
        table = beta_table(betas)
        for cue, role_pair, shared, none in [
            ("soccer coach", "soccer player", "sports fan", "shop clerk"),
            ("doctor", "patient", "paramedic", "trespasser"),
        ]:
            b = table[(2, cue)]
            assert b[role_pair] > b[shared] > b[none]

    def test_someone_probability_is_half(self, betas, questions):
        table = beta_table(betas)
        for q in questions:
            if q.cue == "someone":
                b = table[(q.task, q.cue)]
                assert pcs_probability(b, q.answer_a, q.answer_b) == 0.5

    def test_round_trip(self, betas, tmp_path):
        path = tmp_path / "b.csv"
        write_betas(betas, path)
        back = beta_table(load_handcoded_betas(path))
        assert back == beta_table(betas)

    def test_conflicting_value(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("task,cue,identity,beta\n2,doctor,patient,5\n2,doctor,patient,4\n")
        with pytest.raises(DataFormatError, match=":3"):
            load_handcoded_betas(path)

    def test_missing_identity(self):
        with pytest.raises(UnknownConceptError):
            BetaScores("doctor", {"patient": 5})["nurse"]
