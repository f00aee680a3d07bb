import numpy as np
import pytest

from identity_labeling.errors import DataFormatError, FitError
from identity_labeling.estimation import (
    DesignRow,
    Response,
    ResponseDataset,
    agresti_coull_interval,
    bootstrap_mae_ci,
    bootstrap_mae_replicates,
    build_pcs_design,
    fit_lcss_weights,
    fit_logistic,
    gradient,
    hessian,
    load_responses,
    log_likelihood,
    mean_absolute_error,
    pcs_betas_from_fit,
    scenario_identities,
    simulate_responses,
    write_fit,
    write_responses,
)
from identity_labeling.lcss import ComponentDeflections


def simulate_rows(rng, theta, n):
    X = rng.normal(size=(n, len(theta)))
    p = 1 / (1 + np.exp(-X @ theta))
    y = (rng.random(n) < p).astype(int)
    return [DesignRow(x, int(v)) for x, v in zip(X, y)]


class TestLikelihood:
    def test_gradient_matches_central_differences(self, rng):
        X = rng.normal(size=(200, 4))
        y = rng.integers(0, 2, 200).astype(float)
        h = 1e-5
        for _ in range(20):
            theta = rng.normal(0, 1, 4)
            fd = np.array([
                (log_likelihood(theta + h * e, X, y) - log_likelihood(theta - h * e, X, y)) / (2 * h)
                for e in np.eye(4)
            ])
            g = gradient(theta, X, y)
            assert np.max(np.abs(g - fd)) / np.max(np.abs(g)) < 1e-6

    def test_hessian_matches_gradient_differences(self, rng):
        X = rng.normal(size=(100, 3))
        y = rng.integers(0, 2, 100).astype(float)
        theta = rng.normal(size=3)
        h = 1e-6
        fd = np.column_stack([
            (gradient(theta + h * e, X, y) - gradient(theta - h * e, X, y)) / (2 * h)
            for e in np.eye(3)
        ])
        np.testing.assert_allclose(-fd, hessian(theta, X), rtol=1e-6, atol=1e-8)

    def test_extreme_linear_predictor_is_finite(self):
        X = np.array([[1000.0], [-1000.0]])
        assert np.isfinite(log_likelihood([1.0], X, [0, 1]))


class TestFitLogistic:
    def test_recovers_known_coefficients(self):
        rng = np.random.default_rng(7)
        truth = np.array([1.0, -0.5, 0.8])
        fit = fit_logistic(simulate_rows(rng, truth, 10_000))
        assert fit.converged and not fit.separation_flag and not fit.singular_flag
        np.testing.assert_allclose(fit.estimates, truth, atol=0.1)
        assert np.all(fit.std_errors > 0) and np.all(fit.std_errors < 0.1)

    def test_single_feature_closed_form(self):
        # x = 1 for every row: theta_hat = logit(mean(y))
        rows = [DesignRow([1.0], 1)] * 30 + [DesignRow([1.0], 0)] * 10
        fit = fit_logistic(rows)
        assert fit.estimates[0] == pytest.approx(np.log(3.0), abs=1e-10)
        assert fit.std_errors[0] == pytest.approx(np.sqrt(1 / (40 * 0.75 * 0.25)), rel=1e-8)

    def test_separation_flagged_with_finite_estimate(self):
        rows = [DesignRow([x], int(x > 0)) for x in np.linspace(-2, 2, 20)]
        fit = fit_logistic(rows)
        assert fit.separation_flag
        assert np.all(np.isfinite(fit.estimates)) and fit.estimates[0] > 0
        assert fit.ridge > 0

    def test_all_choose_first(self):
        for x in ([1.0], [1.0, -1.0]):
            fit = fit_logistic([DesignRow(x, 1)] * 50)
            assert fit.separation_flag and np.all(np.isfinite(fit.estimates))

    def test_unidentified_column_pinned(self, rng):
        rows = [DesignRow([x, 0.0], y) for x, y in zip(rng.normal(size=200), rng.integers(0, 2, 200))]
        fit = fit_logistic(rows)
        assert fit.singular_flag and fit.estimates[1] == 0.0

    def test_collinear_columns_flagged(self, rng):
        x = rng.normal(size=200)
        rows = [DesignRow([v, 2 * v], int(y)) for v, y in zip(x, rng.integers(0, 2, 200))]
        assert fit_logistic(rows).singular_flag

    def test_reference_pinned(self, rng):
        rows = simulate_rows(rng, np.array([0.5, 0.5]), 500)
        fit = fit_logistic(rows, reference=0)
        assert fit.estimates[0] == 0.0

    def test_ridge_shrinks(self, rng):
        rows = simulate_rows(rng, np.array([2.0]), 300)
        assert abs(fit_logistic(rows, ridge=50.0).estimates[0]) < abs(fit_logistic(rows).estimates[0])

    def test_errors(self):
        with pytest.raises(FitError):
            fit_logistic([])
        with pytest.raises(ValueError):
            DesignRow([1.0], 2)

    def test_write_fit(self, rng, tmp_path):
        fit = fit_logistic(simulate_rows(rng, np.array([1.0]), 100), names=["theta"])
        write_fit(fit, tmp_path / "fit.csv")
        assert (tmp_path / "fit.csv").read_text().startswith("parameter,estimate,std_error")
        assert fit["theta"] == fit.estimates[0]


class TestPcsDesign:
    def test_difference_coding(self, questions):
        q = next(q for q in questions if q.question_id == "Q2-01")
        data = ResponseDataset([Response("r1", 2, "Q2-01", 0)], questions)
        idents = scenario_identities(questions, "soccer coach", 2)
        rows = build_pcs_design(data, "soccer coach", idents, task=2)
        x = rows[0].features
        assert x[idents.index(q.answer_b)] == 1 and x[idents.index(q.answer_a)] == -1
        assert rows[0].outcome == 1

    def test_estimated_betas_recover_order(self, questions):
        scen = "doctor"
        idents = scenario_identities(questions, scen, 2)
        truth = {i: s for i, s in zip(idents, np.linspace(2, 0, len(idents)))}
        prob = {q.question_id: 1 / (1 + np.exp(truth.get(q.answer_b, 0) - truth.get(q.answer_a, 0)))
                for q in questions}
        data = simulate_responses(questions, prob, n_respondents=4000, seed=3)
        fit = fit_logistic(build_pcs_design(data, scen, idents, task=2), reference=0, names=idents)
        betas = pcs_betas_from_fit(fit)
        for ident in idents[1:]:
            assert betas[ident] - betas[idents[0]] == pytest.approx(truth[ident] - truth[idents[0]], abs=0.15)

    def test_prior_score_feature(self, questions, betas):
        from identity_labeling.pcs import beta_table

        table = beta_table(betas)
        data = ResponseDataset([Response("r1", 1, "Q1-01", 1)], questions)
        rows = build_pcs_design(data, "Ethel", [], prior_scores=table[(1, "Ethel")].scores, task=1)
        assert rows[0].features.tolist() == [1 - 4] and rows[0].outcome == 0


class TestLcssFit:
    def test_recovers_weights(self):
        rng = np.random.default_rng(11)
        truth = np.array([1.0, 0.5, 0.8])
        components, prob, questions = {}, {}, []
        from identity_labeling.vignettes import VignetteQuestion

        for i in range(40):
            qid = f"S{i:02d}"
            questions.append(VignetteQuestion(qid, 2, "someone", "greeting", ("x", "y"), "Low",
                                               association_condition="None"))
            a = ComponentDeflections(*rng.uniform(0, 18, 1), *rng.uniform(0, 4, 2))
            b = ComponentDeflections(*rng.uniform(0, 18, 1), *rng.uniform(0, 4, 2))
            components[qid] = (a, b)
            prob[qid] = 1 / (1 + np.exp(-(truth @ (b.scaled() - a.scaled()))))
        data = simulate_responses(questions, prob, n_respondents=500, seed=5)
        assert len(data.records) == 20_000
        fit = fit_lcss_weights(data, components)
        np.testing.assert_allclose(fit.estimates, truth, atol=0.1)
        assert fit.names == ["w_f", "w_ft", "w_fk"]


class TestAgrestiCoull:
    def test_reference_interval(self):
        # mpmath evaluation of the adjusted-count formula
        lo, hi = agresti_coull_interval(39, 78)
        assert lo == pytest.approx(0.3916743215831113, abs=1e-6)
        assert hi == pytest.approx(0.6083256784168887, abs=1e-6)

    def test_clipped(self):
        lo, hi = agresti_coull_interval(0, 5)
        assert lo == 0.0 and 0 < hi < 1

    def test_wider_at_higher_confidence(self):
        a = agresti_coull_interval(20, 50, 0.9)
        b = agresti_coull_interval(20, 50, 0.99)
        assert b[0] < a[0] and b[1] > a[1]

    def test_bad_input(self):
        with pytest.raises(ValueError):
            agresti_coull_interval(5, 4)


class TestBootstrap:
    def make_data(self, questions):
        data = simulate_responses(questions, {q.question_id: 0.3 for q in questions}, 60, seed=1)
        return data, {q.question_id: 0.7 for q in questions}

    def test_deterministic(self, questions):
        data, prob = self.make_data(questions)
        a = bootstrap_mae_replicates(data, prob, 200, seed=9)
        b = bootstrap_mae_replicates(data, prob, 200, seed=9)
        np.testing.assert_array_equal(a, b)

    def test_prefix_stable(self, questions):
        data, prob = self.make_data(questions)
        a = bootstrap_mae_replicates(data, prob, 50, seed=9)
        b = bootstrap_mae_replicates(data, prob, 200, seed=9)
        np.testing.assert_array_equal(a, b[:50])

    def test_interval_brackets_point_estimate(self, questions):
        data, prob = self.make_data(questions)
        point = mean_absolute_error(prob, data.empirical())
        lo, hi = bootstrap_mae_ci(data, prob, 500, seed=2)
        assert lo <= point <= hi

    def test_refit_callable(self, questions):
        data, prob = self.make_data(questions)
        reps = bootstrap_mae_replicates(data, lambda d: d.empirical(), 20, seed=0)
        np.testing.assert_allclose(reps, 0.0, atol=1e-15)


class TestResponses:
    def test_round_trip(self, questions, tmp_path):
        data = simulate_responses(questions, {q.question_id: 0.5 for q in questions}, 5, seed=0)
        write_responses(data, tmp_path / "r.csv")
        back = load_responses(tmp_path / "r.csv", questions)
        assert back.records == data.records

    def test_missing_choice_skipped(self, questions, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("respondent_id,task,question_id,choice\nr1,1,Q1-01,\nr1,1,Q1-02,NA\nr1,1,Q1-03,1\n")
        assert len(load_responses(path, questions).records) == 1

    @pytest.mark.parametrize("line", ["r1,1,Q9-99,0", "r1,2,Q1-01,0", "r1,1,Q1-01,2", "r1,1,Q1-01"])
    def test_bad_rows(self, questions, tmp_path, line):
        path = tmp_path / "r.csv"
        path.write_text("respondent_id,task,question_id,choice\n" + line + "\n")
        with pytest.raises(DataFormatError, match=":2"):
            load_responses(path, questions)

    def test_counts_and_empirical(self, questions):
        data = ResponseDataset(
            [Response("a", 1, "Q1-01", 0), Response("b", 1, "Q1-01", 1), Response("c", 1, "Q1-01", 0)],
            questions,
        )
        assert data.counts()["Q1-01"] == (2, 3)
        assert data.empirical()["Q1-01"] == pytest.approx(2 / 3)

    def test_mae_requires_same_questions(self):
        with pytest.raises(ValueError):
            mean_absolute_error({"a": 0.1}, {"b": 0.2})
