from pathlib import Path

import numpy as np
import pytest

from identity_labeling import (
    ActContext,
    CoefficientModel,
    load_coefficients,
    load_epa_dictionary,
    load_handcoded_betas,
    load_modifier_coefficients,
    load_name_epa,
    load_vignettes,
)

ILLUSTRATIVE = Path(__file__).resolve().parents[1] / "src" / "identity_labeling" / "data" / "illustrative"


@pytest.fixture(scope="session")
def illustrative_dir():
    return ILLUSTRATIVE


@pytest.fixture(scope="session")
def act_context():
    return ActContext(
        dictionary=load_epa_dictionary(ILLUSTRATIVE / "dictionary.csv"),
        impression=load_coefficients(ILLUSTRATIVE / "impression.coef"),
        modifier=load_modifier_coefficients(ILLUSTRATIVE / "modifier.coef"),
        names=load_name_epa(ILLUSTRATIVE / "names.csv"),
    )


@pytest.fixture(scope="session")
def questions():
    return load_vignettes()


@pytest.fixture(scope="session")
def betas():
    return load_handcoded_betas()


def random_event_model(rng, n_terms=None):
    """Coefficient model with random constant, linear and interaction terms."""
    terms = [()] + [(i,) for i in range(9)]
    n_extra = rng.integers(0, 6) if n_terms is None else n_terms
    for _ in range(n_extra):
        size = rng.integers(2, 4)
        terms.append(tuple(sorted(rng.integers(0, 9, size).tolist())))
    coef = rng.normal(0, 0.5, (9, len(terms)))
    return CoefficientModel(tuple(terms), coef)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_term_model(rng, n):
    """Self-map on ``n`` slots with linear terms and a few interactions."""
    from identity_labeling.affect import TermModel

    terms = [()] + [(i,) for i in range(n)]
    for _ in range(int(rng.integers(0, 3))):
        terms.append(tuple(sorted(rng.integers(0, n, 2).tolist())))
    return TermModel(tuple(terms), rng.normal(0, 0.5, (n, len(terms))), n)


def random_block_instance(rng, n_traits, n_assoc):
    from identity_labeling.lcss import BlockCoefficientModel, ExtendedFundamental

    model = BlockCoefficientModel(
        random_event_model(rng, 3),
        random_term_model(rng, 2 * n_traits) if n_traits else None,
        random_term_model(rng, 2 * n_assoc) if n_assoc else None,
    )
    f_star = ExtendedFundamental(
        rng.normal(size=9), rng.normal(size=2 * n_traits), rng.normal(size=2 * n_assoc)
    )
    return model, f_star


# One summary line per acceptance criterion, printed after the run.
_ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(key, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        key, title = marker.args
        line = f"{status}  [{key}] {title}"
        if rep.skipped:
            line += f" ({rep.longrepr[2].removeprefix('Skipped: ')})"
        _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
