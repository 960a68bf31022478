import hypothesis
import pytest

from pdvar import datasets

hypothesis.settings.register_profile("fast", max_examples=25)
hypothesis.settings.register_profile("thorough", max_examples=400)


@pytest.fixture
def fixture_corpus():
    """The embedded 11-row turnover-band corpus."""
    return datasets.turnover_band_fines()


@pytest.fixture
def fixture_corpus_path(tmp_path):
    path = tmp_path / "fines.csv"
    path.write_text(datasets.TURNOVER_BAND_FINES_CSV, encoding="utf-8")
    return path
