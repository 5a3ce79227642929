import pytest

from rescurve.ingest import build_all


@pytest.fixture(scope="session")
def db():
    """Full envelope database, built once for the whole suite."""
    return build_all()
