import pytest
from fastapi.testclient import TestClient
from fastapi_pagination import add_pagination
from fractions import Fraction
from sqlalchemy import create_engine
from sqlalchemy.pool import StaticPool
from sqlalchemy.orm import sessionmaker
import os
import sys

# Ensure project root is on PYTHONPATH so `app` package imports work when running pytest
_root = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
if _root not in sys.path:
    sys.path.insert(0, _root)

from app.main import app
from app.config import EngineSettings, get_settings
from app.db.database import Base, get_db
from app.engine.plmap import PLMap

# Use in-memory SQLite for tests
SQLALCHEMY_DATABASE_URL = "sqlite:///:memory:"
engine = create_engine(
    SQLALCHEMY_DATABASE_URL,
    connect_args={"check_same_thread": False},
    poolclass=StaticPool,
)
TestingSessionLocal = sessionmaker(bind=engine)

# small plans keep the endpoint tests fast; verification is still exact
TEST_SETTINGS = EngineSettings(samples=64, max_iterations=20000)


@pytest.fixture
def test_db():
    """Create test database and tables"""
    Base.metadata.create_all(bind=engine)
    yield
    Base.metadata.drop_all(bind=engine)


@pytest.fixture
def db_session(test_db):
    """Get database session for tests"""
    db = TestingSessionLocal()
    try:
        yield db
    finally:
        db.close()


@pytest.fixture
def client(test_db):
    """Get TestClient with overridden database and settings dependencies and pagination"""
    def override_get_db():
        try:
            db = TestingSessionLocal()
            yield db
        finally:
            db.close()

    app.dependency_overrides[get_db] = override_get_db
    app.dependency_overrides[get_settings] = lambda: TEST_SETTINGS
    add_pagination(app)
    yield TestClient(app)
    app.dependency_overrides.clear()


@pytest.fixture
def sawtooth():
    """x -> x/2 on [0,1/2], fixed only at 0 and below the diagonal elsewhere"""
    return PLMap(1, [(0, 0), (Fraction(1, 2), Fraction(1, 4))])


@pytest.fixture
def two_point_map():
    """Fixed points 0 and 1/2, above the diagonal on (0,1/2), below on (1/2,1)"""
    return PLMap(1, [(0, 0), (Fraction(1, 4), Fraction(3, 8)), (Fraction(1, 2), Fraction(1, 2)),
                     (Fraction(3, 4), Fraction(5, 8))])


@pytest.fixture
def rotation_third():
    return PLMap.rotation(Fraction(1, 3))


@pytest.fixture
def settings():
    return TEST_SETTINGS
