"""SQLAlchemy models of stored suite runs."""

import datetime
import logging

import sqlalchemy
from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import declarative_base, declared_attr, relationship
from sqlalchemy_utils import create_database, database_exists

Base = declarative_base()
logger = logging.getLogger(__name__)


def reset_tables(engine: sqlalchemy.engine.Engine, force_new_db: bool = False) -> None:
    """Create the database and its tables if missing.

    Parameters
    ----------
    engine: sqlalchemy.engine.Engine
        Engine of the results store.
    force_new_db: bool
        True drops existing tables first.
    """
    if not database_exists(engine.url):
        create_database(engine.url)

    if force_new_db:
        Base.metadata.drop_all(bind=engine)
    Base.metadata.create_all(bind=engine, checkfirst=True)


class MasterModel(object):
    """Parent class of all models, table name derived from the class name."""

    @declared_attr
    def __tablename__(self):
        """Return name of class table."""
        return self.__name__.lower()

    id = Column(Integer, primary_key=True)

    def to_dict(self) -> dict:
        """Return column values as dictionary."""
        data_dict = {c.name: getattr(self, c.name) for c in self.__table__.columns if c.name != "id"}
        for k, v in data_dict.items():
            if isinstance(v, datetime.datetime):
                data_dict[k] = v.strftime("%Y-%m-%d %H:%M:%S")
        return data_dict


class SuiteRun(Base, MasterModel):
    """One executed suite."""

    name = Column(String(255))
    created = Column(DateTime, default=datetime.datetime.utcnow)
    seed = Column(Integer)
    samples = Column(Integer)
    depth = Column(Integer)
    cases = Column(Integer)
    cross_check_failures = Column(Integer)

    results = relationship("CaseResult", back_populates="suite_run", cascade="all, delete-orphan")


class CaseResult(Base, MasterModel):
    """Result record of one case of a suite run."""

    __tablename__ = "case_result"

    name = Column(String(255))
    matrix = Column(Text)
    digits = Column(Text)
    yields = Column(Boolean, nullable=True)
    beta = Column(Integer, nullable=True)
    mean_multiplicity = Column(Float, nullable=True)
    interior = Column(String(32), nullable=True)
    mra_verdict = Column(Boolean, nullable=True)
    cross_check = Column(Boolean, nullable=True)
    error = Column(Text, nullable=True)
    report = Column(Text)

    suite_run__id = Column(Integer, ForeignKey("suiterun.id"), index=True)
    suite_run = relationship("SuiteRun", back_populates="results")
