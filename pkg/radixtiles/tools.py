"""General methods used by radixtiles modules."""
import json
from typing import Any, Optional

from sqlalchemy import create_engine
from sqlalchemy.engine.base import Engine
from sqlalchemy.orm import Session, sessionmaker

from radixtiles.config import get_connection_string


def _get_engine(connection_string: Optional[str] = None) -> Engine:
    """Get SQLAlchemy engine."""
    return create_engine(connection_string or get_connection_string())


def get_session(connection_string: Optional[str] = None) -> Session:
    """Return session object."""
    return sessionmaker(bind=_get_engine(connection_string))()


def _default(obj: Any):
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(data: Any) -> str:
    """Serialize a report to deterministic JSON; objects with ``to_json`` serialize themselves."""
    return json.dumps(data, indent=2, sort_keys=False, default=_default, allow_nan=True)
