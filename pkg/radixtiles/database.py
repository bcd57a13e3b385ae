"""Methods for interfacing with the RDBMS that keeps suite runs."""
import json
import logging
from typing import Optional

import pandas as pd

from radixtiles.models import CaseResult, SuiteRun, reset_tables
from radixtiles.tools import _get_engine, dumps, get_session

logger = logging.getLogger(__name__)


def store_suite_result(result, connection_string: Optional[str] = None, force_new_db: bool = False) -> int:
    """Persist a SuiteResult and its case records, returns the id of the new run."""
    engine = _get_engine(connection_string)
    reset_tables(engine, force_new_db=force_new_db)
    session = get_session(connection_string)

    run = SuiteRun(
        name=result.name,
        seed=result.seed,
        samples=result.samples,
        depth=result.depth,
        cases=len(result.records),
        cross_check_failures=sum(1 for r in result.records if r.cross_check is False),
    )
    for record in result.records:
        data = record.to_json()
        run.results.append(
            CaseResult(
                name=record.name,
                matrix=json.dumps(data["matrix"]),
                digits=json.dumps(data["digit_set"]["digits"]) if data.get("digit_set") else None,
                yields=record.yields,
                beta=record.beta,
                mean_multiplicity=record.mean_multiplicity,
                interior=record.interior.value if record.interior else None,
                mra_verdict=record.mra_verdict,
                cross_check=record.cross_check,
                error=json.dumps(record.error) if record.error else None,
                report=dumps(data),
            )
        )

    session.add(run)
    session.commit()
    run_id = run.id
    session.close()
    logger.info(f"stored suite run {run_id} with {len(result.records)} cases")
    return run_id


def list_runs(connection_string: Optional[str] = None) -> pd.DataFrame:
    """Return one row per stored suite run, newest first."""
    engine = _get_engine(connection_string)
    reset_tables(engine)
    session = get_session(connection_string)
    rows = [run.to_dict() | {"id": run.id} for run in session.query(SuiteRun).order_by(SuiteRun.id.desc())]
    session.close()
    columns = ["id", "name", "created", "seed", "samples", "depth", "cases", "cross_check_failures"]
    return pd.DataFrame(rows, columns=columns)


def run_results(run_id: int, connection_string: Optional[str] = None) -> pd.DataFrame:
    """Return the case records of one stored run."""
    session = get_session(connection_string)
    rows = [r.to_dict() for r in session.query(CaseResult).filter(CaseResult.suite_run__id == run_id)]
    session.close()
    return pd.DataFrame(rows).drop(columns=["report"], errors="ignore")
