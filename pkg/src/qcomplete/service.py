"""HTTP/JSON face of the engine.

Four endpoints: POST /datasets (upload or replace a relation), POST
/query (evaluate), POST /complete (the whole pipeline), GET /schema.
Every response is either a 2xx documented shape or an ``ApiError``
body ``{code, message, detail?}`` with a code from the closed set
below.  All JSON field names are snake_case.  Completions run
synchronously under a server-side timeout (default 30 s -> 504).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ValidationError as PydanticValidationError

from . import errors
from .engine import Completion, CompletionSet, EngineConfig, complete
from .evaluate import evaluate
from .features import FeatureConfig
from .sqlmodel import Atom, ColumnRef, SqlValue, parse, render_atom
from .store import RelationStore, relation_from_csv

API_ERROR_CODES = frozenset({
    "PARSE_ERROR", "UNSUPPORTED_CONSTRUCT", "EMPTY_CONJUNCTION",
    "VALIDATION_ERROR", "UNKNOWN_TABLE", "UNKNOWN_COLUMN",
    "AMBIGUOUS_COLUMN", "TYPE_MISMATCH",
    "CSV_ERROR", "RAGGED_ROW", "DUPLICATE_HEADER", "VALUE_PARSE_ERROR",
    "SCHEMA_MISMATCH",
    "EMPTY_WORKING_DATA", "NO_USABLE_FEATURES", "K_OUT_OF_RANGE",
    "BAD_REQUEST", "TIMEOUT", "INTERNAL",
})

# every error code is 400 except these
_STATUS_OVERRIDES = {
    "EMPTY_WORKING_DATA": 422,
    "TIMEOUT": 504,
    "INTERNAL": 500,
}

DEFAULT_TIMEOUT = 30.0


def _error_response(code: str, message: str, detail=None) -> JSONResponse:
    assert code in API_ERROR_CODES, f"undeclared error code {code}"
    body = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=_STATUS_OVERRIDES.get(code, 400), content=body)


class DatasetUpload(BaseModel):
    name: str
    csv: str


class QueryRequest(BaseModel):
    sql: str
    max_rows: int | None = None


class CompleteConfig(BaseModel):
    max_rows: int | None = None
    encode_categoricals: bool | None = None
    max_categorical_cardinality: int | None = None
    drop_high_cardinality_text: bool | None = None
    kmeans_max_iter: int | None = None
    kmeans_tol: float | None = None


class CompleteRequest(BaseModel):
    sql: str
    k: int
    seed: int = 0
    config: CompleteConfig | None = None


def _atom_json(atom: Atom) -> dict:
    value = None
    if isinstance(atom.rhs, SqlValue):
        value = atom.rhs.payload()
    elif isinstance(atom.rhs, ColumnRef):
        value = str(atom.rhs)
    return {
        "column": str(atom.lhs),
        "op": atom.op,
        "value": value,
        "or_null": atom.or_null,
        "rendered": render_atom(atom),
    }


def _completion_json(comp: Completion) -> dict:
    return {
        "rendered": comp.rendered,
        "atoms": [_atom_json(a) for a in comp.conjunction.atoms],
        "row_count": comp.row_count,
        "leaf_class": comp.leaf_class,
        "leaf_purity": comp.leaf_purity,
    }


def completion_set_json(cs: CompletionSet) -> dict:
    return {
        "original_sql": cs.original_rendered,
        "k_requested": cs.k_requested,
        "k_delivered": cs.k_delivered,
        "completions": [_completion_json(c) for c in cs.completions],
        "diagnostics": cs.diagnostics,
    }


def _engine_config(req: CompleteRequest) -> EngineConfig:
    raw = req.config.model_dump(exclude_none=True) if req.config else {}
    feature_kwargs = {k: raw.pop(k) for k in list(raw)
                      if k in ("encode_categoricals", "max_categorical_cardinality",
                               "drop_high_cardinality_text")}
    return EngineConfig(k=req.k, seed=req.seed,
                        feature=FeatureConfig(**feature_kwargs), **raw)


def create_app(store: RelationStore | None = None,
               timeout: float = DEFAULT_TIMEOUT) -> FastAPI:
    """Build the application around a relation store.

    Passing a pre-loaded store wires the service to existing data; the
    default starts empty.  ``timeout`` bounds each /complete call.
    """
    store = store if store is not None else RelationStore()
    app = FastAPI(title="qcomplete")
    app.state.store = store
    executor = ThreadPoolExecutor(max_workers=4)

    @app.exception_handler(PydanticValidationError)
    async def pydantic_handler(_req: Request, exc: PydanticValidationError):
        return _error_response("BAD_REQUEST", "malformed request body",
                               detail=[str(e.get("msg")) for e in exc.errors()])

    @app.exception_handler(errors.QcError)
    async def qc_error_handler(_req: Request, exc: errors.QcError):
        return _error_response(exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        return _error_response("BAD_REQUEST", "malformed request body",
                               detail=[str(e.get("msg")) for e in exc.errors()])

    @app.exception_handler(Exception)
    async def fallback_handler(_req: Request, exc: Exception):
        return _error_response("INTERNAL", f"{type(exc).__name__}: {exc}")

    @app.post("/datasets")
    async def upload_dataset(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            payload = DatasetUpload.model_validate_json(await request.body())
            name, csv_text = payload.name, payload.csv
        else:
            # raw CSV body; the relation name rides in the query string
            name = request.query_params.get("name")
            if not name:
                return _error_response("BAD_REQUEST",
                                       "raw CSV uploads need ?name=<relation>")
            csv_text = (await request.body()).decode("utf-8")
        relation = relation_from_csv(csv_text)
        store.register(name, relation)
        return {
            "name": name,
            "rows": relation.row_count,
            "schema": [{"name": c.name, "type": c.type, "nullable": c.nullable}
                       for c in relation.schema],
        }

    @app.post("/query")
    async def run_query(req: QueryRequest):
        db = store.snapshot()
        kwargs = {} if req.max_rows is None else {"max_rows": req.max_rows}
        rs = evaluate(parse(req.sql), db, **kwargs)
        return {
            "columns": [{"table": c.table, "name": c.name,
                         "type": c.schema.type, "nullable": c.schema.nullable}
                        for c in rs.columns],
            "rows": [list(row) for row in rs.rows],
            "truncated": rs.truncated,
        }

    @app.post("/complete")
    async def run_complete(req: CompleteRequest):
        cfg = _engine_config(req)
        db = store.snapshot()
        future = executor.submit(complete, req.sql, cfg, db)
        try:
            cs = future.result(timeout=timeout)
        except FutureTimeoutError:
            future.cancel()
            return _error_response(
                "TIMEOUT", f"completion exceeded {timeout:g}s; "
                "narrow the query or lower max_rows")
        return completion_set_json(cs)

    @app.get("/schema")
    async def get_schema():
        db = store.snapshot()
        return {
            "version": db.version,
            "relations": [
                {
                    "name": name,
                    "row_count": rel.row_count,
                    "columns": [{"name": c.name, "type": c.type, "nullable": c.nullable}
                                for c in rel.schema],
                }
                for name, rel in db.relations.items()
            ],
        }

    return app
