from pathlib import Path

import pytest

import qcomplete as qc

DATA_DIR = Path(__file__).parent / "data"

# Cluster ids for the employees fixture, one per CSV row in order.
# Pinned by hand: high commission (1), low-commission women (2),
# low-commission men (3).
EMPLOYEE_LABELS = [2, 1, 2, 2, 3, 1, 2, 1, 1, 3]


@pytest.fixture(scope="session")
def employees_csv() -> str:
    return (DATA_DIR / "employees.csv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def employees(employees_csv) -> qc.Relation:
    return qc.relation_from_csv(employees_csv)


@pytest.fixture()
def employees_db(employees) -> qc.DatabaseSnapshot:
    store = qc.RelationStore()
    store.register("Employees", employees)
    return store.snapshot()
