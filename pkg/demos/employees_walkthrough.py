"""Walk the ten-employee example end to end.

Loads the small relation inline, asks for three completions of a
two-column projection, prints the fitted tree, and re-checks that the
three sub-queries really partition the original answer.

Run:  python3 demos/employees_walkthrough.py
"""

import qcomplete as qc

EMPLOYEES_CSV = """\
EmpNo,LastName,Gender,Salary,Commission
e10,SPEN,F,41160,1300
e20,THOMP,M,41250,7400
e30,KWAN,F,39850,5200
e40,SMITH,F,40525,1400
e50,GEYER,M,40175,1100
e60,STERN,M,39560,6200
e70,PULASKI,F,40120,800
e80,FREY,M,40625,6600
e90,HENDER,F,39450,6700
e100,SPEN,M,41560,900
"""

QUERY = "SELECT Gender, Salary FROM Employees"


def main() -> None:
    store = qc.RelationStore()
    store.register("Employees", qc.relation_from_csv(EMPLOYEES_CSV))
    db = store.snapshot()

    rs = qc.evaluate(qc.parse(QUERY), db)
    print(f"original query: {QUERY}")
    print(f"answer set: {rs.row_count} rows\n")

    cfg = qc.EngineConfig(k=3, seed=80, debug_tree=True)
    cs = qc.complete(QUERY, cfg, db)

    print("fitted tree:")
    print(cs.diagnostics["tree_dump"])
    print(f"\ncompletions (k={cs.k_requested}, delivered {cs.k_delivered}):")
    for i, comp in enumerate(cs.completions, start=1):
        print(f"  [{i}] ({comp.row_count} rows) {comp.rendered}")

    report = qc.verify(cs, db)
    print(f"\nprefix containment: {report.each_is_completion}")
    print(f"pairwise disjoint:  {report.pairwise_disjoint}")
    print(f"covers original:    {report.covers_original}")
    print(f"partition: {'OK' if report.ok else 'FAILED'}")


if __name__ == "__main__":
    main()
