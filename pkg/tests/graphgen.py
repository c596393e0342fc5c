"""Random small-graph generator and the query sweep used for oracle
equivalence: every read operation is run on the engine (with inert
truncation) and on the exhaustive evaluator, and results must match exactly.
"""

from __future__ import annotations

import random

import oracle
from conftest import (
    account_props,
    company_props,
    loan_props,
    medium_props,
    person_props,
    plain_fixture,
    transfer_attrs,
)
from fintxn.core import TruncationOrder, TruncationSpec
from fintxn.workloads import queries as q

INERT = TruncationSpec(10**6, TruncationOrder.TIMESTAMP_DESCENDING)

WINDOWS = ((0, 1000), (250, 750))


def random_fixture(rng: random.Random):
    """A schema-valid fixture with at most 30 vertices and 120 edges."""
    n_person = rng.randint(1, 6)
    n_company = rng.randint(1, 4)
    n_medium = rng.randint(1, 3)
    n_account = rng.randint(2, 12)
    n_loan = rng.randint(0, 4)

    vertices = []
    for i in range(1, n_person + 1):
        vertices.append(("Person", i, person_props(f"P{i}", blocked=rng.random() < 0.2)))
    for i in range(1, n_company + 1):
        vertices.append(("Company", i, company_props(f"C{i}")))
    for i in range(1, n_medium + 1):
        vertices.append(("Medium", i, medium_props("IP", blocked=rng.random() < 0.4)))
    for i in range(1, n_account + 1):
        acct_type = "card" if rng.random() < 0.3 else "normal"
        vertices.append(("Account", i, account_props(acct_type, blocked=rng.random() < 0.25)))
    for i in range(1, n_loan + 1):
        amount = rng.randint(1, 5000) * 100
        vertices.append(("Loan", i, loan_props(amount, rng.randint(0, amount))))

    edges = []
    for i in range(1, n_account + 1):
        if rng.random() < 0.5 or n_company == 0:
            edges.append(("own", "Person", rng.randint(1, n_person), "Account", i, rng.randint(1, 5), 0, None))
        else:
            edges.append(("own", "Company", rng.randint(1, n_company), "Account", i, rng.randint(1, 5), 0, None))
    for i in range(1, n_loan + 1):
        kind = "Person" if rng.random() < 0.7 else "Company"
        owner = rng.randint(1, n_person if kind == "Person" else n_company)
        edges.append(("apply", kind, owner, "Loan", i, rng.randint(1, 999), 0, {"organization": "b"}))

    invest_pairs = set()
    n_extra = rng.randint(10, 120 - len(edges))
    for j in range(n_extra):
        ts = rng.randint(1, 999)
        amt = rng.randint(1, 99999)
        roll = rng.random()
        if roll < 0.5:
            edges.append(("transfer", "Account", rng.randint(1, n_account),
                          "Account", rng.randint(1, n_account), ts, amt, transfer_attrs(j)))
        elif roll < 0.62:
            edges.append(("withdraw", "Account", rng.randint(1, n_account),
                          "Account", rng.randint(1, n_account), ts, amt, None))
        elif roll < 0.72 and n_loan:
            edges.append(("deposit", "Loan", rng.randint(1, n_loan),
                          "Account", rng.randint(1, n_account), ts, amt, None))
        elif roll < 0.82 and n_loan:
            edges.append(("repay", "Account", rng.randint(1, n_account),
                          "Loan", rng.randint(1, n_loan), ts, amt, None))
        elif roll < 0.9:
            edges.append(("signIn", "Medium", rng.randint(1, n_medium),
                          "Account", rng.randint(1, n_account), ts, 0, {"location": "x"}))
        elif roll < 0.96:
            src = rng.randint(1, n_person)
            dst = rng.randint(1, n_company)
            if ("Person", src, dst) not in invest_pairs:
                invest_pairs.add(("Person", src, dst))
                edges.append(("invest", "Person", src, "Company", dst, ts, 0, {"ratio": 0.5}))
        else:
            kind = "Person" if rng.random() < 0.7 else "Company"
            n = n_person if kind == "Person" else n_company
            edges.append(("guarantee", kind, rng.randint(1, n), kind, rng.randint(1, n),
                          ts, 0, {"relationship": "r"}))
    return vertices, edges


def sweep(engine, vertices, edges, rng: random.Random) -> int:
    """Run every read operation over both sides; return the comparison count."""
    plain = plain_fixture(vertices, edges)
    accounts = sorted(i for k, i, _ in vertices if k == "Account")
    persons = sorted(i for k, i, _ in vertices if k == "Person")
    loans = sorted(i for k, i, _ in vertices if k == "Loan")
    amounts = sorted(e[6] for e in edges if e[6]) or [0]
    thresholds = (0, amounts[len(amounts) // 2])
    txn = engine.begin()
    checked = 0

    def eq(kind, got, want, params):
        nonlocal checked
        assert got == want, f"{kind}{params}: engine={got!r} oracle={want!r}"
        checked += 1

    try:
        for w in WINDOWS:
            for a in accounts:
                eq("tcr1", q.tcr1(engine, txn, a, *w, INERT), oracle.tcr1(plain, a, *w), (a, w))
                for th in thresholds:
                    eq("tcr6", q.tcr6(engine, txn, a, th, th, *w, INERT),
                       oracle.tcr6(plain, a, th, th, *w), (a, th, w))
                    eq("tcr7", q.tcr7(engine, txn, a, th, *w, INERT),
                       oracle.tcr7(plain, a, th, *w), (a, th, w))
                    eq("tcr9", q.tcr9(engine, txn, a, th, *w, INERT),
                       oracle.tcr9(plain, a, th, *w), (a, th, w))
                    eq("tsr3", q.tsr3(engine, txn, a, th, *w), oracle.tsr3(plain, a, th, *w), (a, th, w))
                    eq("tsr4", q.tsr4(engine, txn, a, th, *w), oracle.tsr4(plain, a, th, *w), (a, th, w))
                    eq("tsr5", q.tsr5(engine, txn, a, th, *w), oracle.tsr5(plain, a, th, *w), (a, th, w))
                eq("tsr1", q.tsr1(engine, txn, a), oracle.tsr1(plain, a), (a,))
                eq("tsr2", q.tsr2(engine, txn, a, *w), oracle.tsr2(plain, a, *w), (a, w))
                eq("tsr6", q.tsr6(engine, txn, a, *w), oracle.tsr6(plain, a, *w), (a, w))
                b = rng.choice(accounts)
                eq("tcr3", q.tcr3(engine, txn, a, b, *w), oracle.tcr3(plain, a, b, *w), (a, b, w))
                eq("tcr4", q.tcr4(engine, txn, a, b, *w), oracle.tcr4(plain, a, b, *w), (a, b, w))
            for p in persons:
                eq("tcr2", q.tcr2(engine, txn, p, *w, INERT), oracle.tcr2(plain, p, *w), (p, w))
                eq("tcr5", q.tcr5(engine, txn, p, *w, INERT), oracle.tcr5(plain, p, *w), (p, w))
                eq("tcr11", q.tcr11(engine, txn, p, *w, INERT), oracle.tcr11(plain, p, *w), (p, w))
                eq("tcr12", q.tcr12(engine, txn, p, *w, INERT), oracle.tcr12(plain, p, *w), (p, w))
                p2 = rng.choice(persons)
                eq("tcr10", q.tcr10(engine, txn, p, p2, *w), oracle.tcr10(plain, p, p2, *w), (p, p2, w))
            for loan in loans:
                for factor in (0.0, 0.05, 1.5):
                    eq("tcr8", q.tcr8(engine, txn, loan, factor, *w, INERT),
                       oracle.tcr8(plain, loan, factor, *w), (loan, factor, w))
    finally:
        engine.abort(txn)
    return checked
