"""Shared fixtures: the reference graph FX used across the workload tests
(persons P1/P2, company C1, accounts A1..A4, media M1/M2, loans L1/L2), and
builders that materialize any declarative fixture into both the engine and
the oracle's plain graph so the two sides never share evaluation code.
"""

from __future__ import annotations

import pytest

from fintxn.engine import Engine, IsolationLevel


def person_props(name="P", blocked=False, create=0):
    return {
        "name": name,
        "isBlocked": blocked,
        "createTime": create,
        "gender": "female",
        "birthday": "1990-01-01",
        "country": "CH",
        "city": "Zurich",
    }


def company_props(name="C", blocked=False, create=0):
    return {
        "name": name,
        "isBlocked": blocked,
        "createTime": create,
        "country": "CH",
        "city": "Zug",
        "business": "trade",
        "description": "d",
        "url": "https://example.test",
    }


def account_props(acct_type="normal", blocked=False, create=1):
    return {
        "createTime": create,
        "isBlocked": blocked,
        "type": acct_type,
        "nickname": "nick",
        "phoneNumber": "000",
        "email": "a@example.test",
        "freqLoginType": "app",
        "lastLoginTime": create,
        "accountLevel": "gold",
    }


def medium_props(mtype="IP", blocked=False, create=0):
    return {
        "type": mtype,
        "createTime": create,
        "isBlocked": blocked,
        "lastLoginTime": create,
        "riskLevel": "low",
    }


def loan_props(amount_cents, balance_cents):
    return {
        "loanAmount": amount_cents,
        "balance": balance_cents,
        "usage": "consume",
        "interestRate": 0.03,
    }


def transfer_attrs(n=0):
    return {"ordernumber": f"ORD{n}", "comment": "c", "payType": "wire", "goodsType": "misc"}


# (kind, id, props)
FX_VERTICES = [
    ("Person", 1, person_props("P1")),
    ("Person", 2, person_props("P2")),
    ("Company", 1, company_props("C1")),
    ("Account", 1, account_props("normal", create=1)),
    ("Account", 2, account_props("normal", create=2)),
    ("Account", 3, account_props("company", create=3)),
    ("Account", 4, account_props("card", create=4)),
    ("Medium", 1, medium_props("IP", blocked=True)),
    ("Medium", 2, medium_props("MAC", blocked=False)),
    ("Loan", 1, loan_props(100_000, 40_000)),
    ("Loan", 2, loan_props(50_000, 25_000)),
]

# (ekind, src_kind, src, dst_kind, dst, ts, amount_cents, attrs)
FX_EDGES = [
    ("own", "Person", 1, "Account", 1, 1, 0, None),
    ("own", "Person", 2, "Account", 2, 2, 0, None),
    ("own", "Company", 1, "Account", 3, 3, 0, None),
    ("own", "Person", 1, "Account", 4, 4, 0, None),
    ("apply", "Person", 2, "Loan", 1, 4, 0, {"organization": "bank"}),
    ("apply", "Person", 1, "Loan", 2, 3, 0, {"organization": "bank"}),
    ("signIn", "Medium", 1, "Account", 2, 90, 0, {"location": "zrh"}),
    ("signIn", "Medium", 2, "Account", 3, 95, 0, {"location": "zrh"}),
    ("transfer", "Account", 1, "Account", 2, 10, 10_000, transfer_attrs(1)),
    ("transfer", "Account", 2, "Account", 3, 20, 5_000, transfer_attrs(2)),
    ("transfer", "Account", 3, "Account", 1, 30, 3_000, transfer_attrs(3)),
    ("transfer", "Account", 1, "Account", 3, 40, 2_000, transfer_attrs(4)),
    ("withdraw", "Account", 3, "Account", 4, 50, 6_000, None),
    ("deposit", "Loan", 1, "Account", 2, 5, 40_000, None),
    ("deposit", "Loan", 2, "Account", 1, 3, 50_000, None),
    ("repay", "Account", 2, "Loan", 1, 60, 10_000, None),
    ("guarantee", "Person", 1, "Person", 2, 15, 0, {"relationship": "friend"}),
    ("invest", "Person", 1, "Company", 1, 8, 0, {"ratio": 0.3}),
    ("invest", "Person", 2, "Company", 1, 9, 0, {"ratio": 0.7}),
]


def load_fixture(engine: Engine, vertices, edges) -> None:
    t = engine.begin()
    for kind, vid, props in vertices:
        engine.insert_vertex(t, kind, vid, props)
    for ekind, sk, src, dk, dst, ts, amt, attrs in edges:
        engine.insert_edge(t, ekind, sk, src, dk, dst, ts, amt, attrs)
    engine.commit(t)


def plain_fixture(vertices, edges):
    from oracle import PEdge, PlainGraph

    g = PlainGraph()
    for kind, vid, props in vertices:
        g.vertices[(kind, vid)] = dict(props)
    for ekind, sk, src, dk, dst, ts, amt, attrs in edges:
        g.edges.append(PEdge(ekind, sk, src, dk, dst, ts, amt, attrs))
    return g


def build_fx(engine: Engine) -> None:
    load_fixture(engine, FX_VERTICES, FX_EDGES)


@pytest.fixture
def fx_engine():
    engine = Engine(IsolationLevel.SERIALIZABLE)
    build_fx(engine)
    yield engine
    engine.close()


@pytest.fixture
def fx_plain():
    return plain_fixture(FX_VERTICES, FX_EDGES)
