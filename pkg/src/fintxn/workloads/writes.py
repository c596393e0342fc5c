"""Write operations tw1..tw19: vertex/edge inserts, cascade delete, blocking.

Each operation runs inside a caller-provided transaction. Vertex-creating
operations only carry the card's parameters, so the remaining mandatory
attributes are filled with fixed placeholder values (creation time comes
from the operation's time parameter where one exists).
"""

from __future__ import annotations

from typing import Callable

from ..engine import Engine, Transaction
from ..engine.schema import ACCOUNT, COMPANY, LOAN, MEDIUM, PERSON
from ..errors import SchemaError


def _person_defaults(name: str, blocked: bool, create: int = 0) -> dict:
    return {
        "name": name,
        "isBlocked": blocked,
        "createTime": create,
        "gender": "unknown",
        "birthday": "1970-01-01",
        "country": "n/a",
        "city": "n/a",
    }


def _company_defaults(name: str, blocked: bool, create: int = 0) -> dict:
    return {
        "name": name,
        "isBlocked": blocked,
        "createTime": create,
        "country": "n/a",
        "city": "n/a",
        "business": "n/a",
        "description": "",
        "url": "",
    }


def _account_defaults(create: int, blocked: bool, acct_type: str) -> dict:
    return {
        "createTime": create,
        "isBlocked": blocked,
        "type": acct_type,
        "nickname": "",
        "phoneNumber": "",
        "email": "",
        "freqLoginType": "app",
        "lastLoginTime": create,
        "accountLevel": "standard",
    }


def _medium_defaults(mtype: str, blocked: bool, create: int = 0) -> dict:
    return {
        "type": mtype,
        "createTime": create,
        "isBlocked": blocked,
        "lastLoginTime": create,
        "riskLevel": "low",
    }


def _loan_defaults(amount: int, balance: int) -> dict:
    return {"loanAmount": amount, "balance": balance, "usage": "n/a", "interestRate": 0.0}


def tw1(engine, txn, person_id: int, person_name: str, is_blocked: bool):
    engine.insert_vertex(txn, PERSON, person_id, _person_defaults(person_name, is_blocked))


def tw2(engine, txn, company_id: int, company_name: str, is_blocked: bool):
    engine.insert_vertex(txn, COMPANY, company_id, _company_defaults(company_name, is_blocked))


def tw3(engine, txn, medium_id: int, medium_type: str, is_blocked: bool):
    engine.insert_vertex(txn, MEDIUM, medium_id, _medium_defaults(medium_type, is_blocked))


def tw4(engine, txn, person_id, account_id, time, account_blocked, account_type):
    engine.insert_vertex(txn, ACCOUNT, account_id, _account_defaults(time, account_blocked, account_type))
    engine.insert_edge(txn, "own", PERSON, person_id, ACCOUNT, account_id, time)


def tw5(engine, txn, company_id, account_id, time, account_blocked, account_type):
    engine.insert_vertex(txn, ACCOUNT, account_id, _account_defaults(time, account_blocked, account_type))
    engine.insert_edge(txn, "own", COMPANY, company_id, ACCOUNT, account_id, time)


def tw6(engine, txn, person_id, loan_id, loan_amount, balance, time):
    engine.insert_vertex(txn, LOAN, loan_id, _loan_defaults(loan_amount, balance))
    engine.insert_edge(txn, "apply", PERSON, person_id, LOAN, loan_id, time, 0, {"organization": "n/a"})


def tw7(engine, txn, company_id, loan_id, loan_amount, balance, time):
    engine.insert_vertex(txn, LOAN, loan_id, _loan_defaults(loan_amount, balance))
    engine.insert_edge(txn, "apply", COMPANY, company_id, LOAN, loan_id, time, 0, {"organization": "n/a"})


def tw8(engine, txn, person_id, company_id, time, ratio):
    engine.insert_edge(txn, "invest", PERSON, person_id, COMPANY, company_id, time, 0, {"ratio": ratio})


def tw9(engine, txn, company_id1, company_id2, time, ratio):
    engine.insert_edge(txn, "invest", COMPANY, company_id1, COMPANY, company_id2, time, 0, {"ratio": ratio})


def tw10(engine, txn, person_id1, person_id2, time):
    engine.insert_edge(txn, "guarantee", PERSON, person_id1, PERSON, person_id2, time, 0,
                       {"relationship": "n/a"})


def tw11(engine, txn, company_id1, company_id2, time):
    engine.insert_edge(txn, "guarantee", COMPANY, company_id1, COMPANY, company_id2, time, 0,
                       {"relationship": "n/a"})


def tw12(engine, txn, account_id1, account_id2, time, amount):
    engine.insert_edge(txn, "transfer", ACCOUNT, account_id1, ACCOUNT, account_id2, time, amount,
                       {"ordernumber": "", "comment": "", "payType": "", "goodsType": ""})


def tw13(engine, txn, account_id1, account_id2, time, amount):
    if engine.read_prop(txn, ACCOUNT, account_id2, "type") != "card":
        raise SchemaError(f"withdraw destination {account_id2} is not a card account")
    engine.insert_edge(txn, "withdraw", ACCOUNT, account_id1, ACCOUNT, account_id2, time, amount)


def tw14(engine, txn, account_id, loan_id, time, amount):
    engine.insert_edge(txn, "repay", ACCOUNT, account_id, LOAN, loan_id, time, amount)


def tw15(engine, txn, loan_id, account_id, time, amount):
    engine.insert_edge(txn, "deposit", LOAN, loan_id, ACCOUNT, account_id, time, amount)


def tw16(engine, txn, medium_id, account_id, time):
    engine.insert_edge(txn, "signIn", MEDIUM, medium_id, ACCOUNT, account_id, time, 0,
                       {"location": "n/a"})


def tw17(engine, txn, account_id):
    return engine.delete_vertex_cascade(txn, ACCOUNT, account_id)


def tw18(engine, txn, account_id):
    engine.update_property(txn, ACCOUNT, account_id, "isBlocked", True)


def tw19(engine, txn, person_id):
    engine.update_property(txn, PERSON, person_id, "isBlocked", True)


# Parameter type tags drive the update-stream (de)serialization:
# id/int plain integers, str text, bool true/false, millis canonical
# datetimes, cents two-decimal amounts, ratio a 4-decimal float.
WRITE_SPECS: dict[str, tuple[Callable, tuple[tuple[str, str], ...]]] = {
    "tw1": (tw1, (("personId", "id"), ("personName", "str"), ("isBlocked", "bool"))),
    "tw2": (tw2, (("companyId", "id"), ("companyName", "str"), ("isBlocked", "bool"))),
    "tw3": (tw3, (("mediumId", "id"), ("mediumType", "str"), ("isBlocked", "bool"))),
    "tw4": (tw4, (("personId", "id"), ("accountId", "id"), ("time", "millis"),
                  ("accountBlocked", "bool"), ("accountType", "str"))),
    "tw5": (tw5, (("companyId", "id"), ("accountId", "id"), ("time", "millis"),
                  ("accountBlocked", "bool"), ("accountType", "str"))),
    "tw6": (tw6, (("personId", "id"), ("loanId", "id"), ("loanAmount", "cents"),
                  ("balance", "cents"), ("time", "millis"))),
    "tw7": (tw7, (("companyId", "id"), ("loanId", "id"), ("loanAmount", "cents"),
                  ("balance", "cents"), ("time", "millis"))),
    "tw8": (tw8, (("personId", "id"), ("companyId", "id"), ("time", "millis"), ("ratio", "ratio"))),
    "tw9": (tw9, (("companyId1", "id"), ("companyId2", "id"), ("time", "millis"), ("ratio", "ratio"))),
    "tw10": (tw10, (("personId1", "id"), ("personId2", "id"), ("time", "millis"))),
    "tw11": (tw11, (("companyId1", "id"), ("companyId2", "id"), ("time", "millis"))),
    "tw12": (tw12, (("accountId1", "id"), ("accountId2", "id"), ("time", "millis"), ("amount", "cents"))),
    "tw13": (tw13, (("accountId1", "id"), ("accountId2", "id"), ("time", "millis"), ("amount", "cents"))),
    "tw14": (tw14, (("accountId", "id"), ("loanId", "id"), ("time", "millis"), ("amount", "cents"))),
    "tw15": (tw15, (("loanId", "id"), ("accountId", "id"), ("time", "millis"), ("amount", "cents"))),
    "tw16": (tw16, (("mediumId", "id"), ("accountId", "id"), ("time", "millis"))),
    "tw17": (tw17, (("accountId", "id"),)),
    "tw18": (tw18, (("accountId", "id"),)),
    "tw19": (tw19, (("personId", "id"),)),
}


def apply_write(engine: Engine, txn: Transaction, kind: str, params: tuple):
    """Dispatch one write operation; params are positional per WRITE_SPECS."""
    fn, spec = WRITE_SPECS[kind]
    if len(params) != len(spec):
        raise ValueError(f"{kind} expects {len(spec)} parameters, got {len(params)}")
    return fn(engine, txn, *params)
