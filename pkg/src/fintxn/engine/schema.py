"""Graph schema: vertex/edge kinds, endpoint rules, attributes, multiplicity."""

from __future__ import annotations

from ..errors import SchemaError

PERSON = "Person"
COMPANY = "Company"
ACCOUNT = "Account"
LOAN = "Loan"
MEDIUM = "Medium"

VERTEX_KINDS = (PERSON, COMPANY, ACCOUNT, LOAN, MEDIUM)

TRANSFER = "transfer"
WITHDRAW = "withdraw"
DEPOSIT = "deposit"
REPAY = "repay"
SIGN_IN = "signIn"
INVEST = "invest"
APPLY = "apply"
GUARANTEE = "guarantee"
OWN = "own"

EDGE_KINDS = (
    TRANSFER,
    WITHDRAW,
    DEPOSIT,
    REPAY,
    SIGN_IN,
    INVEST,
    APPLY,
    GUARANTEE,
    OWN,
)

# Valid (source kind, destination kind) pairs per edge kind.
EDGE_ENDPOINTS: dict[str, frozenset[tuple[str, str]]] = {
    SIGN_IN: frozenset({(MEDIUM, ACCOUNT)}),
    OWN: frozenset({(PERSON, ACCOUNT), (COMPANY, ACCOUNT)}),
    TRANSFER: frozenset({(ACCOUNT, ACCOUNT)}),
    WITHDRAW: frozenset({(ACCOUNT, ACCOUNT)}),
    APPLY: frozenset({(PERSON, LOAN), (COMPANY, LOAN)}),
    DEPOSIT: frozenset({(LOAN, ACCOUNT)}),
    REPAY: frozenset({(ACCOUNT, LOAN)}),
    INVEST: frozenset({(PERSON, COMPANY), (COMPANY, COMPANY)}),
    GUARANTEE: frozenset(
        {(PERSON, PERSON), (PERSON, COMPANY), (COMPANY, PERSON), (COMPANY, COMPANY)}
    ),
}

# Edge kinds admitting at most one edge per ordered (src, dst) pair.
# guarantee is exempt: the guarantee-strategy read-write flow must be able to
# insert over an existing pair and commit.
MULTIPLICITY_ONE = frozenset({OWN, INVEST, APPLY})

# Edge kinds whose destination may carry at most one in-edge of that kind:
# every Account has exactly one owner, every Loan exactly one applicant.
UNIQUE_IN_EDGE = frozenset({OWN, APPLY})

# Edge kinds that carry a money amount (stored as integer cents).
AMOUNT_EDGE_KINDS = frozenset({TRANSFER, WITHDRAW, DEPOSIT, REPAY})

# Mandatory vertex attributes, beyond the id. Amount-valued attributes are
# integer cents; *Time attributes are epoch milliseconds.
VERTEX_ATTRIBUTES: dict[str, tuple[str, ...]] = {
    PERSON: ("name", "isBlocked", "createTime", "gender", "birthday", "country", "city"),
    COMPANY: (
        "name",
        "isBlocked",
        "createTime",
        "country",
        "city",
        "business",
        "description",
        "url",
    ),
    ACCOUNT: (
        "createTime",
        "isBlocked",
        "type",
        "nickname",
        "phoneNumber",
        "email",
        "freqLoginType",
        "lastLoginTime",
        "accountLevel",
    ),
    LOAN: ("loanAmount", "balance", "usage", "interestRate"),
    MEDIUM: ("type", "createTime", "isBlocked", "lastLoginTime", "riskLevel"),
}

# Edge attributes beyond (timestamp, amount); amounts are implied by
# AMOUNT_EDGE_KINDS.
EDGE_ATTRIBUTES: dict[str, tuple[str, ...]] = {
    TRANSFER: ("ordernumber", "comment", "payType", "goodsType"),
    WITHDRAW: (),
    DEPOSIT: (),
    REPAY: (),
    SIGN_IN: ("location",),
    INVEST: ("ratio",),
    APPLY: ("organization",),
    GUARANTEE: ("relationship",),
    OWN: (),
}


def check_vertex_kind(kind: str) -> None:
    if kind not in VERTEX_ATTRIBUTES:
        raise SchemaError(f"unknown vertex kind {kind!r}")


def check_edge_kind(kind: str) -> None:
    if kind not in EDGE_ENDPOINTS:
        raise SchemaError(f"unknown edge kind {kind!r}")


def check_endpoints(edge_kind: str, src_kind: str, dst_kind: str) -> None:
    check_edge_kind(edge_kind)
    if (src_kind, dst_kind) not in EDGE_ENDPOINTS[edge_kind]:
        raise SchemaError(
            f"{edge_kind} edge cannot connect {src_kind} -> {dst_kind}"
        )


def check_vertex_properties(kind: str, properties: dict) -> None:
    """Strict-mode property validation against the attribute tables."""
    required = VERTEX_ATTRIBUTES[kind]
    missing = [name for name in required if name not in properties]
    if missing:
        raise SchemaError(f"{kind} record missing attributes: {', '.join(missing)}")
    if not isinstance(properties.get("isBlocked", False), bool):
        raise SchemaError(f"{kind}.isBlocked must be a boolean")
    for money_attr in ("loanAmount", "balance"):
        if money_attr in required and not isinstance(properties[money_attr], int):
            raise SchemaError(f"{kind}.{money_attr} must be integer cents")
