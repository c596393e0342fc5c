"""Built-in scale factor table: entity-count targets per dataset size class.

Person/company/medium counts are hit exactly by construction; accounts,
loans and every edge kind emerge from the simulation and are expected to
land within ±20% of these targets. The table is used verbatim, including
the SF0.01 company count that does not follow the person ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import parse_datetime

TABLE_ROWS = (
    "account",
    "company",
    "companyApplyLoan",
    "companyGuarantee",
    "companyInvest",
    "companyOwnAccount",
    "deposit",
    "loan",
    "loanTransfer",
    "medium",
    "person",
    "personApplyLoan",
    "personGuarantee",
    "personInvest",
    "personOwnAccount",
    "repay",
    "signIn",
    "transfer",
    "withdraw",
)

_COUNTS = {
    "SF0.01": (2633, 2633, 524, 248, 860, 864, 5199, 1597, 4886, 1000, 800,
               1073, 469, 1650, 1769, 5046, 4384, 14145, 20557),
    "SF0.1": (26347, 4000, 5332, 2315, 8639, 8805, 51686, 16138, 49180, 10000,
              8000, 10806, 4694, 17296, 17542, 50495, 44540, 138209, 201119),
    "SF0.3": (79199, 12000, 15761, 7123, 25853, 26356, 153521, 47772, 145679,
              30000, 24000, 32011, 14221, 52002, 52843, 149559, 134532, 411882, 609548),
    "SF1": (264075, 40000, 52820, 23870, 86092, 88119, 512680, 159166, 484657,
            100000, 80000, 106346, 47935, 174064, 175956, 497033, 451362, 1379527, 2011359),
    "SF3": (791769, 120000, 158678, 71716, 259884, 264352, 1534595, 476670, 1453874,
            300000, 240000, 317992, 144064, 520584, 527417, 1488916, 1350759, 4136803, 6013709),
    "SF10": (1980883, 300000, 397060, 179526, 650190, 660625, 3829905, 1189072, 3625556,
             2000000, 600000, 792012, 359283, 1300980, 1320258, 3715487, 8996781, 11005032, 15056721),
}

#: Three years starting 2020-01-01, UTC.
DEFAULT_SPAN = (
    parse_datetime("2020-01-01T00:00:00.000+0000"),
    parse_datetime("2023-01-01T00:00:00.000+0000"),
)


@dataclass(frozen=True)
class ScaleFactorSpec:
    name: str
    targets: dict
    span_start: int = DEFAULT_SPAN[0]
    span_end: int = DEFAULT_SPAN[1]

    def target(self, row: str) -> int:
        return self.targets[row]


SCALE_FACTORS: dict[str, ScaleFactorSpec] = {
    name: ScaleFactorSpec(name, dict(zip(TABLE_ROWS, counts)))
    for name, counts in _COUNTS.items()
}


def resolve_sf(sf) -> ScaleFactorSpec:
    if isinstance(sf, ScaleFactorSpec):
        return sf
    key = str(sf)
    if not key.upper().startswith("SF"):
        key = f"SF{key}"
    key = "SF" + key[2:]
    if key not in SCALE_FACTORS:
        raise KeyError(f"unknown scale factor {sf!r}; known: {', '.join(SCALE_FACTORS)}")
    return SCALE_FACTORS[key]
