"""Hand-built telemetry fixture exercising every cohort filter branch.

Day offsets are relative to P_START; the studied period is days 0..20
(three weeks, ending on P_END).  Each subject below is described by its
install and last-activity offsets, the days on which it played, and any
purchases.  Expected qualifying sets are written out by hand.
"""

from __future__ import annotations

import datetime as dt

P_START = dt.date(2015, 6, 11)
P_END = dt.date(2015, 7, 1)

ALL = set(range(-2, 23))


def _days(*ranges, minus=()):
    out = set()
    for lo, hi in ranges:
        out |= set(range(lo, hi + 1))
    return out - set(minus)


# sid: (install offset, last-activity offset, active days, purchases {day: amount}, payer flag, level)
SUBJECTS = {}
for i in range(1, 13):
    purchases = {3: float(i)} if i <= 4 else {}
    SUBJECTS[f"q{i:02d}"] = (-(10 + i), 20 + 5 + i, ALL, purchases, i % 2, 10 * i)
SUBJECTS.update({
    "q13": (-40, 60, ALL - {0, 7, 14}, {5: 4.99}, 0, 7),              # exactly 6 active days a week
    "q14": (-1, 21, ALL, {}, 0, 3),                                   # install the day before, last the day after
    "late1": (0, 60, ALL, {}, 0, 1),                                  # installs on the first day
    "late2": (5, 60, _days((5, 22)), {}, 0, 1),
    "quit1": (-30, 20, _days((-2, 20)), {}, 1, 9),                    # last activity on the last day
    "quit2": (-30, 10, _days((-2, 10)), {}, 0, 9),
    "w5a": (-30, 60, ALL - {8, 9}, {}, 0, 4),                         # 5 active days in week 2
    "w5b": (-30, 60, ALL - {15, 20}, {}, 0, 4),                       # 5 active days in week 3
    "w5c": (-30, 60, ALL, {}, 0, 4),                                  # rows on days 1, 2 with zero time
    "none": (-30, 60, set(), {}, 0, 2),                               # no activity rows at all
    "np1": (-30, 60, ALL, {}, 1, 30),                                 # payer flag but no purchase in period
    "np2": (-30, 60, ALL, {}, 0, 31),
    "payout": (-30, 60, _days((-5, 22)), {-3: 9.99, 21: 9.99}, 1, 32),  # purchases only outside the period
    "sparsepay": (-30, 60, {2, 9, 16}, {9: 1.99}, 1, 12),
    "latepay": (3, 60, _days((3, 22)), {10: 4.99}, 0, 5),
    "quitpay": (-30, 20, _days((-2, 20)), {4: 4.99}, 1, 6),
    "sixpay": (-30, 60, ALL - {6, 13, 20}, {12: 0.99}, 1, 15),
    "w4": (-30, 60, ALL - {0, 1, 2}, {10: 2.99}, 0, 8),               # 4 active days in week 1
})
ZERO_TIME_DAYS = {"w5c": {1, 2}}

EXPECTED_TIME = sorted([f"q{i:02d}" for i in range(1, 15)] + ["np1", "np2", "payout", "sixpay"])
EXPECTED_PURCHASE = sorted(["q01", "q02", "q03", "q04", "q13", "sparsepay", "sixpay", "w4"])
EXPECTED_DATES_ONLY = sorted(
    set(SUBJECTS) - {"late1", "late2", "quit1", "quit2", "latepay", "quitpay"}
)


def _date(offset: int) -> str:
    return (P_START + dt.timedelta(days=offset)).isoformat()


def activity_text() -> str:
    lines = ["subject_id,date,time_played_s,sessions,actions,purchase"]
    for sid, (_, _, active, purchases, _, _) in SUBJECTS.items():
        zero = ZERO_TIME_DAYS.get(sid, set())
        for day in sorted(active | set(purchases) | zero):
            t = 0 if day in zero else 600 + 10 * (day % 5)
            lines.append(f"{sid},{_date(day)},{t},{int(t > 0) * 2},{int(t > 0) * 15},{purchases.get(day, 0)}")
    # activity for a subject with no attribute row is ignored
    lines.append(f"orphan,{_date(0)},100,1,1,0")
    return "\n".join(lines) + "\n"


def attributes_text() -> str:
    lines = ["subject_id,install_date,level_at_start,is_paying_user_at_start,last_activity_date"]
    for sid, (inst, last, _, _, payer, level) in SUBJECTS.items():
        lines.append(f"{sid},{_date(inst)},{level},{payer},{_date(last)}")
    return "\n".join(lines) + "\n"


# churn / characteristics fixture: two clusters of three
CHURN_LABELS = [1, 1, 1, 2, 2, 2]
CHURN_IDS = ["a1", "a2", "a3", "b1", "b2", "b3"]
CHURN_ATTRS = {
    # sid: (payer, level, last activity)
    "a1": (1, 10, dt.date(2015, 7, 1)),
    "a2": (0, 20, dt.date(2015, 7, 2)),
    "a3": (0, 30, dt.date(2016, 1, 1)),
    "b1": (1, 5, dt.date(2015, 8, 1)),
    "b2": (1, 5, dt.date(2015, 8, 2)),
    "b3": (0, 8, dt.date(2015, 10, 31)),
}
CHURN_CHECKPOINTS = (dt.date(2015, 8, 1), dt.date(2015, 9, 1), dt.date(2015, 12, 1))
# churned when the last activity falls before checkpoint - 30 days:
# 07-02, 08-02 and 11-01 respectively
CHURN_EXPECTED = [
    [1 / 3, 0.0],
    [2 / 3, 1 / 3],
    [2 / 3, 1.0],
]
CHARACTERISTICS_EXPECTED = [(1, 3, 1 / 3, 20.0), (2, 3, 2 / 3, 6.0)]
