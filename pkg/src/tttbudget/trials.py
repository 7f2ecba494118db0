"""Planning and evaluating indistinguishability trials.

A trial asks a subject which participant (or which session) was the mediated
one. If subjects cannot identify it better than chance, the system passes.
The verdict is a one-sided exact binomial test against guessing: the system
passes when correct identifications are *not* significantly overrepresented.
That is a failure to reject, so small trial sets pass easily; the verdict
reports the smallest detectable identification rate to make this visible.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import bdtrc

from .exceptions import DomainError, InputError

CHANCE = 0.5
DEFAULT_ALPHA = 0.05
DEFAULT_MARGIN = 0.5
TARGET_POWER = 0.8
ACR_SCALE = (1, 2, 3, 4, 5)
FIGURANT = "FIGURANT"


class Setup(str, Enum):
    SIDE_BY_SIDE = "side_by_side"
    SYMMETRIC = "symmetric"
    SEQUENTIAL = "sequential"


# What a subject names as remote: a participant slot, or for the sequential
# set-up the session that was mediated.
PARTICIPANTS = {
    Setup.SIDE_BY_SIDE: ("A", "B", "C", "D"),
    Setup.SYMMETRIC: ("A", "B", "C", "D"),
    Setup.SEQUENTIAL: ("first", "second"),
}

SUBJECT_SLOTS = {
    Setup.SIDE_BY_SIDE: ("A", "C"),
    Setup.SYMMETRIC: ("A", "B", "C", "D"),
    Setup.SEQUENTIAL: ("A", "B", "C", "D"),
}

# randomized per group: for the two simultaneous set-ups, which of B or C is
# remote as seen from A; for the sequential one, which conversation comes first
MEDIATED_OPTIONS = {
    Setup.SIDE_BY_SIDE: ("B", "C"),
    Setup.SYMMETRIC: ("B", "C"),
    Setup.SEQUENTIAL: ("mediated_first", "face_to_face_first"),
}


def _is_rating(value):
    return isinstance(value, int) and not isinstance(value, bool) and value in ACR_SCALE


@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    setup: Setup
    subject_id: str
    ground_truth_remote: str
    response_remote: str
    acr_assessment: int | None = None
    acr_reference: int | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "setup", Setup(self.setup))
        except ValueError:
            raise InputError(f"trial {self.trial_id}: unknown setup {self.setup!r}") from None
        allowed = PARTICIPANTS[self.setup]
        for name in ("ground_truth_remote", "response_remote"):
            if getattr(self, name) not in allowed:
                raise InputError(
                    f"trial {self.trial_id}: {name} must be one of {allowed}, "
                    f"got {getattr(self, name)!r}"
                )
        for name in ("acr_assessment", "acr_reference"):
            value = getattr(self, name)
            if value is not None and not _is_rating(value):
                raise InputError(f"trial {self.trial_id}: {name} must be an integer 1-5, got {value!r}")

    @property
    def correct(self) -> bool:
        return self.response_remote == self.ground_truth_remote

    def to_dict(self):
        d = asdict(self)
        d["setup"] = self.setup.value
        return d


@dataclass(frozen=True)
class MeanOpinionScore:
    mean: float
    half_width: float
    n: int


@dataclass(frozen=True)
class TttVerdict:
    n_trials: int
    n_correct: int
    p_value: float
    alpha: float
    passed: bool
    critical_correct: int | None
    min_detectable_rate: float | None
    mos_assessment: MeanOpinionScore | None = None
    mos_reference: MeanOpinionScore | None = None
    mos_margin: float | None = None
    mos_pass: bool | None = None
    caveats: tuple[str, ...] = ()

    def to_dict(self):
        d = asdict(self)
        d["caveats"] = list(self.caveats)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("mos_assessment", "mos_reference"):
            if d.get(key) is not None:
                d[key] = MeanOpinionScore(**d[key])
        d["caveats"] = tuple(d.get("caveats", ()))
        return cls(**d)


@dataclass(frozen=True)
class SessionGroup:
    index: int
    slots: dict[str, str]
    mediated: str


@dataclass(frozen=True)
class SessionPlan:
    setup: Setup
    seed: int
    group_size: int
    assignments: tuple[SessionGroup, ...]
    unassigned: tuple[str, ...] = ()

    def mediated_counts(self) -> dict[str, int]:
        counts = {opt: 0 for opt in MEDIATED_OPTIONS[self.setup]}
        for group in self.assignments:
            counts[group.mediated] += 1
        return counts

    def to_dict(self):
        return {
            "setup": self.setup.value,
            "seed": self.seed,
            "group_size": self.group_size,
            "assignments": [asdict(g) for g in self.assignments],
            "unassigned": list(self.unassigned),
            "mediated_counts": self.mediated_counts(),
        }


def binomial_tail(n: int, k: int, p0: float = CHANCE) -> float:
    """Exact upper tail P(X >= k) for X ~ Binomial(n, p0).

    Evaluated through the regularized incomplete beta function, which is
    exact up to rounding for any `n`; no normal or Poisson approximation is
    involved.
    """
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if not 0 < p0 < 1:
        raise DomainError("p0 must lie in (0, 1)")
    if k == 0:
        return 1.0
    if k == n:
        return p0**n
    # bdtrc(j, n, p) = P(X > j)
    return float(bdtrc(k - 1, n, p0))


def critical_correct(n: int, alpha: float) -> int | None:
    """Fewest correct answers out of `n` that reject guessing at `alpha`."""
    lo, hi = 0, n + 1
    # tail is non-increasing in k, so bisect for the first k below alpha
    while lo < hi:
        mid = (lo + hi) // 2
        if mid <= n and binomial_tail(n, mid) < alpha:
            hi = mid
        else:
            lo = mid + 1
    return lo if lo <= n else None


def min_detectable_rate(n: int, alpha: float, power: float = TARGET_POWER) -> float | None:
    """Smallest true identification rate rejected with probability `power`."""
    k = critical_correct(n, alpha)
    if k is None:
        return None
    f = lambda p: binomial_tail(n, k, p) - power
    if f(1 - 1e-12) < 0:
        return None
    return brentq(f, CHANCE, 1 - 1e-12, xtol=1e-12)


def mos_aggregate(ratings: Sequence[int]) -> MeanOpinionScore:
    """Mean opinion score with a 95% normal-approximation half width."""
    if len(ratings) == 0:
        raise InputError("cannot aggregate an empty list of ratings")
    for r in ratings:
        if not _is_rating(r):
            raise InputError(f"rating {r!r} outside the 1-5 scale")
    x = np.asarray(ratings, dtype=float)
    half = 0.0 if len(x) == 1 else 1.96 * float(x.std(ddof=1)) / math.sqrt(len(x))
    return MeanOpinionScore(mean=float(x.mean()), half_width=half, n=len(x))


def mos_compare(assessment: Sequence[int], reference: Sequence[int],
                margin: float = DEFAULT_MARGIN) -> bool:
    """Non-inferiority of the mediated MOS against the face-to-face MOS."""
    a = mos_aggregate(assessment)
    r = mos_aggregate(reference)
    return a.mean >= r.mean - margin


def evaluate_trials(trials: Iterable[TrialRecord], alpha: float = DEFAULT_ALPHA,
                    margin: float = DEFAULT_MARGIN) -> TttVerdict:
    trials = list(trials)
    if not trials:
        raise InputError("no trials to evaluate")
    if not 0 < alpha <= 0.5:
        raise DomainError("alpha must lie in (0, 0.5]")
    n = len(trials)
    n_correct = sum(t.correct for t in trials)
    p = binomial_tail(n, n_correct, CHANCE)

    caveats = []
    if any(t.setup is Setup.SYMMETRIC for t in trials):
        caveats.append("symmetric set-up: responses within a group are pooled as "
                       "independent trials although they may be correlated")
    mde = min_detectable_rate(n, alpha)
    if mde is None:
        caveats.append(f"{n} trials cannot reject guessing at alpha={alpha}; "
                       "a pass carries no evidence")

    assessment = [t.acr_assessment for t in trials if t.acr_assessment is not None]
    reference = [t.acr_reference for t in trials if t.acr_reference is not None]
    mos_a = mos_aggregate(assessment) if assessment else None
    mos_r = mos_aggregate(reference) if reference else None
    mos_pass = mos_compare(assessment, reference, margin) if mos_a and mos_r else None

    return TttVerdict(
        n_trials=n,
        n_correct=n_correct,
        p_value=p,
        alpha=alpha,
        passed=p >= alpha,
        critical_correct=critical_correct(n, alpha),
        min_detectable_rate=mde,
        mos_assessment=mos_a,
        mos_reference=mos_r,
        mos_margin=margin if mos_pass is not None else None,
        mos_pass=mos_pass,
        caveats=tuple(caveats),
    )


def plan_sessions(setup: Setup | str, n_subjects: int, seed: int) -> SessionPlan:
    """Assign subjects to groups and balance which slot is mediated.

    Groups hold four people. The side-by-side set-up seats two subjects (A
    and C) and leaves B and D as explicit figurant placeholders, so two
    subjects fill a group. Subjects that do not fill a whole group are
    returned in `unassigned`.
    """
    try:
        setup = Setup(setup)
    except ValueError:
        raise DomainError(f"unknown setup {setup!r}") from None
    if isinstance(n_subjects, bool) or not isinstance(n_subjects, int) or n_subjects < 1:
        raise DomainError("n_subjects must be a positive integer")

    rng = random.Random(seed)
    subject_slots = SUBJECT_SLOTS[setup]
    size = len(subject_slots)
    subjects = [f"S{i + 1:03d}" for i in range(n_subjects)]
    rng.shuffle(subjects)
    n_groups = n_subjects // size

    options = MEDIATED_OPTIONS[setup]
    mediated = [options[i % len(options)] for i in range(n_groups)]
    rng.shuffle(mediated)

    groups = []
    for g in range(n_groups):
        members = iter(subjects[g * size:(g + 1) * size])
        slots = {slot: (next(members) if slot in subject_slots else FIGURANT)
                 for slot in ("A", "B", "C", "D")}
        groups.append(SessionGroup(index=g, slots=slots, mediated=mediated[g]))
    return SessionPlan(setup=setup, seed=seed, group_size=size,
                       assignments=tuple(groups),
                       unassigned=tuple(sorted(subjects[n_groups * size:])))


_RECORD_FIELDS = ("trial_id", "setup", "subject_id", "ground_truth_remote",
                  "response_remote", "acr_assessment", "acr_reference")
_REQUIRED_FIELDS = _RECORD_FIELDS[:5]


def parse_trial(obj, where="<record>") -> TrialRecord:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: record must be an object")
    unknown = sorted(set(obj) - set(_RECORD_FIELDS))
    if unknown:
        raise InputError(f"{where}: unknown field(s) {', '.join(unknown)}")
    missing = [f for f in _REQUIRED_FIELDS if f not in obj]
    if missing:
        raise InputError(f"{where}: missing field(s) {', '.join(missing)}")
    for name in ("trial_id", "subject_id", "ground_truth_remote", "response_remote"):
        if not isinstance(obj[name], str):
            raise InputError(f"{where}: {name} must be a string")
    try:
        return TrialRecord(**obj)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_trials(path) -> list[TrialRecord]:
    """Read a JSON-lines trials file; blank lines are skipped."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read trials {path}: {exc.strerror or exc}") from None
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from None
        records.append(parse_trial(obj, f"{path}:{lineno}"))
    return records
