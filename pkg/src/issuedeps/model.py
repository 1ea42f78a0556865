"""Core domain types shared by every subsystem.

Issues and dependencies are distinct first-class entities. Issue keys are
plain strings of the form ``PROJECT-123``; helpers here parse and validate
them so the rest of the code can treat keys as opaque map keys.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class IssueDepsError(Exception):
    """Base class for engine errors."""


class UnknownIssueError(IssueDepsError, KeyError):
    """A referenced issue key does not exist in the graph or repository."""


class ValidationError(IssueDepsError, ValueError):
    """Input violates a documented invariant."""


_KEY_RE = re.compile(r"^([A-Z][A-Z0-9]*)-([0-9]+)$")


def parse_issue_key(key: str) -> tuple[str, int]:
    """Split ``PROJECT-123`` into (project, number).

    Raises ValidationError if the key is not an uppercase alphanumeric
    acronym, one hyphen, and a positive integer.
    """
    m = _KEY_RE.match(key)
    if not m:
        raise ValidationError(f"invalid issue key: {key!r}")
    number = int(m.group(2))
    if number <= 0:
        raise ValidationError(f"issue number must be positive: {key!r}")
    return m.group(1), number


def project_of(key: str) -> str:
    return parse_issue_key(key)[0]


class IssueType(str, Enum):
    BUG = "bug"
    EPIC = "epic"
    USER_STORY = "user_story"
    SUGGESTION = "suggestion"
    TASK = "task"


class DependencyType(str, Enum):
    DUPLICATES = "duplicates"
    REQUIRES = "requires"
    RELATES = "relates"
    REPLACES = "replaces"
    RESULTS = "results"
    TESTS = "tests"
    PARENT_CHILD = "parent_child"
    # Legal only while status is `proposed`: reference detection emits
    # dependencies without a type, and accepting one forces the user to
    # pick a real type.
    UNTYPED = "untyped"


class DependencyStatus(str, Enum):
    PROPOSED = "proposed"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


# Release parts above this cannot be encoded collision-free as integers.
MAX_VERSION_PART = 999


@dataclass(frozen=True, order=True)
class Version:
    """Release number with up to three parts; missing trailing parts read 0.

    Ordering is lexicographic on (x, y, z), which matches the integer
    encoding used by the consistency checker.
    """

    parts: tuple[int, int, int]

    @classmethod
    def parse(cls, text: str) -> "Version":
        raw = text.strip()
        if not raw:
            raise ValidationError("empty version string")
        pieces = raw.split(".")
        if len(pieces) > 3:
            raise ValidationError(f"version has more than three parts: {text!r}")
        nums = []
        for piece in pieces:
            if not piece.isdigit():
                raise ValidationError(f"non-numeric version part in {text!r}")
            value = int(piece)
            if value > MAX_VERSION_PART:
                raise ValidationError(
                    f"version part {value} exceeds {MAX_VERSION_PART} in {text!r}"
                )
            nums.append(value)
        while len(nums) < 3:
            nums.append(0)
        return cls(parts=(nums[0], nums[1], nums[2]))

    def encode(self) -> int:
        """Strictly monotone integer encoding: x*10^6 + y*10^3 + z."""
        x, y, z = self.parts
        return x * 1_000_000 + y * 1_000 + z

    def __str__(self) -> str:
        return ".".join(str(p) for p in self.parts)


@dataclass
class Issue:
    """One tracker item."""

    key: str
    title: str = ""
    description: str = ""
    comments: list[str] = field(default_factory=list)
    issue_type: IssueType = IssueType.BUG
    status: str = "Open"
    resolution: str | None = None
    priority: int | None = None  # 0 most urgent .. 5 least
    release: Version | None = None
    created: str = ""
    modified: str = ""
    custom: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        parse_issue_key(self.key)
        if self.priority is not None and not 0 <= self.priority <= 5:
            raise ValidationError(
                f"priority {self.priority} outside [0,5] on {self.key}"
            )

    @property
    def project(self) -> str:
        return project_of(self.key)

    def property_value(self, name: str) -> str | None:
        """String rendering of a named property, for exact-match filters.

        Known names: project, type, status, resolution, priority, release;
        anything else is looked up among custom fields from the import.
        """
        if name == "project":
            return self.project
        if name == "type":
            return self.issue_type.value
        if name == "status":
            return self.status
        if name == "resolution":
            return self.resolution
        if name == "priority":
            return None if self.priority is None else str(self.priority)
        if name == "release":
            return None if self.release is None else str(self.release)
        return self.custom.get(name)


@dataclass
class Dependency:
    """Typed, statused, scored edge between two issue keys."""

    from_key: str
    to_key: str
    dep_type: DependencyType = DependencyType.UNTYPED
    status: DependencyStatus = DependencyStatus.PROPOSED
    score: float = 1.0
    created: str = ""

    def __post_init__(self) -> None:
        if self.from_key == self.to_key:
            raise ValidationError(f"self-dependency on {self.from_key}")
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(
                f"score {self.score} outside [0,1] on {self.from_key}->{self.to_key}"
            )
        if (
            self.dep_type == DependencyType.UNTYPED
            and self.status != DependencyStatus.PROPOSED
        ):
            raise ValidationError(
                f"untyped dependency must stay proposed: {self.from_key}->{self.to_key}"
            )

    @property
    def pair(self) -> tuple[str, str]:
        """Unordered endpoint pair."""
        a, b = self.from_key, self.to_key
        return (a, b) if a <= b else (b, a)


class DecisionVerdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass
class DecisionRecord:
    """One accept/reject review decision, append-only."""

    from_key: str
    to_key: str
    verdict: DecisionVerdict
    dep_type: DependencyType | None = None
    actor: str = ""
    at: str = ""

    def __post_init__(self) -> None:
        if self.verdict == DecisionVerdict.ACCEPT:
            if self.dep_type is None or self.dep_type == DependencyType.UNTYPED:
                raise ValidationError(
                    "accept decisions must carry a concrete dependency type"
                )

    @property
    def pair(self) -> tuple[str, str]:
        a, b = self.from_key, self.to_key
        return (a, b) if a <= b else (b, a)
