"""Reference detection: issue-key mentions in title, description, comments.

A mention is a substring `<PROJECT>-<digits>` where the project acronym is
one of the known project IDs, the digit run is 1-5 long, the character
before the acronym is absent or non-alphanumeric, and the character after
the digits is absent or non-digit. Matching is case-sensitive; tracker keys
are uppercase and the boundary rules keep prose words like "qbs" out.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .model import Issue


@dataclass(frozen=True)
class ReferenceProposal:
    from_key: str
    to_key: str
    source_field: str  # "title", "description", or "comment[i]"
    matched_text: str


def _pattern(project_ids: Iterable[str]) -> re.Pattern:
    ids = sorted(project_ids, key=len, reverse=True)
    alternation = "|".join(re.escape(pid) for pid in ids)
    return re.compile(
        r"(?<![A-Za-z0-9])(?:" + alternation + r")-[0-9]{1,5}(?![0-9])"
    )


def detect_references(
    issues: list[Issue],
    project_ids: set[str],
    known_keys: set[str] | None = None,
) -> tuple[list[ReferenceProposal], int]:
    """Scan text fields and propose one dependency per mentioned issue.

    Self-references are skipped. Mentions whose target key is not in
    `known_keys` (defaults to the scanned issues' own keys) are dropped;
    their count is returned as the second element so imports can report
    dangling references.
    """
    if not project_ids:
        return [], 0
    if known_keys is None:
        known_keys = {issue.key for issue in issues}
    pattern = _pattern(project_ids)
    proposals: list[ReferenceProposal] = []
    dangling = 0
    for issue in issues:
        fields = [("title", issue.title), ("description", issue.description)]
        fields.extend(
            (f"comment[{i}]", text) for i, text in enumerate(issue.comments)
        )
        seen: set[str] = set()
        for field_name, text in fields:
            if not text:
                continue
            for match in pattern.finditer(text):
                target = match.group(0)
                if target == issue.key or target in seen:
                    continue
                seen.add(target)
                if target not in known_keys:
                    dangling += 1
                    continue
                proposals.append(
                    ReferenceProposal(
                        from_key=issue.key,
                        to_key=target,
                        source_field=field_name,
                        matched_text=target,
                    )
                )
    proposals.sort(key=lambda p: (p.from_key, p.to_key))
    return proposals, dangling
