"""Human-friendly names for metric and belief keys.

Keys have a canonical parenthesized form and a dotted shorthand, both
accepted by the command line and the HTTP API:

    cssm(Western, Politeness, Client, Crowd, Client)
    cb(Q-Agreed, Crowd, Client)
    politeness.client.crowd             metric.subject.perspective
    politeness.client.crowd.seller      ... with an explicit estimator
    q-agreed.crowd                      belief.perspective
    q-agreed.crowd.seller               ... with an explicit estimator

When the estimator is omitted it defaults to the perspective: "politeness
of the client in the crowd's eyes" then means the crowd's own estimate.
Matching is case-insensitive, and the dotted form omits the culture, which
is unambiguous as long as no two cultures declare the same metric tuple.
Only keys declared by the scenario resolve.
"""

from __future__ import annotations

import re

from .beliefs import CbKey
from .errors import DomainError, UnknownKeyError
from .metrics import CssmKey
from .scenario import ScenarioDef

Key = CssmKey | CbKey

_PAREN = re.compile(r"(cssm|cb)\s*\((.*)\)\s*$", re.IGNORECASE)


def known_keys(scenario: ScenarioDef) -> tuple[str, ...]:
    """Canonical text of every declared key, metrics first."""
    return tuple(str(key) for key in scenario.all_keys())


def split_key_list(text: str) -> list[str]:
    """Split a comma-separated key list, honoring parenthesized keys."""
    parts: list[str] = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


def parse_key(text: str, scenario: ScenarioDef) -> Key:
    """Resolve a key name in any accepted form to a declared key."""
    s = text.strip()
    m = _PAREN.match(s)
    if m:
        kind = m.group(1).lower()
        parts = tuple(p.strip() for p in m.group(2).split(","))
        want = 5 if kind == "cssm" else 3
        if len(parts) != want or not all(parts):
            raise DomainError(f"{kind}(...) takes {want} comma-separated parts, "
                              f"got {text!r}")
        if kind == "cssm":
            return _match_cssm(text, scenario, *parts)
        return _match_cb(text, scenario, *parts)
    if "(" in s or ")" in s:
        raise DomainError(f"malformed key {text!r}")
    parts = tuple(p.strip() for p in s.split("."))
    if len(parts) < 2 or not all(parts):
        raise _unknown(text, scenario)
    first = parts[0].casefold()
    metrics = {k.metric.casefold() for k in scenario.all_keys()
               if isinstance(k, CssmKey)}
    beliefs = {k.belief.casefold() for k in scenario.all_keys()
               if isinstance(k, CbKey)}
    if first in metrics:
        if len(parts) == 3:
            parts = (*parts, parts[2])
        if len(parts) != 4:
            raise DomainError(f"metric keys are metric.subject.perspective"
                              f"[.estimator], got {text!r}")
        return _match_cssm(text, scenario, None, *parts)
    if first in beliefs:
        if len(parts) == 2:
            parts = (*parts, parts[1])
        if len(parts) != 3:
            raise DomainError(f"belief keys are belief.perspective[.estimator], "
                              f"got {text!r}")
        return _match_cb(text, scenario, *parts)
    raise _unknown(text, scenario)


def _unknown(text: str, scenario: ScenarioDef) -> UnknownKeyError:
    return UnknownKeyError(f"unknown key {text!r}; known keys: "
                           + ", ".join(known_keys(scenario)))


def _ambiguous(text: str, hits: list) -> DomainError:
    return DomainError(f"key {text!r} is ambiguous; it matches "
                       + ", ".join(str(k) for k in hits))


def _match_cssm(text: str, scenario: ScenarioDef, culture: str | None,
                metric: str, subject: str, perspective: str, estimator: str) -> CssmKey:
    wanted = tuple(p.casefold() for p in (metric, subject, perspective, estimator))
    hits = [k for k in scenario.all_keys()
            if isinstance(k, CssmKey)
            and (k.metric.casefold(), k.subject.casefold(),
                 k.perspective.casefold(), k.estimator.casefold()) == wanted
            and (culture is None or k.culture.casefold() == culture.casefold())]
    if not hits:
        raise _unknown(text, scenario)
    if len(hits) > 1:
        raise _ambiguous(text, hits)
    return hits[0]


def _match_cb(text: str, scenario: ScenarioDef, belief: str,
              perspective: str, estimator: str) -> CbKey:
    wanted = tuple(p.casefold() for p in (belief, perspective, estimator))
    hits = [k for k in scenario.all_keys()
            if isinstance(k, CbKey)
            and (k.belief.casefold(), k.perspective.casefold(),
                 k.estimator.casefold()) == wanted]
    if not hits:
        raise _unknown(text, scenario)
    if len(hits) > 1:  # pragma: no cover - belief keys cannot collide today
        raise _ambiguous(text, hits)
    return hits[0]
