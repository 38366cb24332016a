"""Message mutations armed by robustness test cases.

A mutation transforms the next outgoing message of the targeted kind,
before protection and encoding.  At most one fires per flow; a flow that
finishes without meeting its target raises :class:`MutationUnmatched`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class MutationAction(Enum):
    DELETE_IE = "delete_ie"
    REPLACE_VALUE = "replace_value"
    REORDER_AFTER = "reorder_after"
    INJECT_RAW = "inject_raw"
    SKIP_STATE = "skip_state"


class MutationUnmatched(Exception):
    pass


@dataclass
class Mutation:
    target_kind: str
    action: MutationAction
    field: str = ""
    value: object = None  # replacement value, raw octets, or release-after kind
    consumed: bool = False


@dataclass
class MutationSet:
    mutations: list[Mutation] = field(default_factory=list)

    def arm(self, mutation: Mutation) -> None:
        self.mutations.append(mutation)

    def for_kind(self, kind: str) -> list[Mutation]:
        return [m for m in self.mutations if m.target_kind == kind and not m.consumed]

    def apply(self, kind: str, body) -> tuple[object, bool, bool, bytes | None]:
        """Transform an outgoing body.

        Returns (body, encode_unchecked, skip_own_fsm, raw_override).
        """
        unchecked = False
        skip_state = False
        raw: bytes | None = None
        for m in self.for_kind(kind):
            m.consumed = True
            if m.action == MutationAction.DELETE_IE:
                setattr(body, m.field, None)
                unchecked = True
            elif m.action == MutationAction.REPLACE_VALUE:
                setattr(body, m.field, m.value)
                unchecked = True
            elif m.action == MutationAction.INJECT_RAW:
                raw = bytes(m.value)  # type: ignore[arg-type]
            elif m.action == MutationAction.SKIP_STATE:
                skip_state = True
            # REORDER_AFTER is interpreted by the flow scripts themselves:
            # the held message is released at the scripted point.
        return body, unchecked, skip_state, raw

    def assert_all_consumed(self) -> None:
        leftovers = [m for m in self.mutations if not m.consumed]
        if leftovers:
            raise MutationUnmatched(
                "flow finished without the targeted message(s): "
                + ", ".join(m.target_kind for m in leftovers)
            )
