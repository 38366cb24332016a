"""The four signaling state machines, as explicit transition tables.

Registration (mobility), session establishment, NG-interface setup, and
per-session resource setup each have exactly three accepting arcs; every
other (state, event) pair raises :class:`IllegalTransition`.  Both peers
of a flow run their own instance, stepping on send or receive of the
same message kinds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .nas.messages import MessageKind
from .ngap.messages import NgapKind


class GmmState(str, Enum):
    DEREGISTERED = "Deregistered"
    REGISTERED_INITIATED = "RegisteredInitiated"
    REGISTERED = "Registered"


class GsmState(str, Enum):
    INACTIVE = "Inactive"
    ACTIVE_PENDING = "ActivePending"
    ACTIVE = "Active"


class NgcState(str, Enum):
    INACTIVE = "Inactive"
    PENDING = "Pending"
    ACTIVE = "Active"


class PduResourceState(str, Enum):
    INACTIVE = "Inactive"
    PENDING = "Pending"
    ACTIVE = "Active"


SENT = "sent"
RECEIVED = "received"

UE = "ue"
AMF = "amf"
RAN = "ran"


@dataclass(frozen=True)
class FsmEvent:
    """Message kind + direction + which peer's machine is stepping.

    ``qualifier`` distinguishes success from failure on session-resource
    responses ("success" / "failure"); None elsewhere.
    """

    message: str
    direction: str
    side: str
    qualifier: str | None = None


class IllegalTransition(Exception):
    def __init__(self, machine: str, state, event: FsmEvent):
        super().__init__(f"{machine}: no arc from {state.value} on {event}")
        self.machine = machine
        self.state = state
        self.event = event


def _key(event: FsmEvent) -> tuple:
    return (event.message, event.direction, event.side, event.qualifier)


# -- registration machine -------------------------------------------------------

_GMM_ARCS: dict[tuple, tuple[GmmState, GmmState]] = {
    (str(MessageKind.REGISTRATION_REQUEST), SENT, UE, None): (
        GmmState.DEREGISTERED,
        GmmState.REGISTERED_INITIATED,
    ),
    (str(MessageKind.REGISTRATION_REQUEST), RECEIVED, AMF, None): (
        GmmState.DEREGISTERED,
        GmmState.REGISTERED_INITIATED,
    ),
    (str(MessageKind.REGISTRATION_ACCEPT), RECEIVED, UE, None): (
        GmmState.REGISTERED_INITIATED,
        GmmState.REGISTERED,
    ),
    (str(MessageKind.REGISTRATION_COMPLETE), RECEIVED, AMF, None): (
        GmmState.REGISTERED_INITIATED,
        GmmState.REGISTERED,
    ),
    (str(MessageKind.REGISTRATION_REJECT), RECEIVED, UE, None): (
        GmmState.REGISTERED_INITIATED,
        GmmState.DEREGISTERED,
    ),
    (str(MessageKind.REGISTRATION_REJECT), SENT, AMF, None): (
        GmmState.REGISTERED_INITIATED,
        GmmState.DEREGISTERED,
    ),
}

# -- session machine -----------------------------------------------------------

_GSM_ARCS: dict[tuple, tuple[GsmState, GsmState]] = {
    (str(MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST), SENT, UE, None): (
        GsmState.INACTIVE,
        GsmState.ACTIVE_PENDING,
    ),
    (str(MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST), RECEIVED, AMF, None): (
        GsmState.INACTIVE,
        GsmState.ACTIVE_PENDING,
    ),
    (str(MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT), RECEIVED, UE, None): (
        GsmState.ACTIVE_PENDING,
        GsmState.ACTIVE,
    ),
    (str(MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT), SENT, AMF, None): (
        GsmState.ACTIVE_PENDING,
        GsmState.ACTIVE,
    ),
    (str(MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT), RECEIVED, UE, None): (
        GsmState.ACTIVE_PENDING,
        GsmState.INACTIVE,
    ),
    (str(MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT), SENT, AMF, None): (
        GsmState.ACTIVE_PENDING,
        GsmState.INACTIVE,
    ),
}

# -- NG interface machine --------------------------------------------------------

_NGC_ARCS: dict[tuple, tuple[NgcState, NgcState]] = {
    (str(NgapKind.NG_SETUP_REQUEST), SENT, RAN, None): (NgcState.INACTIVE, NgcState.PENDING),
    (str(NgapKind.NG_SETUP_REQUEST), RECEIVED, AMF, None): (NgcState.INACTIVE, NgcState.PENDING),
    (str(NgapKind.NG_SETUP_RESPONSE), RECEIVED, RAN, None): (NgcState.PENDING, NgcState.ACTIVE),
    (str(NgapKind.NG_SETUP_RESPONSE), SENT, AMF, None): (NgcState.PENDING, NgcState.ACTIVE),
    (str(NgapKind.NG_SETUP_FAILURE), RECEIVED, RAN, None): (NgcState.PENDING, NgcState.INACTIVE),
    (str(NgapKind.NG_SETUP_FAILURE), SENT, AMF, None): (NgcState.PENDING, NgcState.INACTIVE),
}

# -- session-resource machine ------------------------------------------------------
# Arc (a) accepts the dedicated setup request or a context-setup request
# that carries sessions; (b)/(c) accept the matching success/failure replies.


def _pdu_arcs() -> dict[tuple, tuple[PduResourceState, PduResourceState]]:
    arcs: dict[tuple, tuple[PduResourceState, PduResourceState]] = {}
    for request in (
        str(NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST),
        str(NgapKind.INITIAL_CONTEXT_SETUP_REQUEST),
    ):
        arcs[(request, SENT, AMF, None)] = (PduResourceState.INACTIVE, PduResourceState.PENDING)
        arcs[(request, RECEIVED, RAN, None)] = (
            PduResourceState.INACTIVE,
            PduResourceState.PENDING,
        )
    for response in (
        str(NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE),
        str(NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE),
    ):
        arcs[(response, SENT, RAN, "success")] = (
            PduResourceState.PENDING,
            PduResourceState.ACTIVE,
        )
        arcs[(response, RECEIVED, AMF, "success")] = (
            PduResourceState.PENDING,
            PduResourceState.ACTIVE,
        )
        arcs[(response, SENT, RAN, "failure")] = (
            PduResourceState.PENDING,
            PduResourceState.INACTIVE,
        )
        arcs[(response, RECEIVED, AMF, "failure")] = (
            PduResourceState.PENDING,
            PduResourceState.INACTIVE,
        )
    failure = str(NgapKind.INITIAL_CONTEXT_SETUP_FAILURE)
    arcs[(failure, SENT, RAN, None)] = (PduResourceState.PENDING, PduResourceState.INACTIVE)
    arcs[(failure, RECEIVED, AMF, None)] = (PduResourceState.PENDING, PduResourceState.INACTIVE)
    return arcs


_PDU_ARCS = _pdu_arcs()


def _step(machine: str, arcs: dict, state, event: FsmEvent):
    arc = arcs.get(_key(event))
    if arc is None or arc[0] != state:
        raise IllegalTransition(machine, state, event)
    return arc[1]


def gmm_step(state: GmmState, event: FsmEvent) -> GmmState:
    return _step("5GMM", _GMM_ARCS, state, event)


def gsm_step(state: GsmState, event: FsmEvent) -> GsmState:
    return _step("5GSM", _GSM_ARCS, state, event)


def ngc_step(state: NgcState, event: FsmEvent) -> NgcState:
    return _step("NG-C", _NGC_ARCS, state, event)


def pdures_step(state: PduResourceState, event: FsmEvent) -> PduResourceState:
    return _step("PDU-resource", _PDU_ARCS, state, event)


def gmm_event_has_arc(event: FsmEvent) -> bool:
    return _key(event) in _GMM_ARCS


def gsm_event_has_arc(event: FsmEvent) -> bool:
    return _key(event) in _GSM_ARCS


def ngc_event_has_arc(event: FsmEvent) -> bool:
    return _key(event) in _NGC_ARCS


def pdures_event_has_arc(event: FsmEvent) -> bool:
    return _key(event) in _PDU_ARCS


MACHINES = {
    "5GMM": (gmm_step, gmm_event_has_arc, GmmState),
    "5GSM": (gsm_step, gsm_event_has_arc, GsmState),
    "NG-C": (ngc_step, ngc_event_has_arc, NgcState),
    "PDU-resource": (pdures_step, pdures_event_has_arc, PduResourceState),
}
