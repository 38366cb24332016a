"""Simulated gNodeB: owns the signaling association and the user plane.

The agent drives interface setup, forwards NAS both ways for its UEs,
answers context/session-resource requests from the core, and keeps the
NG-C and per-session resource machines stepped on every send/receive.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .. import fsm
from ..fsm import FsmEvent, IllegalTransition, NgcState, PduResourceState
from ..msglog import MessageLog
from ..nas.ies import Snssai
from ..ngap import (
    GlobalRanNodeId,
    IeId,
    NgapDecodeError,
    NgapKind,
    NgapPdu,
    PduResourceItem,
    SetupRequestTransfer,
    SetupResponseTransfer,
    TaiSliceSupport,
    UserLocation,
    decode_ngap,
    encode_ngap,
    initial_context_setup_response,
    initial_ue_message,
    ng_setup_request,
    pdu_session_resource_setup_response,
    uplink_nas_transport,
    validate_ies,
)
from ..transport import GtpuEndpoint, NgcAssociation, TransportTimeout
from .trace import IN, OUT, FlowTrace, FsmCheck

_SETUP_AWAITED = (str(NgapKind.NG_SETUP_RESPONSE), str(NgapKind.NG_SETUP_FAILURE))
_STEADY_AWAITED = (
    str(NgapKind.DOWNLINK_NAS_TRANSPORT),
    str(NgapKind.INITIAL_CONTEXT_SETUP_REQUEST),
    str(NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST),
)


@dataclass
class UeBinding:
    ran_ue_ngap_id: int
    amf_ue_ngap_id: int | None = None
    nas_queue: deque = field(default_factory=deque)
    security_key: bytes | None = None


@dataclass
class ResourceBinding:
    state: PduResourceState = PduResourceState.INACTIVE
    local_teid: bytes = b""
    peer_teid: bytes = b""
    peer_address: str = ""
    qos_flow_ids: tuple[int, ...] = (1,)


@dataclass
class GnbContext:
    node_id: GlobalRanNodeId
    name: str
    tais: list[TaiSliceSupport]
    ngc: NgcState = NgcState.INACTIVE
    amf_name: str | None = None
    amf_capacity: int | None = None
    amf_plmn_support: list = field(default_factory=list)
    ue_bindings: dict[int, UeBinding] = field(default_factory=dict)
    resources: dict[tuple[int, int], ResourceBinding] = field(default_factory=dict)


@dataclass
class SetupOutcome:
    state: NgcState
    amf_name: str | None = None
    failure_cause: object = None
    timed_out: bool = False


class GnbAgent:
    def __init__(
        self,
        ctx: GnbContext,
        assoc: NgcAssociation,
        trace: FlowTrace | None = None,
        log: MessageLog | None = None,
        guard: float = 5.0,
        gtpu_bind: tuple[str, int] = ("127.0.0.1", 0),
        upf_port: int = 2152,
    ):
        self.ctx = ctx
        self.assoc = assoc
        self.trace = trace if trace is not None else FlowTrace()
        self.log = log
        self.guard = guard
        self.upf_port = upf_port
        tap = None
        if log is not None:
            tap = lambda direction, octets: log.log(
                "uplink" if direction == "out" else "downlink", "N3", octets, "G-PDU"
            )
        self.gtpu = GtpuEndpoint(address=gtpu_bind[0], port=gtpu_bind[1], tap=tap)
        self._next_ran_ue = 1
        self._next_teid = 1
        self._awaited: tuple[str, ...] = _STEADY_AWAITED

    # -- plumbing ------------------------------------------------------------

    def close(self) -> None:
        self.gtpu.close()
        self.assoc.close()

    def allocate_ue(self) -> UeBinding:
        binding = UeBinding(ran_ue_ngap_id=self._next_ran_ue)
        self.ctx.ue_bindings[binding.ran_ue_ngap_id] = binding
        self._next_ran_ue += 1
        return binding

    def allocate_teid(self) -> bytes:
        teid = self._next_teid.to_bytes(4, "big")
        self._next_teid += 1
        return teid

    def user_location(self) -> UserLocation:
        ta = self.ctx.tais[0]
        cell = (self.ctx.node_id.gnb_id << (36 - self.ctx.node_id.gnb_id_bits)) | 1
        return UserLocation(mcc=ta.mcc, mnc=ta.mnc, tac=ta.tac, cell_id=cell)

    def _ngc_event(self, kind: str, direction: str) -> FsmCheck:
        event = FsmEvent(message=kind, direction=direction, side=fsm.RAN)
        pre = self.ctx.ngc
        post: str | None
        try:
            self.ctx.ngc = fsm.ngc_step(pre, event)
            post = self.ctx.ngc.value
        except IllegalTransition:
            post = None
        return FsmCheck(machine="NG-C", pre_state=pre.value, event=event, post_state=post)

    def _resource_event(
        self, ran_ue: int, psi: int, kind: str, direction: str, qualifier: str | None
    ) -> FsmCheck:
        binding = self.ctx.resources.setdefault((ran_ue, psi), ResourceBinding())
        event = FsmEvent(message=kind, direction=direction, side=fsm.RAN, qualifier=qualifier)
        pre = binding.state
        post: str | None
        try:
            binding.state = fsm.pdures_step(pre, event)
            post = binding.state.value
        except IllegalTransition:
            post = None
        return FsmCheck(
            machine=f"PDU-resource[{psi}]", pre_state=pre.value, event=event, post_state=post
        )

    def _send(self, pdu: NgapPdu, checks: tuple[FsmCheck, ...] = ()) -> None:
        octets = encode_ngap(pdu)
        self.assoc.send(octets)
        self.trace.add(
            "N2", OUT, kind=str(pdu.kind), raw=octets, fsm_checks=checks
        )
        if self.log:
            self.log.log("uplink", "N2", octets, str(pdu.kind), tuple(
                f"{c.machine} {c.pre_state}->{c.post_state}" for c in checks if c.post_state
            ))

    def _recv(self, timeout: float) -> NgapPdu | None:
        """One PDU off the association, traced; None on undecodable input."""
        octets = self.assoc.recv(timeout)
        try:
            pdu = decode_ngap(octets)
        except NgapDecodeError as exc:
            self.trace.add(
                "N2", IN, kind=None, raw=octets, decode_error=str(exc), awaited=self._awaited
            )
            if self.log:
                self.log.log("downlink", "N2", octets, f"undecodable: {exc}")
            return None
        checks: list[FsmCheck] = []
        kind = str(pdu.kind)
        if fsm.ngc_event_has_arc(FsmEvent(kind, fsm.RECEIVED, fsm.RAN)):
            checks.append(self._ngc_event(kind, fsm.RECEIVED))
        entry = self.trace.add(
            "N2",
            IN,
            kind=kind,
            raw=octets,
            awaited=self._awaited,
            validation=validate_ies(pdu),
            fsm_checks=tuple(checks),
        )
        if self.log:
            self.log.log("downlink", "N2", octets, kind, tuple(
                f"{c.machine} {c.pre_state}->{c.post_state}" for c in checks if c.post_state
            ))
        pdu._trace_entry = entry  # let the dispatcher append resource checks
        return pdu

    # -- interface management -------------------------------------------------

    def setup(self, timeout: float | None = None) -> SetupOutcome:
        """Register this node with the core (NG interface establishment)."""
        if self.ctx.ngc != NgcState.INACTIVE:
            raise RuntimeError(f"interface setup from state {self.ctx.ngc}")
        request = ng_setup_request(
            self.ctx.node_id, self.ctx.tais, node_name=self.ctx.name
        )
        self._awaited = _SETUP_AWAITED
        check = self._ngc_event(str(NgapKind.NG_SETUP_REQUEST), fsm.SENT)
        self._send(request, checks=(check,))
        try:
            pdu = self._recv(timeout if timeout is not None else self.guard)
        except TransportTimeout:
            return SetupOutcome(state=self.ctx.ngc, timed_out=True)
        finally:
            self._awaited = _STEADY_AWAITED
        if pdu is None:
            return SetupOutcome(state=self.ctx.ngc, timed_out=False)
        if pdu.kind == NgapKind.NG_SETUP_RESPONSE:
            self.ctx.amf_name = pdu.ie(IeId.AMF_NAME)
            self.ctx.amf_capacity = pdu.ie(IeId.RELATIVE_AMF_CAPACITY)
            self.ctx.amf_plmn_support = pdu.ie(IeId.PLMN_SUPPORT_LIST) or []
            return SetupOutcome(state=self.ctx.ngc, amf_name=self.ctx.amf_name)
        if pdu.kind == NgapKind.NG_SETUP_FAILURE:
            return SetupOutcome(state=self.ctx.ngc, failure_cause=pdu.ie(IeId.CAUSE))
        return SetupOutcome(state=self.ctx.ngc)

    # -- NAS forwarding --------------------------------------------------------

    def send_initial_nas(self, binding: UeBinding, nas: bytes) -> None:
        self._send(initial_ue_message(binding.ran_ue_ngap_id, nas, self.user_location()))

    def send_uplink_nas(self, binding: UeBinding, nas: bytes) -> None:
        if binding.amf_ue_ngap_id is None:
            raise RuntimeError("no AMF UE id bound yet; initial message not answered")
        self._send(
            uplink_nas_transport(
                binding.amf_ue_ngap_id, binding.ran_ue_ngap_id, nas, self.user_location()
            )
        )

    def next_nas(self, binding: UeBinding, timeout: float) -> bytes | None:
        """Pump the association until a NAS payload for this UE arrives."""
        import time as _time

        deadline = _time.monotonic() + timeout
        while True:
            if binding.nas_queue:
                return binding.nas_queue.popleft()
            remaining = deadline - _time.monotonic()
            if remaining <= 0:
                return None
            try:
                pdu = self._recv(remaining)
            except TransportTimeout:
                return None
            if pdu is not None:
                self.dispatch(pdu)

    # -- downlink dispatch -------------------------------------------------------

    def dispatch(self, pdu: NgapPdu) -> None:
        kind = pdu.kind
        if kind == NgapKind.DOWNLINK_NAS_TRANSPORT:
            self._on_downlink_nas(pdu)
        elif kind == NgapKind.INITIAL_CONTEXT_SETUP_REQUEST:
            self._on_context_setup(pdu)
        elif kind == NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST:
            self._on_session_setup(pdu)
        # anything else is recorded in the trace and ignored here

    def _binding_for(self, pdu: NgapPdu) -> UeBinding | None:
        ran_ue = pdu.ie(IeId.RAN_UE_NGAP_ID)
        binding = self.ctx.ue_bindings.get(ran_ue)
        if binding is None:
            return None
        amf_ue = pdu.ie(IeId.AMF_UE_NGAP_ID)
        if amf_ue is not None:
            binding.amf_ue_ngap_id = amf_ue
        return binding

    def _on_downlink_nas(self, pdu: NgapPdu) -> None:
        binding = self._binding_for(pdu)
        if binding is None:
            return
        nas = pdu.nas_pdu
        if nas:
            binding.nas_queue.append(nas)

    def _build_session_responses(
        self, binding: UeBinding, items: list[PduResourceItem]
    ) -> list[PduResourceItem]:
        """Allocate local tunnels for requested sessions; queue their NAS."""
        responses: list[PduResourceItem] = []
        for item in items:
            if item.nas_pdu:
                binding.nas_queue.append(item.nas_pdu)
            transfer = item.transfer
            if not isinstance(transfer, SetupRequestTransfer):
                continue
            resource = self.ctx.resources.setdefault(
                (binding.ran_ue_ngap_id, item.pdu_session_id), ResourceBinding()
            )
            resource.peer_teid = transfer.teid
            resource.peer_address = transfer.address
            resource.local_teid = self.allocate_teid()
            resource.qos_flow_ids = tuple(f.qfi for f in transfer.qos_flows) or (1,)
            self.gtpu.bind_tunnel(
                resource.local_teid, resource.peer_teid, (resource.peer_address, self.upf_port)
            )
            responses.append(
                PduResourceItem(
                    pdu_session_id=item.pdu_session_id,
                    transfer=SetupResponseTransfer(
                        teid=resource.local_teid,
                        address=self.gtpu.address,
                        qos_flow_ids=resource.qos_flow_ids,
                    ),
                )
            )
        return responses

    def _on_context_setup(self, pdu: NgapPdu) -> None:
        binding = self._binding_for(pdu)
        if binding is None:
            return
        binding.security_key = pdu.ie(IeId.SECURITY_KEY)
        items = pdu.ie(IeId.SETUP_LIST_CXT_REQ) or []
        entry = getattr(pdu, "_trace_entry", None)
        recv_checks = []
        for item in items:
            recv_checks.append(
                self._resource_event(
                    binding.ran_ue_ngap_id,
                    item.pdu_session_id,
                    str(NgapKind.INITIAL_CONTEXT_SETUP_REQUEST),
                    fsm.RECEIVED,
                    None,
                )
            )
        if entry is not None and recv_checks:
            entry.fsm_checks = entry.fsm_checks + tuple(recv_checks)
        if pdu.nas_pdu:
            binding.nas_queue.append(pdu.nas_pdu)
        responses = self._build_session_responses(binding, items)
        send_checks = tuple(
            self._resource_event(
                binding.ran_ue_ngap_id,
                item.pdu_session_id,
                str(NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE),
                fsm.SENT,
                "success",
            )
            for item in responses
        )
        self._send(
            initial_context_setup_response(
                binding.amf_ue_ngap_id, binding.ran_ue_ngap_id, responses or None
            ),
            checks=send_checks,
        )

    def _on_session_setup(self, pdu: NgapPdu) -> None:
        binding = self._binding_for(pdu)
        if binding is None:
            return
        items = pdu.ie(IeId.SETUP_LIST_SU_REQ) or []
        entry = getattr(pdu, "_trace_entry", None)
        recv_checks = [
            self._resource_event(
                binding.ran_ue_ngap_id,
                item.pdu_session_id,
                str(NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST),
                fsm.RECEIVED,
                None,
            )
            for item in items
        ]
        if entry is not None and recv_checks:
            entry.fsm_checks = entry.fsm_checks + tuple(recv_checks)
        if pdu.nas_pdu:
            binding.nas_queue.append(pdu.nas_pdu)
        responses = self._build_session_responses(binding, items)
        send_checks = tuple(
            self._resource_event(
                binding.ran_ue_ngap_id,
                item.pdu_session_id,
                str(NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE),
                fsm.SENT,
                "success",
            )
            for item in responses
        )
        self._send(
            pdu_session_resource_setup_response(
                binding.amf_ue_ngap_id, binding.ran_ue_ngap_id, responses or None
            ),
            checks=send_checks,
        )

    # -- user plane ----------------------------------------------------------------

    def userplane_send(
        self, binding: UeBinding, psi: int, payload: bytes, timeout: float = 2.0
    ) -> bytes | None:
        """Push one G-PDU up the tunnel and wait for the downlink echo."""
        resource = self.ctx.resources.get((binding.ran_ue_ngap_id, psi))
        if resource is None or resource.state != PduResourceState.ACTIVE:
            return None
        self.gtpu.send(
            resource.peer_teid, payload, (resource.peer_address, self.upf_port)
        )
        try:
            teid, inner, _peer = self.gtpu.recv(timeout)
        except TransportTimeout:
            return None
        if teid != resource.local_teid:
            return None
        return inner
