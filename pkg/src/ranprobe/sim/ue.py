"""Simulated UE: registration, session establishment, and user-plane flows.

A flow is a synchronous script: build a message, apply any armed
mutations, protect, hand it to the gNodeB agent, then pump for downlink
NAS until the flow reaches a terminal outcome or the guard timer fires.
Every message in or out lands in the shared flow trace.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .. import fsm
from ..fsm import FsmEvent, GmmState, GsmState, IllegalTransition, PduResourceState
from ..msglog import MessageLog
from ..nas import (
    AuthenticationFailure,
    AuthenticationResponse,
    IdentityKind,
    IdentityResponse,
    MessageKind,
    MobileIdentity,
    MmCause,
    NasDecodeError,
    NasMessage,
    PduSessionEstablishmentRequest,
    RegistrationComplete,
    RegistrationRequest,
    RequestType,
    SecurityHeader,
    SecurityModeComplete,
    SecurityModeReject,
    Snssai,
    UeSecurityCapability,
    UlNasTransport,
    decode_gsm,
    decode_nas,
    encode_gsm,
    encode_nas,
    validate_mandatory,
)
from ..nas.ies import Guti
from ..security import (
    AkaSuccess,
    MacFailure,
    SecurityContext,
    SyncFailure,
    build_auts,
    conceal_supi,
    derive_key_hierarchy,
    serving_network_name,
    verify_autn_or_resync,
)
from ..security.aka import UsimCredentials
from ..security.context import DOWNLINK, UPLINK, CipherAlg, IntegrityAlg
from .gnb import GnbAgent, UeBinding
from .mutation import MutationSet
from .trace import IN, OUT, FlowTrace, FsmCheck

_K = MessageKind  # shorthand for awaited-kind tuples


class PreconditionError(RuntimeError):
    pass


@dataclass
class SessionState:
    gsm: GsmState = GsmState.INACTIVE
    snssai: Snssai | None = None
    dnn: str | None = None
    pdu_address: str | None = None
    qos: bytes = b""


@dataclass
class UeContext:
    creds: UsimCredentials
    imeisv: str = "4370816125816151"
    requested_nssai: list[Snssai] = field(default_factory=lambda: [Snssai(1)])
    capability: UeSecurityCapability = field(default_factory=UeSecurityCapability)
    guti: Guti | None = None
    sec: SecurityContext | None = None
    gmm: GmmState = GmmState.DEREGISTERED
    sessions: dict[int, SessionState] = field(default_factory=dict)
    retransmission_buffer: bytes | None = None

    @property
    def suci(self) -> MobileIdentity:
        return conceal_supi(self.creds.supi)


@dataclass
class RegistrationOutcome:
    status: str  # registered | rejected | auth_failed | timeout
    gmm: GmmState
    guti: Guti | None = None
    cause: int | None = None
    config_update_seen: bool = False
    identity_exchange_seen: bool = False
    trace: FlowTrace | None = None
    notes: list[str] = field(default_factory=list)


@dataclass
class SessionOutcome:
    status: str  # active | rejected | not_forwarded | timeout
    psi: int
    gsm: GsmState
    resource: PduResourceState = PduResourceState.INACTIVE
    pdu_address: str | None = None
    local_teid: bytes = b""
    peer_teid: bytes = b""
    cause: int | None = None
    trace: FlowTrace | None = None


@dataclass
class UserPlaneOutcome:
    status: str  # delivered | no_tunnel | timeout
    echoed: bytes | None = None


@dataclass
class MisorderedOutcome:
    """Result of answering the mode command with an early session request."""

    smc_times: list[float] = field(default_factory=list)
    rejected: bool = False
    early_session_accept: bool = False
    accepted_anyway: bool = False
    trace: FlowTrace | None = None


class UeAgent:
    def __init__(
        self,
        ctx: UeContext,
        gnb: GnbAgent,
        guard: float = 5.0,
        config_update_wait: float = 0.5,
        log: MessageLog | None = None,
    ):
        self.ctx = ctx
        self.gnb = gnb
        self.guard = guard
        self.config_update_wait = config_update_wait
        self.log = log
        self.binding: UeBinding = gnb.allocate_ue()
        self.trace: FlowTrace = gnb.trace
        self.snn = serving_network_name(ctx.creds.mcc, ctx.creds.mnc)
        self._pending_aka: tuple[AkaSuccess, bytes] | None = None
        self._next_psi = 1

    # -- trace/log helpers ------------------------------------------------------

    def _gmm_check(self, kind: str, direction: str) -> tuple[FsmCheck, ...]:
        event = FsmEvent(message=kind, direction=direction, side=fsm.UE)
        if not fsm.gmm_event_has_arc(event):
            return ()
        pre = self.ctx.gmm
        post: str | None
        try:
            self.ctx.gmm = fsm.gmm_step(pre, event)
            post = self.ctx.gmm.value
        except IllegalTransition:
            post = None
        return (FsmCheck(machine="5GMM", pre_state=pre.value, event=event, post_state=post),)

    def _gsm_check(self, psi: int, kind: str, direction: str) -> tuple[FsmCheck, ...]:
        event = FsmEvent(message=kind, direction=direction, side=fsm.UE)
        if not fsm.gsm_event_has_arc(event):
            return ()
        session = self.ctx.sessions.setdefault(psi, SessionState())
        pre = session.gsm
        post: str | None
        try:
            session.gsm = fsm.gsm_step(pre, event)
            post = session.gsm.value
        except IllegalTransition:
            post = None
        return (
            FsmCheck(machine=f"5GSM[{psi}]", pre_state=pre.value, event=event, post_state=post),
        )

    def _log(self, direction: str, octets: bytes, summary: str, checks=()) -> None:
        if self.log:
            self.log.log(
                "uplink" if direction == OUT else "downlink",
                "N1",
                octets,
                summary,
                tuple(f"{c.machine} {c.pre_state}->{c.post_state}" for c in checks if c.post_state),
            )

    # -- send path -------------------------------------------------------------

    def _send_plain(self, body, mutations: MutationSet, initial: bool = False) -> None:
        kind = str(body.kind)
        body, unchecked, skip_state, raw = mutations.apply(kind, body)
        octets = raw if raw is not None else encode_nas(NasMessage(body=body), unchecked=unchecked)
        checks = () if skip_state else self._gmm_check(kind, fsm.SENT)
        self.trace.add("N1", OUT, kind=kind, raw=octets, fsm_checks=checks)
        self._log(OUT, octets, kind, checks)
        if initial:
            self.gnb.send_initial_nas(self.binding, octets)
        else:
            self.gnb.send_uplink_nas(self.binding, octets)

    def _send_protected(
        self,
        body,
        mutations: MutationSet,
        new_context: bool = False,
        extra_checks: tuple[FsmCheck, ...] = (),
    ) -> None:
        if self.ctx.sec is None:
            raise PreconditionError("no security context to protect with")
        kind = str(body.kind)
        body, unchecked, skip_state, raw = mutations.apply(kind, body)
        if raw is not None:
            octets = raw
        else:
            octets = self.ctx.sec.protect(
                NasMessage(body=body), UPLINK, new_context=new_context, unchecked=unchecked
            )
        checks = extra_checks
        if not skip_state:
            checks = checks + self._gmm_check(kind, fsm.SENT)
        self.trace.add("N1", OUT, kind=kind, raw=octets, protected=True, fsm_checks=checks)
        self._log(OUT, octets, kind, checks)
        self.gnb.send_uplink_nas(self.binding, octets)

    # -- receive path -------------------------------------------------------------

    def _recv(self, timeout: float, awaited: tuple[str, ...]) -> NasMessage | None:
        octets = self.gnb.next_nas(self.binding, timeout)
        if octets is None:
            return None
        mac_valid: bool | None = None
        try:
            msg = decode_nas(octets)
            if msg.security_header != SecurityHeader.PLAIN and self.ctx.sec is not None:
                msg, mac_valid = self.ctx.sec.unprotect(octets, DOWNLINK)
        except NasDecodeError as exc:
            self.trace.add(
                "N1", IN, kind=None, raw=octets, decode_error=str(exc), awaited=awaited
            )
            self._log(IN, octets, f"undecodable: {exc}")
            return None
        kind = str(msg.kind)
        checks = self._gmm_check(kind, fsm.RECEIVED)
        entry = self.trace.add(
            "N1",
            IN,
            kind=kind,
            raw=octets,
            protected=msg.protected,
            mac_valid=mac_valid,
            awaited=awaited,
            validation=validate_mandatory(msg),
            fsm_checks=checks,
        )
        self._log(IN, octets, kind, checks)
        msg._trace_entry = entry  # type: ignore[attr-defined]
        msg._raw_octets = octets  # type: ignore[attr-defined]
        return msg

    def _trace_gsm_in(self, transport_msg: NasMessage, awaited: tuple[str, ...]):
        """Decode and trace the 5GSM message nested in a downlink transport."""
        payload = getattr(transport_msg.body, "payload", None)
        if not payload:
            return None
        try:
            body = decode_gsm(payload)
        except NasDecodeError as exc:
            self.trace.add(
                "N1", IN, kind=None, raw=payload, decode_error=str(exc), awaited=awaited
            )
            return None
        checks = self._gsm_check(body.pdu_session_id, str(body.kind), fsm.RECEIVED)
        self.trace.add(
            "N1",
            IN,
            kind=str(body.kind),
            raw=payload,
            protected=transport_msg.protected,
            awaited=awaited,
            validation=validate_mandatory(body),
            fsm_checks=checks,
        )
        return body

    # -- registration -----------------------------------------------------------

    def _build_registration_request(self, identity: str) -> RegistrationRequest:
        if identity == "guti":
            ident = MobileIdentity(
                kind=IdentityKind.FIVEG_GUTI,
                guti=self.ctx.guti
                or Guti(
                    mcc=self.ctx.creds.mcc,
                    mnc=self.ctx.creds.mnc,
                    amf_region_id=1,
                    amf_set_id=1,
                    amf_pointer=0,
                    tmsi=os.urandom(4),
                ),
            )
        else:
            ident = self.ctx.suci
        return RegistrationRequest(
            mobile_identity=ident, security_capability=self.ctx.capability
        )

    def register(
        self,
        mutations: MutationSet | None = None,
        identity: str = "suci",
        force_sync_failure: bool = False,
        corrupt_res_star: bool = False,
        wait_config_update: float | None = None,
    ) -> RegistrationOutcome:
        """Drive initial registration to a terminal outcome.

        ``identity`` may be "suci" or "guti" (a temporary identifier the
        core will not know, provoking the identification exchange).
        """
        if self.ctx.gmm != GmmState.DEREGISTERED:
            raise PreconditionError(f"registration from {self.ctx.gmm}")
        mutations = mutations or MutationSet()
        outcome = RegistrationOutcome(status="timeout", gmm=self.ctx.gmm, trace=self.trace)

        clear = self._build_registration_request(identity)
        full = RegistrationRequest(
            mobile_identity=clear.mobile_identity,
            security_capability=self.ctx.capability,
            requested_nssai=list(self.ctx.requested_nssai),
        )
        self.ctx.retransmission_buffer = encode_nas(NasMessage(body=full))
        self._send_plain(clear, mutations, initial=True)

        force_sync = force_sync_failure
        deadline = time.monotonic() + self.guard
        awaited: tuple[str, ...] = (
            str(_K.IDENTITY_REQUEST),
            str(_K.AUTHENTICATION_REQUEST),
            str(_K.REGISTRATION_REJECT),
        )
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                outcome.status = "timeout"
                break
            msg = self._recv(remaining, awaited)
            if msg is None:
                continue
            kind = msg.kind
            if kind == _K.IDENTITY_REQUEST:
                self._answer_identity(msg, mutations)
            elif kind == _K.AUTHENTICATION_REQUEST:
                if force_sync:
                    force_sync = False
                    auts = build_auts(self.ctx.creds, msg.body.rand or bytes(16))
                    self._send_plain(
                        AuthenticationFailure(cause=MmCause.SYNCH_FAILURE, auts=auts), mutations
                    )
                    continue
                if not self._answer_challenge(msg, mutations, corrupt_res_star):
                    awaited = (str(_K.AUTHENTICATION_REJECT), str(_K.REGISTRATION_REJECT))
                    continue
                awaited = (
                    str(_K.SECURITY_MODE_COMMAND),
                    str(_K.AUTHENTICATION_REQUEST),
                    str(_K.AUTHENTICATION_REJECT),
                    str(_K.REGISTRATION_REJECT),
                )
            elif kind == _K.AUTHENTICATION_REJECT:
                outcome.status = "auth_failed"
                break
            elif kind == _K.SECURITY_MODE_COMMAND:
                if not self._answer_mode_command(msg, mutations):
                    continue
                awaited = (
                    str(_K.REGISTRATION_ACCEPT),
                    str(_K.REGISTRATION_REJECT),
                    str(_K.IDENTITY_REQUEST),
                    str(_K.SECURITY_MODE_COMMAND),
                )
            elif kind == _K.REGISTRATION_ACCEPT:
                guti_ident = msg.body.guti
                if guti_ident is not None and guti_ident.guti is not None:
                    self.ctx.guti = guti_ident.guti
                self._send_protected(RegistrationComplete(), mutations)
                outcome.status = "registered"
                outcome.config_update_seen = self._await_config_update(
                    self.config_update_wait if wait_config_update is None else wait_config_update
                )
                break
            elif kind == _K.REGISTRATION_REJECT:
                outcome.status = "rejected"
                outcome.cause = msg.body.cause
                break
            else:
                entry = getattr(msg, "_trace_entry", None)
                if entry is not None:
                    entry.note = "unexpected during registration"
        outcome.gmm = self.ctx.gmm
        outcome.guti = self.ctx.guti
        outcome.identity_exchange_seen = bool(self.trace.received(str(_K.IDENTITY_REQUEST)))
        mutations.assert_all_consumed()
        return outcome

    def _answer_identity(self, msg: NasMessage, mutations: MutationSet) -> None:
        wanted = msg.body.identity_type
        if wanted == IdentityKind.IMEISV:
            ident = MobileIdentity(kind=IdentityKind.IMEISV, imeisv=self.ctx.imeisv)
        else:
            ident = self.ctx.suci
        response = IdentityResponse(mobile_identity=ident)
        if self.ctx.sec is not None and self.ctx.sec.active:
            self._send_protected(response, mutations)
        else:
            self._send_plain(response, mutations)

    def _answer_challenge(
        self, msg: NasMessage, mutations: MutationSet, corrupt: bool
    ) -> bool:
        body = msg.body
        rand, autn = body.rand or b"", body.autn or b""
        result = verify_autn_or_resync(self.ctx.creds, rand, autn)
        if isinstance(result, MacFailure):
            self._send_plain(AuthenticationFailure(cause=MmCause.MAC_FAILURE), mutations)
            return False
        if isinstance(result, SyncFailure):
            self._send_plain(
                AuthenticationFailure(cause=MmCause.SYNCH_FAILURE, auts=result.auts), mutations
            )
            return False
        self._pending_aka = (result, rand)
        res_star = derive_key_hierarchy(
            result.ck, result.ik, self.snn, rand, result.res, result.sqn_xor_ak,
            self.ctx.creds.supi,
        )["res_star"]
        if corrupt:
            res_star = bytes(b ^ 0xFF for b in res_star)
        self._send_plain(AuthenticationResponse(response=res_star), mutations)
        return True

    def _answer_mode_command(self, msg: NasMessage, mutations: MutationSet) -> bool:
        """Derive the context, verify the command, reply with the complete."""
        body = msg.body
        entry = getattr(msg, "_trace_entry", None)
        if self._pending_aka is None:
            if entry is not None:
                entry.note = "mode command before authentication"
            return False
        aka, rand = self._pending_aka
        try:
            alg_int = IntegrityAlg(body.integrity_alg)
            alg_enc = CipherAlg(body.ciphering_alg)
        except ValueError:
            self.ctx.sec = None
            self._send_plain(
                SecurityModeReject(cause=MmCause.PROTOCOL_ERROR_UNSPECIFIED), mutations
            )
            return False
        keys = derive_key_hierarchy(
            aka.ck, aka.ik, self.snn, rand, aka.res, aka.sqn_xor_ak, self.ctx.creds.supi,
            enc_alg=body.ciphering_alg, int_alg=body.integrity_alg,
        )
        ctx = SecurityContext(
            k_amf=keys["kamf"],
            k_nas_int=keys["k_nas_int"],
            k_nas_enc=keys["k_nas_enc"],
            k_gnb=keys["k_gnb"],
            alg_int=alg_int,
            alg_enc=alg_enc,
        )
        raw = getattr(msg, "_raw_octets", b"")
        _inner, mac_ok = ctx.unprotect(raw, DOWNLINK)
        if entry is not None:
            entry.mac_valid = mac_ok
            if body.replayed_capability != self.ctx.capability:
                entry.note = "replayed capabilities differ from the ones sent"
        if not mac_ok:
            return False

        complete = SecurityModeComplete()
        if body.imeisv_request:
            complete.imeisv = MobileIdentity(kind=IdentityKind.IMEISV, imeisv=self.ctx.imeisv)
        if body.retransmission_requested:
            complete.nas_container = self.ctx.retransmission_buffer
        self.ctx.sec = ctx
        self._send_protected(complete, mutations, new_context=True)
        ctx.active = True
        return True

    def _await_config_update(self, window: float) -> bool:
        if window <= 0:
            return False
        deadline = time.monotonic() + window
        awaited = (str(_K.CONFIGURATION_UPDATE_COMMAND),)
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return False
            msg = self._recv(remaining, awaited)
            if msg is not None and msg.kind == _K.CONFIGURATION_UPDATE_COMMAND:
                return True

    # -- session establishment ------------------------------------------------------

    def establish_session(
        self,
        dnn: str = "internet",
        snssai: Snssai | None = None,
        mutations: MutationSet | None = None,
        skip_registered_guard: bool = False,
    ) -> SessionOutcome:
        """Request one PDU session and follow it to Active or a reject."""
        if self.ctx.gmm != GmmState.REGISTERED and not skip_registered_guard:
            raise PreconditionError(f"session request from {self.ctx.gmm}")
        if self.ctx.sec is None:
            raise PreconditionError("session request without a security context")
        mutations = mutations or MutationSet()
        snssai = snssai or self.ctx.requested_nssai[0]
        psi = self._next_psi
        self._next_psi += 1
        session = self.ctx.sessions.setdefault(psi, SessionState())
        session.snssai, session.dnn = snssai, dnn
        outcome = SessionOutcome(status="timeout", psi=psi, gsm=session.gsm, trace=self.trace)

        request = PduSessionEstablishmentRequest(pdu_session_id=psi, pti=1)
        request, unchecked, _skip, _raw = mutations.apply(str(request.kind), request)
        payload = encode_gsm(request, unchecked=unchecked)
        gsm_checks = self._gsm_check(psi, str(request.kind), fsm.SENT)
        self.trace.add(
            "N1", OUT, kind=str(request.kind), raw=payload, fsm_checks=gsm_checks
        )
        transport = UlNasTransport(
            payload=payload,
            pdu_session_id=psi,
            request_type=RequestType.INITIAL_REQUEST,
            snssai=snssai,
            dnn=dnn,
        )
        self._send_protected(transport, mutations)

        deadline = time.monotonic() + self.guard
        awaited = (str(_K.DL_NAS_TRANSPORT),)
        nested_awaited = (
            str(_K.PDU_SESSION_ESTABLISHMENT_ACCEPT),
            str(_K.PDU_SESSION_ESTABLISHMENT_REJECT),
        )
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                outcome.status = "timeout"
                break
            msg = self._recv(remaining, awaited)
            if msg is None:
                continue
            if msg.kind != _K.DL_NAS_TRANSPORT:
                entry = getattr(msg, "_trace_entry", None)
                if entry is not None:
                    entry.note = "unexpected during session establishment"
                continue
            if msg.body.mm_cause == MmCause.PAYLOAD_NOT_FORWARDED:
                # the unforwarded request itself rides back in the container
                self._trace_gsm_in(
                    msg, nested_awaited + (str(_K.PDU_SESSION_ESTABLISHMENT_REQUEST),)
                )
                outcome.status = "not_forwarded"
                outcome.cause = int(msg.body.mm_cause)
                break
            nested = self._trace_gsm_in(msg, nested_awaited)
            if nested is None:
                continue
            if nested.kind == _K.PDU_SESSION_ESTABLISHMENT_ACCEPT:
                outcome.status = "active"
                session.qos = nested.qos_rules or b""
                if nested.pdu_address and len(nested.pdu_address) == 5:
                    outcome.pdu_address = ".".join(str(b) for b in nested.pdu_address[1:])
                    session.pdu_address = outcome.pdu_address
                break
            if nested.kind == _K.PDU_SESSION_ESTABLISHMENT_REJECT:
                outcome.status = "rejected"
                outcome.cause = nested.cause
                break

        resource = self.gnb.ctx.resources.get((self.binding.ran_ue_ngap_id, psi))
        if resource is not None:
            outcome.resource = resource.state
            outcome.local_teid = resource.local_teid
            outcome.peer_teid = resource.peer_teid
        outcome.gsm = session.gsm
        mutations.assert_all_consumed()
        return outcome

    # -- user plane ----------------------------------------------------------------

    def userplane_send(self, psi: int, payload: bytes, timeout: float = 2.0) -> UserPlaneOutcome:
        resource = self.gnb.ctx.resources.get((self.binding.ran_ue_ngap_id, psi))
        if resource is None or resource.state != PduResourceState.ACTIVE:
            return UserPlaneOutcome(status="no_tunnel")
        echoed = self.gnb.userplane_send(self.binding, psi, payload, timeout=timeout)
        if echoed is None:
            return UserPlaneOutcome(status="timeout")
        return UserPlaneOutcome(status="delivered", echoed=echoed)

    # -- deliberate misordering (flow-validation robustness) ---------------------------

    def register_with_early_session(
        self,
        dnn: str = "internet",
        snssai: Snssai | None = None,
        observe: float = 5.0,
    ) -> MisorderedOutcome:
        """Answer the mode command with a session request instead of the
        completion, then observe the core's retransmission behaviour."""
        if self.ctx.gmm != GmmState.DEREGISTERED:
            raise PreconditionError(f"registration from {self.ctx.gmm}")
        mutations = MutationSet()
        outcome = MisorderedOutcome(trace=self.trace)
        snssai = snssai or self.ctx.requested_nssai[0]

        clear = self._build_registration_request("suci")
        full = RegistrationRequest(
            mobile_identity=clear.mobile_identity,
            security_capability=self.ctx.capability,
            requested_nssai=list(self.ctx.requested_nssai),
        )
        self.ctx.retransmission_buffer = encode_nas(NasMessage(body=full))
        self._send_plain(clear, mutations, initial=True)

        deadline = time.monotonic() + self.guard
        awaited: tuple[str, ...] = (
            str(_K.AUTHENTICATION_REQUEST),
            str(_K.SECURITY_MODE_COMMAND),
            str(_K.REGISTRATION_REJECT),
        )
        sent_early = False
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            msg = self._recv(remaining, awaited)
            if msg is None:
                continue
            kind = msg.kind
            if kind == _K.AUTHENTICATION_REQUEST:
                self._answer_challenge(msg, mutations, corrupt=False)
            elif kind == _K.SECURITY_MODE_COMMAND:
                outcome.smc_times.append(time.monotonic())
                if not sent_early:
                    if not self._prepare_context_only(msg):
                        break
                    sent_early = True
                    psi = self._next_psi
                    self._next_psi += 1
                    request = PduSessionEstablishmentRequest(pdu_session_id=psi, pti=1)
                    payload = encode_gsm(request)
                    gsm_checks = self._gsm_check(psi, str(request.kind), fsm.SENT)
                    self.trace.add(
                        "N1", OUT, kind=str(request.kind), raw=payload, fsm_checks=gsm_checks
                    )
                    transport = UlNasTransport(
                        payload=payload,
                        pdu_session_id=psi,
                        request_type=RequestType.INITIAL_REQUEST,
                        snssai=snssai,
                        dnn=dnn,
                    )
                    # deliberately out of order: the registration is not
                    # complete, so bypass the agent's own state guard
                    self._send_protected(transport, mutations, new_context=True)
                    deadline = time.monotonic() + observe
                    awaited = (
                        str(_K.SECURITY_MODE_COMMAND),
                        str(_K.REGISTRATION_REJECT),
                    )
            elif kind == _K.DL_NAS_TRANSPORT:
                nested = self._trace_gsm_in(msg, awaited)
                if nested is not None and nested.kind == _K.PDU_SESSION_ESTABLISHMENT_ACCEPT:
                    outcome.early_session_accept = True
            elif kind == _K.REGISTRATION_REJECT:
                outcome.rejected = True
                break
            elif kind == _K.REGISTRATION_ACCEPT:
                outcome.accepted_anyway = True
                break
        return outcome

    def _prepare_context_only(self, msg: NasMessage) -> bool:
        """Derive and install the security context without completing."""
        body = msg.body
        if self._pending_aka is None:
            return False
        aka, rand = self._pending_aka
        try:
            alg_int = IntegrityAlg(body.integrity_alg)
            alg_enc = CipherAlg(body.ciphering_alg)
        except ValueError:
            return False
        keys = derive_key_hierarchy(
            aka.ck, aka.ik, self.snn, rand, aka.res, aka.sqn_xor_ak, self.ctx.creds.supi,
            enc_alg=body.ciphering_alg, int_alg=body.integrity_alg,
        )
        ctx = SecurityContext(
            k_amf=keys["kamf"],
            k_nas_int=keys["k_nas_int"],
            k_nas_enc=keys["k_nas_enc"],
            k_gnb=keys["k_gnb"],
            alg_int=alg_int,
            alg_enc=alg_enc,
        )
        raw = getattr(msg, "_raw_octets", b"")
        _inner, mac_ok = ctx.unprotect(raw, DOWNLINK)
        if not mac_ok:
            return False
        self.ctx.sec = ctx
        return True
