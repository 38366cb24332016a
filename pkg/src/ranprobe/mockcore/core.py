"""Reference AMF/SMF/UPF responder.

Implements the expected core-side behaviour for every flow the test
catalog exercises, so the tester can be verified in loopback.  One
reactor thread per signaling association plus one user-plane echo
thread; per-UE state lives with its association's reactor.

The responder never raises on malformed input: undecodable or
out-of-place traffic is answered per the defensive rules or logged and
dropped.
"""

from __future__ import annotations

import logging
import random
import threading
import time
from dataclasses import dataclass, field

from .. import fsm
from ..fsm import FsmEvent, GmmState, GsmState, IllegalTransition, NgcState, PduResourceState
from ..nas import (
    AuthenticationReject,
    AuthenticationRequest,
    ConfigurationUpdateCommand,
    DlNasTransport,
    IdentityRequest,
    MessageKind,
    MmCause,
    NasDecodeError,
    NasMessage,
    PduSessionEstablishmentAccept,
    PduSessionEstablishmentReject,
    RegistrationAccept,
    RegistrationReject,
    SecurityHeader,
    SecurityModeCommand,
    SmCause,
    decode_gsm,
    decode_nas,
    encode_gsm,
    encode_nas,
    validate_mandatory,
)
from ..nas.ies import Guti, IdentityKind, MobileIdentity, Snssai
from ..ngap import (
    Cause,
    CauseMisc,
    CauseProtocol,
    Criticality,
    Guami,
    IeId,
    NgapDecodeError,
    NgapKind,
    NgapPdu,
    PduResourceItem,
    PlmnSupport,
    QosFlowItem,
    RawNgapIe,
    ServedGuami,
    SetupRequestTransfer,
    SetupResponseTransfer,
    decode_ngap,
    downlink_nas_transport,
    encode_ngap,
    initial_context_setup_request,
    ng_setup_failure,
    ng_setup_response,
    pdu_session_resource_setup_request,
    validate_ies,
)
from ..ngap.ies import UeSecurityCapsIe
from ..security import (
    SecurityContext,
    UsimCredentials,
    derive_key_hierarchy,
    generate_vector,
    recover_sqn_from_auts,
    serving_network_name,
)
from ..security.context import DOWNLINK, UPLINK, CipherAlg, IntegrityAlg
from ..security.suci import reveal_supi
from ..transport import (
    GtpuEndpoint,
    NgcAssociation,
    NgcListener,
    TransportError,
    TransportTimeout,
)
from .config import CoreConfig

log = logging.getLogger("ranprobe.mockcore")

_QOS_RULES_DEFAULT = bytes.fromhex("010006313101010901")  # one match-all rule, QFI 1
_SESSION_AMBR_DEFAULT = bytes.fromhex("06007d06007d")  # symmetric default rate


class BindFailure(TransportError):
    pass


class Phase:
    AWAIT_REGISTRATION = "await_registration"
    AWAIT_IDENTITY = "await_identity"
    AWAIT_AUTH = "await_auth"
    AWAIT_SMC_COMPLETE = "await_smc_complete"
    AWAIT_IMEISV = "await_imeisv"
    AWAIT_REG_COMPLETE = "await_reg_complete"
    REGISTERED = "registered"
    DONE = "done"


@dataclass
class CoreSession:
    gsm: GsmState = GsmState.INACTIVE
    resource: PduResourceState = PduResourceState.INACTIVE
    uplink_teid: bytes = b""
    downlink_teid: bytes = b""
    ran_address: str = ""
    pdu_address: str = ""
    snssai: Snssai | None = None
    dnn: str = ""


@dataclass
class CoreUeState:
    ran_ue: int
    amf_ue: int
    phase: str = Phase.AWAIT_REGISTRATION
    gmm: GmmState = GmmState.DEREGISTERED
    supi: str | None = None
    creds: UsimCredentials | None = None
    vector: object = None
    sec: SecurityContext | None = None
    registration_request: object = None  # decoded clear request
    smc_body: SecurityModeCommand | None = None
    smc_deadline: float | None = None
    smc_attempts: int = 0
    imeisv: str | None = None
    guti_tmsi: bytes = b""
    sessions: dict[int, CoreSession] = field(default_factory=dict)
    context_setup_done: bool = False


@dataclass
class DebugCounters:
    mac_failures: int = 0
    plain_after_secure: int = 0
    dropped_pdus: int = 0
    undecodable_nas: int = 0


class MockCore:
    """Loopback core; see :class:`CoreConfig` for the behaviour knobs."""

    def __init__(self, cfg: CoreConfig):
        self.cfg = cfg
        self.counters = DebugCounters()
        self._rng = random.Random(cfg.rng_seed)
        self._lock = threading.Lock()
        self._amf_ue_counter = 0
        self._teid_counter = 0x1000
        self._addr_counter = 1
        self._tmsi_counter = 0
        self._listener: NgcListener | None = None
        self._gtpu: GtpuEndpoint | None = None
        self._threads: list[threading.Thread] = []
        self._assocs: list[NgcAssociation] = []
        self._stop = threading.Event()
        self.debug_ues: dict[str, CoreUeState] = {}
        # uplink teid -> session, for the user-plane echo
        self._tunnels: dict[bytes, CoreSession] = {}

    # -- lifecycle -------------------------------------------------------------

    def serve(
        self,
        n2: tuple[str, int] = ("127.0.0.1", 0),
        n3: tuple[str, int] = ("127.0.0.1", 0),
        transport: str = "auto",
    ) -> "MockCore":
        try:
            self._listener = NgcListener(n2[0], n2[1], transport=transport)
            self._gtpu = GtpuEndpoint(address=n3[0], port=n3[1])
        except (TransportError, OSError) as exc:
            raise BindFailure(str(exc)) from exc
        accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        echo_thread = threading.Thread(target=self._echo_loop, daemon=True)
        self._threads += [accept_thread, echo_thread]
        accept_thread.start()
        echo_thread.start()
        return self

    @property
    def n2_address(self) -> tuple[str, int]:
        assert self._listener is not None
        return (self._listener.address, self._listener.port)

    @property
    def n3_address(self) -> tuple[str, int]:
        assert self._gtpu is not None
        return (self._gtpu.address, self._gtpu.port)

    @property
    def transport_name(self) -> str:
        assert self._listener is not None
        return self._listener.transport_name

    def shutdown(self) -> None:
        self._stop.set()
        if self._listener:
            self._listener.close()
        if self._gtpu:
            self._gtpu.close()
        for assoc in list(self._assocs):
            assoc.close()
        for thread in self._threads:
            thread.join(timeout=2.0)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                assoc = self._listener.accept(timeout=0.2)
            except TransportTimeout:
                continue
            except Exception:
                return
            self._assocs.append(assoc)
            reactor = threading.Thread(target=_Reactor(self, assoc).run, daemon=True)
            self._threads.append(reactor)
            reactor.start()

    def _echo_loop(self) -> None:
        while not self._stop.is_set():
            try:
                teid, inner, peer = self._gtpu.recv(timeout=0.2)
            except TransportTimeout:
                continue
            except Exception:
                if self._stop.is_set():
                    return
                continue
            session = self._tunnels.get(teid)
            if session is None or not session.downlink_teid:
                self.counters.dropped_pdus += 1
                log.info("dropping G-PDU for unknown teid %s", teid.hex())
                continue
            # echo back down the session's tunnel, toward the observed source
            self._gtpu.send(session.downlink_teid, inner, peer)

    # -- allocators -------------------------------------------------------------

    def next_amf_ue(self) -> int:
        with self._lock:
            self._amf_ue_counter += 1
            return self._amf_ue_counter

    def next_teid(self) -> bytes:
        with self._lock:
            self._teid_counter += 1
            return self._teid_counter.to_bytes(4, "big")

    def next_pdu_address(self) -> str:
        with self._lock:
            addr = f"{self.cfg.pdu_address_prefix}{self._addr_counter}"
            self._addr_counter += 1
            return addr

    def next_tmsi(self) -> bytes:
        with self._lock:
            self._tmsi_counter += 1
            base = self._rng.getrandbits(16) << 16
            return (base | self._tmsi_counter & 0xFFFF).to_bytes(4, "big")

    def next_rand(self) -> bytes:
        with self._lock:
            return bytes(self._rng.getrandbits(8) for _ in range(16))

    def subscriber(self, supi: str):
        return self.cfg.subscribers.get(supi)


class _Reactor:
    """Serves one signaling association."""

    def __init__(self, core: MockCore, assoc: NgcAssociation):
        self.core = core
        self.cfg = core.cfg
        self.assoc = assoc
        self.ngc = NgcState.INACTIVE
        self.ues: dict[int, CoreUeState] = {}

    # -- main loop ---------------------------------------------------------------

    def run(self) -> None:
        while not self.core._stop.is_set() and self.assoc.open:
            timeout = self._next_timer_slack()
            try:
                octets = self.assoc.recv(timeout)
            except TransportTimeout:
                self._fire_timers()
                continue
            except Exception:
                return
            try:
                self._handle(octets)
            except Exception:
                # robustness: a handler bug must not kill the responder
                log.exception("handler error; dropping PDU")
                self.core.counters.dropped_pdus += 1
            self._fire_timers()

    def _next_timer_slack(self) -> float:
        deadline = None
        for ue in self.ues.values():
            if ue.smc_deadline is not None:
                deadline = ue.smc_deadline if deadline is None else min(deadline, ue.smc_deadline)
        if deadline is None:
            return 0.2
        return max(0.0, min(0.2, deadline - time.monotonic()))

    def _fire_timers(self) -> None:
        now = time.monotonic()
        for ue in self.ues.values():
            if ue.smc_deadline is None or now < ue.smc_deadline:
                continue
            if ue.smc_attempts < self.cfg.sm_command_retries:
                ue.smc_attempts += 1
                ue.smc_deadline = ue.smc_deadline + self.cfg.sm_command_timer
                log.info("re-sending mode command (attempt %d)", ue.smc_attempts)
                self._send_smc(ue)
            else:
                ue.smc_deadline = None
                ue.phase = Phase.DONE
                self._send_nas(
                    ue, RegistrationReject(cause=MmCause.PROTOCOL_ERROR_UNSPECIFIED),
                    protected=True,
                )
                self._gmm(ue, str(MessageKind.REGISTRATION_REJECT), fsm.SENT)

    # -- helpers ----------------------------------------------------------------

    def _gmm(self, ue: CoreUeState, kind: str, direction: str) -> None:
        event = FsmEvent(message=kind, direction=direction, side=fsm.AMF)
        if not fsm.gmm_event_has_arc(event):
            return
        try:
            ue.gmm = fsm.gmm_step(ue.gmm, event)
        except IllegalTransition as exc:
            log.info("gmm: %s", exc)

    def _gsm(self, ue: CoreUeState, psi: int, kind: str, direction: str) -> None:
        event = FsmEvent(message=kind, direction=direction, side=fsm.AMF)
        if not fsm.gsm_event_has_arc(event):
            return
        session = ue.sessions.setdefault(psi, CoreSession())
        try:
            session.gsm = fsm.gsm_step(session.gsm, event)
        except IllegalTransition as exc:
            log.info("gsm[%d]: %s", psi, exc)

    def _resource(self, ue: CoreUeState, psi: int, kind: str, direction: str, qualifier) -> None:
        event = FsmEvent(message=kind, direction=direction, side=fsm.AMF, qualifier=qualifier)
        if not fsm.pdures_event_has_arc(event):
            return
        session = ue.sessions.setdefault(psi, CoreSession())
        try:
            session.resource = fsm.pdures_step(session.resource, event)
        except IllegalTransition as exc:
            log.info("resource[%d]: %s", psi, exc)

    def _send_pdu(self, pdu: NgapPdu) -> None:
        try:
            self.assoc.send(encode_ngap(pdu))
        except Exception as exc:
            log.info("send failed: %s", exc)

    def _send_nas(self, ue: CoreUeState, body, protected: bool, new_context: bool = False) -> None:
        if protected and ue.sec is not None:
            octets = ue.sec.protect(NasMessage(body=body), DOWNLINK, new_context=new_context)
        else:
            octets = encode_nas(NasMessage(body=body))
        self._send_pdu(downlink_nas_transport(ue.amf_ue, ue.ran_ue, octets))

    def _send_smc(self, ue: CoreUeState) -> None:
        if ue.smc_body is None or ue.sec is None:
            return
        octets = ue.sec.protect(
            NasMessage(body=ue.smc_body), DOWNLINK, new_context=True, cipher=False
        )
        self._send_pdu(downlink_nas_transport(ue.amf_ue, ue.ran_ue, octets))

    # -- NGAP dispatch -------------------------------------------------------------

    def _handle(self, octets: bytes) -> None:
        try:
            pdu = decode_ngap(octets)
        except NgapDecodeError as exc:
            self.core.counters.dropped_pdus += 1
            log.info("undecodable PDU ignored: %s", exc)
            return
        kind = pdu.kind
        if kind == NgapKind.NG_SETUP_REQUEST:
            self._on_ng_setup(pdu)
        elif kind == NgapKind.INITIAL_UE_MESSAGE:
            self._on_initial_ue(pdu)
        elif kind == NgapKind.UPLINK_NAS_TRANSPORT:
            self._on_uplink_nas(pdu)
        elif kind == NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE:
            self._on_context_response(pdu)
        elif kind == NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE:
            self._on_session_response(pdu)
        else:
            log.info("PDU %s ignored", kind)

    def _on_ng_setup(self, pdu: NgapPdu) -> None:
        event = FsmEvent(str(NgapKind.NG_SETUP_REQUEST), fsm.RECEIVED, fsm.AMF)
        try:
            self.ngc = fsm.ngc_step(self.ngc, event)
        except IllegalTransition as exc:
            log.info("ngc: %s", exc)

        report = validate_ies(pdu)
        reject_unknown = any(
            isinstance(ie.value, RawNgapIe) and ie.criticality == Criticality.REJECT
            for ie in pdu.ies
        )
        tas = pdu.ie(IeId.SUPPORTED_TA_LIST) or []
        plmn_ok = any(self.cfg.serves_plmn(ta.mcc, ta.mnc) for ta in tas)
        tac_ok = any(self.cfg.serves_tac(ta.tac) for ta in tas)
        slice_ok = any(self.cfg.serves_slice(s) for ta in tas for s in ta.slices)
        compatible = (
            not report.missing_mandatory
            and not reject_unknown
            and plmn_ok
            and tac_ok
            and slice_ok
        )
        if compatible:
            response = ng_setup_response(
                self.cfg.amf_name,
                [
                    ServedGuami(
                        Guami(
                            mcc=self.cfg.plmns[0][0],
                            mnc=self.cfg.plmns[0][1],
                            region_id=self.cfg.guami[0],
                            set_id=self.cfg.guami[1],
                            pointer=self.cfg.guami[2],
                        )
                    )
                ],
                self.cfg.relative_capacity,
                [
                    PlmnSupport(mcc=m, mnc=n, slices=tuple(self.cfg.slices))
                    for (m, n) in self.cfg.plmns
                ],
            )
            self.ngc = fsm.ngc_step(
                self.ngc, FsmEvent(str(NgapKind.NG_SETUP_RESPONSE), fsm.SENT, fsm.AMF)
            )
            self._send_pdu(response)
            return
        if self.cfg.ignore_bad_ngsetup:
            log.info("incompatible setup request silently ignored (toggle)")
            self.ngc = NgcState.INACTIVE
            return
        if reject_unknown or report.missing_mandatory:
            cause = Cause("protocol", CauseProtocol.ABSTRACT_SYNTAX_ERROR_REJECT)
        elif not slice_ok and plmn_ok and tac_ok:
            cause = Cause("radio_network", 39)  # slice not supported
        else:
            cause = Cause("misc", CauseMisc.UNKNOWN_PLMN)
        self.ngc = fsm.ngc_step(
            self.ngc, FsmEvent(str(NgapKind.NG_SETUP_FAILURE), fsm.SENT, fsm.AMF)
        )
        self._send_pdu(ng_setup_failure(cause))

    # -- UE-level NAS ---------------------------------------------------------------

    def _on_initial_ue(self, pdu: NgapPdu) -> None:
        ran_ue = pdu.ie(IeId.RAN_UE_NGAP_ID)
        if ran_ue is None:
            return
        ue = CoreUeState(ran_ue=ran_ue, amf_ue=self.core.next_amf_ue())
        self.ues[ran_ue] = ue
        nas = pdu.nas_pdu or b""
        try:
            msg = decode_nas(nas)
        except NasDecodeError as exc:
            self.core.counters.undecodable_nas += 1
            log.info("initial NAS undecodable (%s); rejecting registration", exc)
            ue.phase = Phase.DONE
            self._send_nas(
                ue, RegistrationReject(cause=MmCause.INVALID_MANDATORY_INFO), protected=False
            )
            return
        if msg.kind != MessageKind.REGISTRATION_REQUEST:
            log.info("initial message carries %s; ignoring", msg.kind)
            return
        self._gmm(ue, str(MessageKind.REGISTRATION_REQUEST), fsm.RECEIVED)
        self._on_registration_request(ue, msg)

    def _on_registration_request(self, ue: CoreUeState, msg: NasMessage) -> None:
        body = msg.body
        ue.registration_request = body
        report = validate_mandatory(msg)
        if report.missing_mandatory or report.malformed:
            ue.phase = Phase.DONE
            self._reject_registration(ue, MmCause.INVALID_MANDATORY_INFO)
            return
        # confidential IEs in a clear-text request: refuse the registration
        if msg.security_header == SecurityHeader.PLAIN and body.requested_nssai is not None:
            ue.phase = Phase.DONE
            self._reject_registration(ue, MmCause.PROTOCOL_ERROR_UNSPECIFIED)
            return

        ident: MobileIdentity | None = body.mobile_identity
        supi = reveal_supi(ident) if ident is not None else None
        if supi is None or self.cfg.request_identity:
            # unknown or concealed-elsewhere identity: ask for the permanent one
            ue.phase = Phase.AWAIT_IDENTITY
            self._send_nas(ue, IdentityRequest(identity_type=IdentityKind.SUCI), protected=False)
            return
        self._start_authentication(ue, supi)

    def _start_authentication(self, ue: CoreUeState, supi: str) -> None:
        subscriber = self.core.subscriber(supi)
        if subscriber is None:
            ue.phase = Phase.DONE
            self._reject_registration(ue, MmCause.ILLEGAL_UE)
            return
        ue.supi = supi
        with self.core._lock:
            subscriber.sqn += 1
            creds = subscriber.credentials()
        ue.creds = creds
        snn = serving_network_name(creds.mcc, creds.mnc)
        ue.vector = generate_vector(creds, self.core.next_rand(), snn)
        ue.phase = Phase.AWAIT_AUTH
        self._send_nas(
            ue,
            AuthenticationRequest(ngksi=0, rand=ue.vector.rand, autn=ue.vector.autn),
            protected=False,
        )

    def _reject_registration(self, ue: CoreUeState, cause: int) -> None:
        protected = ue.sec is not None and ue.sec.active
        self._send_nas(ue, RegistrationReject(cause=cause), protected=protected)
        self._gmm(ue, str(MessageKind.REGISTRATION_REJECT), fsm.SENT)

    def _on_uplink_nas(self, pdu: NgapPdu) -> None:
        ran_ue = pdu.ie(IeId.RAN_UE_NGAP_ID)
        ue = self.ues.get(ran_ue)
        if ue is None:
            log.info("uplink NAS for unknown UE %s", ran_ue)
            return
        nas = pdu.nas_pdu or b""
        try:
            outer = decode_nas(nas)
        except NasDecodeError as exc:
            self.core.counters.undecodable_nas += 1
            log.info("uplink NAS undecodable: %s", exc)
            return
        msg = outer
        if outer.security_header != SecurityHeader.PLAIN:
            if ue.sec is None:
                self.core.counters.mac_failures += 1
                return
            msg, ok = ue.sec.unprotect(nas, UPLINK)
            if not ok:
                self.core.counters.mac_failures += 1
                log.info("discarding NAS with bad MAC")
                return
        elif ue.sec is not None and ue.sec.active:
            self.core.counters.plain_after_secure += 1
            log.info("discarding plain NAS after security activation")
            return
        self._dispatch_nas(ue, msg)

    def _dispatch_nas(self, ue: CoreUeState, msg: NasMessage) -> None:
        kind = msg.kind
        phase = ue.phase
        if kind == MessageKind.IDENTITY_RESPONSE and phase == Phase.AWAIT_IDENTITY:
            supi = reveal_supi(msg.body.mobile_identity) if msg.body.mobile_identity else None
            if supi is None:
                self._reject_registration(ue, MmCause.INVALID_MANDATORY_INFO)
                ue.phase = Phase.DONE
                return
            self._start_authentication(ue, supi)
        elif kind == MessageKind.IDENTITY_RESPONSE and phase == Phase.AWAIT_IMEISV:
            ident = msg.body.mobile_identity
            ue.imeisv = ident.imeisv if ident is not None else None
            self._accept_registration(ue)
        elif kind == MessageKind.AUTHENTICATION_RESPONSE and phase == Phase.AWAIT_AUTH:
            self._on_auth_response(ue, msg)
        elif kind == MessageKind.AUTHENTICATION_FAILURE and phase == Phase.AWAIT_AUTH:
            self._on_auth_failure(ue, msg)
        elif kind == MessageKind.SECURITY_MODE_COMPLETE and phase == Phase.AWAIT_SMC_COMPLETE:
            self._on_smc_complete(ue, msg)
        elif kind == MessageKind.REGISTRATION_COMPLETE and phase == Phase.AWAIT_REG_COMPLETE:
            self._gmm(ue, str(MessageKind.REGISTRATION_COMPLETE), fsm.RECEIVED)
            ue.phase = Phase.REGISTERED
            if self.cfg.send_configuration_update:
                self._send_nas(ue, ConfigurationUpdateCommand(), protected=True)
        elif kind == MessageKind.UL_NAS_TRANSPORT:
            self._on_session_transport(ue, msg)
        else:
            log.info("NAS %s ignored in phase %s", kind, phase)

    def _on_auth_response(self, ue: CoreUeState, msg: NasMessage) -> None:
        res_star = msg.body.response or b""
        if ue.vector is None or res_star != ue.vector.xres_star:
            ue.phase = Phase.DONE
            log.info("RES* mismatch; aborting authentication")
            self._send_nas(ue, AuthenticationReject(), protected=False)
            return
        creds = ue.creds
        snn = serving_network_name(creds.mcc, creds.mnc)
        keys = derive_key_hierarchy(
            ue.vector.ck,
            ue.vector.ik,
            snn,
            ue.vector.rand,
            ue.vector.res,
            ue.vector.sqn_xor_ak,
            creds.supi,
            enc_alg=self.cfg.ciphering_alg,
            int_alg=self.cfg.integrity_alg,
        )
        ue.sec = SecurityContext(
            k_amf=keys["kamf"],
            k_nas_int=keys["k_nas_int"],
            k_nas_enc=keys["k_nas_enc"],
            k_gnb=keys["k_gnb"],
            alg_int=IntegrityAlg(self.cfg.integrity_alg),
            alg_enc=CipherAlg(self.cfg.ciphering_alg),
        )
        if ue.supi:
            self.core.debug_ues[ue.supi] = ue
        caps = (
            ue.registration_request.security_capability
            if ue.registration_request is not None
            else None
        )
        ue.smc_body = SecurityModeCommand(
            ciphering_alg=self.cfg.ciphering_alg,
            integrity_alg=self.cfg.integrity_alg,
            ngksi=0,
            replayed_capability=caps,
            imeisv_request=self.cfg.request_imeisv,
            retransmission_requested=True,
        )
        ue.phase = Phase.AWAIT_SMC_COMPLETE
        ue.smc_attempts = 0
        ue.smc_deadline = time.monotonic() + self.cfg.sm_command_timer
        self._send_smc(ue)

    def _on_auth_failure(self, ue: CoreUeState, msg: NasMessage) -> None:
        body = msg.body
        if body.cause == MmCause.SYNCH_FAILURE and body.auts and ue.creds is not None:
            with self.core._lock:
                subscriber = self.core.subscriber(ue.supi)
                recovered = recover_sqn_from_auts(ue.creds, ue.vector.rand, body.auts)
                if recovered is None:
                    log.info("resync token invalid; ignoring")
                    return
                subscriber.sqn = recovered + 1
                creds = subscriber.credentials()
            ue.creds = creds
            snn = serving_network_name(creds.mcc, creds.mnc)
            ue.vector = generate_vector(creds, self.core.next_rand(), snn)
            self._send_nas(
                ue,
                AuthenticationRequest(ngksi=0, rand=ue.vector.rand, autn=ue.vector.autn),
                protected=False,
            )
        else:
            log.info("authentication failure (cause %s) ignored", body.cause)

    def _on_smc_complete(self, ue: CoreUeState, msg: NasMessage) -> None:
        ue.smc_deadline = None
        body = msg.body
        if body.nas_container is None:
            # the requested re-transmission is missing: abort the registration
            ue.phase = Phase.DONE
            self._reject_registration(ue, MmCause.INVALID_MANDATORY_INFO)
            return
        try:
            replay = decode_nas(body.nas_container)
            ue.registration_request = replay.body
        except NasDecodeError:
            ue.phase = Phase.DONE
            self._reject_registration(ue, MmCause.INVALID_MANDATORY_INFO)
            return
        ue.sec.active = True
        if self.cfg.request_imeisv and body.imeisv is None:
            ue.phase = Phase.AWAIT_IMEISV
            request = IdentityRequest(identity_type=IdentityKind.IMEISV)
            if self.cfg.unprotected_identity_request:
                self._send_nas(ue, request, protected=False)
            else:
                self._send_nas(ue, request, protected=True)
            return
        if body.imeisv is not None:
            ue.imeisv = body.imeisv.imeisv
        self._accept_registration(ue)

    def _accept_registration(self, ue: CoreUeState) -> None:
        creds = ue.creds
        ue.guti_tmsi = self.core.next_tmsi()
        guti = MobileIdentity(
            kind=IdentityKind.FIVEG_GUTI,
            guti=Guti(
                mcc=creds.mcc,
                mnc=creds.mnc,
                amf_region_id=self.cfg.guami[0],
                amf_set_id=self.cfg.guami[1],
                amf_pointer=self.cfg.guami[2],
                tmsi=ue.guti_tmsi,
            ),
        )
        accept = RegistrationAccept(
            result=1,
            guti=guti,
            tai_list=b"\x00" + self.cfg.plmns[0][0].encode()[:1] + self.cfg.tacs[0],
            allowed_nssai=list(self.cfg.slices),
        )
        octets = ue.sec.protect(NasMessage(body=accept), DOWNLINK)
        ue.phase = Phase.AWAIT_REG_COMPLETE
        if ue.context_setup_done or self.cfg.session_via_initial_context:
            # context already up (or deferred): plain downlink transport
            self._send_pdu(downlink_nas_transport(ue.amf_ue, ue.ran_ue, octets))
            return
        caps = getattr(ue.registration_request, "security_capability", None)
        nr_ea = nr_ia = 0
        if caps is not None:
            # NAS bitmaps list the null algorithm in bit 8; the AN-level
            # bitmaps start at algorithm 1, so shift it out
            nr_ea = (caps.ea << 1) & 0xFFFF
            nr_ia = (caps.ia << 1) & 0xFFFF
        self._send_pdu(
            initial_context_setup_request(
                ue.amf_ue,
                ue.ran_ue,
                Guami(
                    mcc=creds.mcc,
                    mnc=creds.mnc,
                    region_id=self.cfg.guami[0],
                    set_id=self.cfg.guami[1],
                    pointer=self.cfg.guami[2],
                ),
                list(self.cfg.slices),
                UeSecurityCapsIe(nr_ea=nr_ea, nr_ia=nr_ia),
                ue.sec.k_gnb or bytes(32),
                nas_pdu=octets,
            )
        )
        ue.context_setup_done = True

    # -- session management -----------------------------------------------------------

    def _on_session_transport(self, ue: CoreUeState, msg: NasMessage) -> None:
        body = msg.body
        if ue.phase == Phase.AWAIT_SMC_COMPLETE and not self.cfg.accept_out_of_order_session:
            # mid-handshake transport: ignore it and let the timer push the
            # mode command again
            log.info("session transport before registration completion ignored")
            return
        if ue.phase not in (Phase.REGISTERED, Phase.AWAIT_SMC_COMPLETE):
            log.info("session transport in phase %s ignored", ue.phase)
            return
        payload = body.payload or b""
        try:
            request = decode_gsm(payload)
        except NasDecodeError as exc:
            log.info("payload container undecodable: %s", exc)
            return
        if request.kind != MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST:
            log.info("5GSM %s ignored", request.kind)
            return
        psi = body.pdu_session_id or request.pdu_session_id
        snssai = body.snssai
        dnn = body.dnn or ""

        existing = ue.sessions.get(psi)
        if existing is not None and existing.gsm != GsmState.INACTIVE:
            reject = PduSessionEstablishmentReject(
                pdu_session_id=psi, pti=request.pti, cause=SmCause.INVALID_PDU_SESSION_IDENTITY
            )
            self._send_nas(
                ue,
                DlNasTransport(payload=encode_gsm(reject), pdu_session_id=psi),
                protected=True,
            )
            return

        # AMF-level network selection: can any session function serve this?
        if dnn not in self.cfg.amf_dnns or snssai is None or not self.cfg.serves_slice(snssai):
            self._send_nas(
                ue,
                DlNasTransport(
                    payload=payload,
                    pdu_session_id=psi,
                    mm_cause=MmCause.PAYLOAD_NOT_FORWARDED,
                ),
                protected=True,
            )
            return

        self._gsm(ue, psi, str(MessageKind.PDU_SESSION_ESTABLISHMENT_REQUEST), fsm.RECEIVED)

        # UPF-level selection
        if dnn not in self.cfg.upf_dnns or snssai not in (self.cfg.upf_slices or []):
            reject = PduSessionEstablishmentReject(
                pdu_session_id=psi, pti=request.pti, cause=SmCause.MISSING_OR_UNKNOWN_DNN
            )
            self._gsm(ue, psi, str(MessageKind.PDU_SESSION_ESTABLISHMENT_REJECT), fsm.SENT)
            self._send_nas(
                ue,
                DlNasTransport(payload=encode_gsm(reject), pdu_session_id=psi),
                protected=True,
            )
            return

        session = ue.sessions.setdefault(psi, CoreSession())
        session.snssai, session.dnn = snssai, dnn
        session.uplink_teid = self.core.next_teid()
        session.pdu_address = self.core.next_pdu_address()
        self.core._tunnels[session.uplink_teid] = session

        accept = PduSessionEstablishmentAccept(
            pdu_session_id=psi,
            pti=request.pti,
            selected_type=1,
            selected_ssc=1,
            qos_rules=_QOS_RULES_DEFAULT,
            ambr=_SESSION_AMBR_DEFAULT,
            pdu_address=bytes([1]) + bytes(int(p) for p in session.pdu_address.split(".")),
            snssai=snssai,
            dnn=dnn,
        )
        self._gsm(ue, psi, str(MessageKind.PDU_SESSION_ESTABLISHMENT_ACCEPT), fsm.SENT)
        if ue.phase == Phase.AWAIT_SMC_COMPLETE:
            # out-of-order acceptance (only reachable through the toggle)
            self._send_nas(
                ue,
                DlNasTransport(payload=encode_gsm(accept), pdu_session_id=psi),
                protected=True,
            )
            return
        nas_dl = ue.sec.protect(
            NasMessage(body=DlNasTransport(payload=encode_gsm(accept), pdu_session_id=psi)),
            DOWNLINK,
        )
        item = PduResourceItem(
            pdu_session_id=psi,
            snssai=snssai,
            transfer=SetupRequestTransfer(
                teid=session.uplink_teid,
                address=self.core.n3_address[0],
                session_type=0,
                qos_flows=(QosFlowItem(),),
            ),
            nas_pdu=nas_dl,
        )
        if self.cfg.session_via_initial_context and not ue.context_setup_done:
            creds = ue.creds
            self._resource(
                ue, psi, str(NgapKind.INITIAL_CONTEXT_SETUP_REQUEST), fsm.SENT, None
            )
            self._send_pdu(
                initial_context_setup_request(
                    ue.amf_ue,
                    ue.ran_ue,
                    Guami(mcc=creds.mcc, mnc=creds.mnc),
                    list(self.cfg.slices),
                    UeSecurityCapsIe(),
                    ue.sec.k_gnb or bytes(32),
                    sessions=[item],
                )
            )
            ue.context_setup_done = True
        else:
            self._resource(
                ue, psi, str(NgapKind.PDU_SESSION_RESOURCE_SETUP_REQUEST), fsm.SENT, None
            )
            self._send_pdu(pdu_session_resource_setup_request(ue.amf_ue, ue.ran_ue, [item]))

    def _record_session_responses(self, ue: CoreUeState, items, kind: str) -> None:
        for item in items:
            transfer = item.transfer
            session = ue.sessions.get(item.pdu_session_id)
            if session is None:
                continue
            if isinstance(transfer, SetupResponseTransfer):
                session.downlink_teid = transfer.teid
                session.ran_address = transfer.address
                self._resource(ue, item.pdu_session_id, kind, fsm.RECEIVED, "success")
            else:
                self._resource(ue, item.pdu_session_id, kind, fsm.RECEIVED, "failure")

    def _on_context_response(self, pdu: NgapPdu) -> None:
        ue = self.ues.get(pdu.ie(IeId.RAN_UE_NGAP_ID))
        if ue is None:
            return
        items = pdu.ie(IeId.SETUP_LIST_CXT_RES) or []
        self._record_session_responses(
            ue, items, str(NgapKind.INITIAL_CONTEXT_SETUP_RESPONSE)
        )

    def _on_session_response(self, pdu: NgapPdu) -> None:
        ue = self.ues.get(pdu.ie(IeId.RAN_UE_NGAP_ID))
        if ue is None:
            return
        items = pdu.ie(IeId.SETUP_LIST_SU_RES) or []
        self._record_session_responses(
            ue, items, str(NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE)
        )
        failed = pdu.ie(IeId.FAILED_LIST_SU_RES) or []
        for item in failed:
            self._resource(
                ue,
                item.pdu_session_id,
                str(NgapKind.PDU_SESSION_RESOURCE_SETUP_RESPONSE),
                fsm.RECEIVED,
                "failure",
            )


def serve(cfg: CoreConfig, n2=("127.0.0.1", 0), n3=("127.0.0.1", 0), transport="auto") -> MockCore:
    """Start the responder; returns a handle with ``shutdown()``."""
    return MockCore(cfg).serve(n2=n2, n3=n3, transport=transport)
