"""Executes the catalog against a core endpoint, one fresh stack per case."""

from __future__ import annotations


from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..fsm import GsmState, NgcState, PduResourceState
from ..msglog import MessageLog
from ..nas import MessageKind as K
from ..nas.ies import Snssai
from ..ngap import GlobalRanNodeId, NgapKind as G, TaiSliceSupport
from ..security import UsimCredentials
from ..sim import (
    GnbAgent,
    GnbContext,
    Mutation,
    MutationAction,
    MutationSet,
    UeAgent,
    UeContext,
)
from ..transport import TransportError, ngc_association
from .catalog import CONFORMANCE, ROBUSTNESS
from .judge import FAIL, INCONCLUSIVE, PASS, Expectation, Verdict, judge, merge_verdicts
from .report import TestReport


class TargetUnreachable(Exception):
    pass


@dataclass
class Target:
    address: str
    port: int = 38412
    transport: str = "auto"  # sctp | tcp-shim | auto
    gtpu_port: int = 2152

    def describe(self) -> dict:
        return {
            "address": self.address,
            "port": self.port,
            "transport": self.transport,
            "gtpu_port": self.gtpu_port,
        }


@dataclass
class ProbeProfile:
    """Identities, credentials, and timing the tester presents."""

    mcc: str = "208"
    mnc: str = "93"
    tac: bytes = b"\x00\x00\x01"
    slices: list[Snssai] = field(default_factory=lambda: [Snssai(1)])
    gnb_id: int = 1
    gnb_id_bits: int = 32
    gnb_name: str = "ranprobe-gnb"

    supi: str = "208930000000003"
    k: bytes = bytes.fromhex("465b5ce8b199b49faa5f0a2ee238a6bc")
    opc: bytes = bytes.fromhex("cd63cb71954a9f4e48a5994e37a02baf")
    sqn: int = 32
    imeisv: str = "4370816125816151"
    dnn: str = "internet"

    guard: float = 5.0
    config_update_wait: float = 1.0
    # the core's expected mode-command retransmission behaviour
    sm_command_timer: float = 6.0
    sm_command_retries: int = 4

    # deliberately invalid parameters for the robustness cases
    rt04_dnn: str = "nowhere"
    rt04_snssai: Snssai = field(default_factory=lambda: Snssai(9))
    rt05_dnn: str = "edge"
    rt05_snssai: Snssai = field(default_factory=lambda: Snssai(1))
    rt07_tac: bytes = b"\xff\xff\xfe"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class TestEngine:
    """Runs test cases strictly sequentially with per-case agent state."""

    def __init__(self, target: Target, profile: ProbeProfile, log: MessageLog | None = None):
        self.target = target
        self.profile = profile
        self.log = log

    # -- stack plumbing -----------------------------------------------------------

    def _gnb(self, tac: bytes | None = None) -> GnbAgent:
        p = self.profile
        try:
            assoc = ngc_association(
                self.target.address,
                self.target.port,
                transport=self.target.transport,
                timeout=p.guard,
            )
        except TransportError as exc:
            raise TargetUnreachable(str(exc)) from exc
        ctx = GnbContext(
            node_id=GlobalRanNodeId(
                mcc=p.mcc, mnc=p.mnc, gnb_id=p.gnb_id, gnb_id_bits=p.gnb_id_bits
            ),
            name=p.gnb_name,
            tais=[
                TaiSliceSupport(
                    tac=tac if tac is not None else p.tac,
                    mcc=p.mcc,
                    mnc=p.mnc,
                    slices=tuple(p.slices),
                )
            ],
        )
        return GnbAgent(
            ctx,
            assoc,
            log=self.log,
            guard=p.guard,
            upf_port=self.target.gtpu_port,
        )

    def _ue(self, gnb: GnbAgent) -> UeAgent:
        p = self.profile
        ctx = UeContext(
            creds=UsimCredentials(supi=p.supi, k=p.k, opc=p.opc, sqn=p.sqn),
            imeisv=p.imeisv,
            requested_nssai=list(p.slices),
        )
        return UeAgent(
            ctx, gnb, guard=p.guard, config_update_wait=p.config_update_wait, log=self.log
        )

    def _registered_stack(self) -> tuple[GnbAgent, UeAgent, Verdict | None]:
        """Interface setup; None verdict when ready, otherwise the problem."""
        gnb = self._gnb()
        outcome = gnb.setup()
        if outcome.state != NgcState.ACTIVE:
            why = "interface setup timed out" if outcome.timed_out else "interface setup failed"
            return gnb, self._ue(gnb), Verdict(value=INCONCLUSIVE, detail=why, trace=gnb.trace)
        return gnb, self._ue(gnb), None

    # -- conformance cases -----------------------------------------------------------

    def _ct_registration_based(self, expectation: Expectation, **register_kw) -> Verdict:
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            outcome = ue.register(**register_kw)
            verdict = judge(expectation, ue.trace)
            if outcome.status == "timeout" and verdict.value == FAIL and not verdict.detail:
                verdict.detail = "flow timed out"
            return verdict
        finally:
            gnb.close()

    def ct01(self) -> Verdict:
        def complete(trace):
            ok = bool(trace.sent(str(K.REGISTRATION_REQUEST))) and bool(
                trace.sent(str(K.REGISTRATION_COMPLETE))
            )
            return ok, "" if ok else "registration did not complete"

        return self._ct_registration_based(
            Expectation(accept_kinds=(str(K.REGISTRATION_ACCEPT),), predicate=complete)
        )

    def ct02(self) -> Verdict:
        def exchanged(trace):
            ok = bool(trace.received(str(K.AUTHENTICATION_REQUEST))) and bool(
                trace.sent(str(K.AUTHENTICATION_RESPONSE))
            )
            return ok, "" if ok else "no challenge/response exchange"

        return self._ct_registration_based(
            Expectation(
                accept_kinds=(str(K.AUTHENTICATION_REQUEST),),
                forbid_kinds=(str(K.AUTHENTICATION_REJECT),),
                predicate=exchanged,
            )
        )

    def ct03(self) -> Verdict:
        def exchanged(trace):
            ok = bool(trace.received(str(K.IDENTITY_REQUEST))) and bool(
                trace.sent(str(K.IDENTITY_RESPONSE))
            )
            return ok, "" if ok else "no identification exchange"

        return self._ct_registration_based(
            Expectation(
                accept_kinds=(str(K.IDENTITY_REQUEST),),
                predicate=exchanged,
            ),
            identity="guti",
        )

    def ct04(self) -> Verdict:
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            reg = ue.register()
            if reg.status != "registered":
                return Verdict(
                    value=INCONCLUSIVE, detail=f"registration {reg.status}", trace=ue.trace
                )
            ue.establish_session(dnn=self.profile.dnn)

            def transported(trace):
                ok = bool(trace.sent(str(K.UL_NAS_TRANSPORT))) and bool(
                    trace.received(str(K.DL_NAS_TRANSPORT))
                )
                return ok, "" if ok else "no transport exchange"

            return judge(
                Expectation(accept_kinds=(str(K.DL_NAS_TRANSPORT),), predicate=transported),
                ue.trace,
            )
        finally:
            gnb.close()

    def ct05(self) -> Verdict:
        def exchanged(trace):
            ok = bool(trace.received(str(K.SECURITY_MODE_COMMAND))) and bool(
                trace.sent(str(K.SECURITY_MODE_COMPLETE))
            )
            return ok, "" if ok else "no security-mode exchange"

        return self._ct_registration_based(
            Expectation(
                accept_kinds=(str(K.SECURITY_MODE_COMMAND),),
                require_protected=(str(K.SECURITY_MODE_COMMAND),),
                predicate=exchanged,
            )
        )

    def ct06(self) -> Verdict:
        verdict = self._ct_registration_based(
            Expectation(accept_kinds=(str(K.CONFIGURATION_UPDATE_COMMAND),))
        )
        if verdict.value == INCONCLUSIVE:
            verdict.detail = (
                "core never sent the configuration update; "
                "implementations are known to differ here"
            )
        return verdict

    def ct07(self) -> Verdict:
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            reg = ue.register()
            if reg.status != "registered":
                return Verdict(
                    value=INCONCLUSIVE, detail=f"registration {reg.status}", trace=ue.trace
                )
            session = ue.establish_session(dnn=self.profile.dnn)

            def active(trace):
                ok = session.status == "active" and session.gsm == GsmState.ACTIVE
                return ok, "" if ok else f"session outcome {session.status}"

            return judge(
                Expectation(
                    accept_kinds=(str(K.PDU_SESSION_ESTABLISHMENT_ACCEPT),), predicate=active
                ),
                ue.trace,
            )
        finally:
            gnb.close()

    def ct08(self) -> Verdict:
        gnb = self._gnb()
        try:
            outcome = gnb.setup()

            def active(trace):
                ok = outcome.state == NgcState.ACTIVE and outcome.amf_name is not None
                return ok, "" if ok else "interface did not reach the active state"

            return judge(
                Expectation(accept_kinds=(str(G.NG_SETUP_RESPONSE),), predicate=active),
                gnb.trace,
            )
        finally:
            gnb.close()

    def ct09(self) -> Verdict:
        def transported(trace):
            ok = bool(trace.received(str(G.DOWNLINK_NAS_TRANSPORT))) and bool(
                trace.sent(str(G.UPLINK_NAS_TRANSPORT))
            )
            return ok, "" if ok else "no NAS-transport exchange on the control interface"

        return self._ct_registration_based(
            Expectation(accept_kinds=(str(G.DOWNLINK_NAS_TRANSPORT),), predicate=transported)
        )

    def ct10(self) -> Verdict:
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            reg = ue.register()
            if reg.status == "registered" and not gnb.trace.received(
                str(G.INITIAL_CONTEXT_SETUP_REQUEST)
            ):
                # some cores defer context setup until the first session
                ue.establish_session(dnn=self.profile.dnn)

            def exchanged(trace):
                ok = bool(trace.received(str(G.INITIAL_CONTEXT_SETUP_REQUEST))) and bool(
                    trace.sent(str(G.INITIAL_CONTEXT_SETUP_RESPONSE))
                )
                return ok, "" if ok else "no context-setup exchange"

            return judge(
                Expectation(
                    accept_kinds=(str(G.INITIAL_CONTEXT_SETUP_REQUEST),), predicate=exchanged
                ),
                ue.trace,
            )
        finally:
            gnb.close()

    def ct11(self) -> Verdict:
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            reg = ue.register()
            if reg.status != "registered":
                return Verdict(
                    value=INCONCLUSIVE, detail=f"registration {reg.status}", trace=ue.trace
                )
            session = ue.establish_session(dnn=self.profile.dnn)
            if session.status == "active" and not gnb.trace.received(
                str(G.PDU_SESSION_RESOURCE_SETUP_REQUEST)
            ):
                return Verdict(
                    value=INCONCLUSIVE,
                    detail="core carried session resources on the context-setup pair",
                    trace=ue.trace,
                )

            def exchanged(trace):
                ok = (
                    bool(trace.received(str(G.PDU_SESSION_RESOURCE_SETUP_REQUEST)))
                    and bool(trace.sent(str(G.PDU_SESSION_RESOURCE_SETUP_RESPONSE)))
                    and session.resource == PduResourceState.ACTIVE
                )
                return ok, "" if ok else "no session-resource exchange"

            return judge(
                Expectation(
                    accept_kinds=(str(G.PDU_SESSION_RESOURCE_SETUP_REQUEST),),
                    predicate=exchanged,
                ),
                ue.trace,
            )
        finally:
            gnb.close()

    # -- robustness cases -----------------------------------------------------------

    def rt01(self) -> Verdict:
        parts = []
        # (a) mandatory identity removed: the core must reject, not just drop
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is None:
                mutations = MutationSet()
                mutations.arm(
                    Mutation(
                        target_kind=str(K.REGISTRATION_REQUEST),
                        action=MutationAction.DELETE_IE,
                        field="mobile_identity",
                    )
                )
                ue.register(mutations=mutations)
                verdict = judge(
                    Expectation(
                        accept_kinds=(str(K.REGISTRATION_REJECT),),
                        forbid_kinds=(str(K.REGISTRATION_ACCEPT),),
                        silence_verdict=FAIL,
                    ),
                    ue.trace,
                )
                if verdict.value == FAIL and not ue.trace.received(str(K.REGISTRATION_REJECT)):
                    verdict.detail = (
                        "flow interrupted without a reject; " + verdict.detail
                    ).strip("; ")
                parts.append(("missing identity", verdict))
            else:
                parts.append(("missing identity", problem))
        finally:
            gnb.close()

        # (b) confidential information sent in clear text: must be refused
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is None:
                mutations = MutationSet()
                mutations.arm(
                    Mutation(
                        target_kind=str(K.REGISTRATION_REQUEST),
                        action=MutationAction.REPLACE_VALUE,
                        field="requested_nssai",
                        value=list(self.profile.slices),
                    )
                )
                outcome = ue.register(mutations=mutations)
                verdict = judge(
                    Expectation(
                        accept_kinds=(str(K.REGISTRATION_REJECT),),
                        forbid_kinds=(str(K.REGISTRATION_ACCEPT),),
                        silence_verdict=FAIL,
                    ),
                    ue.trace,
                )
                if outcome.status == "registered":
                    verdict.value = FAIL
                    verdict.detail = "core accepted confidential IEs in clear text"
                parts.append(("clear-text confidential IEs", verdict))
            else:
                parts.append(("clear-text confidential IEs", problem))
        finally:
            gnb.close()
        return merge_verdicts(parts)

    def rt02(self) -> Verdict:
        parts = []
        # (a) corrupted challenge response: the core must abort
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is None:
                ue.register(corrupt_res_star=True)
                parts.append(
                    (
                        "corrupted response",
                        judge(
                            Expectation(
                                accept_kinds=(str(K.AUTHENTICATION_REJECT),),
                                forbid_kinds=(
                                    str(K.SECURITY_MODE_COMMAND),
                                    str(K.REGISTRATION_ACCEPT),
                                ),
                                silence_verdict=FAIL,
                            ),
                            ue.trace,
                        ),
                    )
                )
            else:
                parts.append(("corrupted response", problem))
        finally:
            gnb.close()

        # (b) forced resynchronisation: the core must issue a new challenge
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is None:
                ue.register(force_sync_failure=True)

                def rechallenged(trace):
                    ok = len(trace.received(str(K.AUTHENTICATION_REQUEST))) >= 2
                    return ok, "" if ok else "no new challenge after the resync token"

                parts.append(
                    (
                        "sequence resynchronisation",
                        judge(
                            Expectation(
                                accept_kinds=(str(K.AUTHENTICATION_REQUEST),),
                                silence_verdict=FAIL,
                                predicate=rechallenged,
                            ),
                            ue.trace,
                        ),
                    )
                )
            else:
                parts.append(("sequence resynchronisation", problem))
        finally:
            gnb.close()
        return merge_verdicts(parts)

    def rt03(self) -> Verdict:
        parts = []
        # (a) equipment identity withheld from the mode-command completion
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is None:
                mutations = MutationSet()
                mutations.arm(
                    Mutation(
                        target_kind=str(K.SECURITY_MODE_COMPLETE),
                        action=MutationAction.DELETE_IE,
                        field="imeisv",
                    )
                )
                ue.register(mutations=mutations)
                verdict = judge(
                    Expectation(
                        accept_kinds=(str(K.IDENTITY_REQUEST), str(K.REGISTRATION_REJECT)),
                        require_protected=(str(K.IDENTITY_REQUEST),),
                        silence_verdict=FAIL,
                    ),
                    ue.trace,
                )
                parts.append(("withheld equipment identity", verdict))
            else:
                parts.append(("withheld equipment identity", problem))
        finally:
            gnb.close()

        # (b) required re-transmission withheld: registration must be aborted
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is None:
                mutations = MutationSet()
                mutations.arm(
                    Mutation(
                        target_kind=str(K.SECURITY_MODE_COMPLETE),
                        action=MutationAction.DELETE_IE,
                        field="nas_container",
                    )
                )
                ue.register(mutations=mutations)
                parts.append(
                    (
                        "withheld re-transmission",
                        judge(
                            Expectation(
                                accept_kinds=(str(K.REGISTRATION_REJECT),),
                                forbid_kinds=(str(K.REGISTRATION_ACCEPT),),
                                silence_verdict=FAIL,
                            ),
                            ue.trace,
                        ),
                    )
                )
            else:
                parts.append(("withheld re-transmission", problem))
        finally:
            gnb.close()
        return merge_verdicts(parts)

    def _session_robustness(self, dnn: str, snssai: Snssai, expectation: Expectation) -> Verdict:
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            reg = ue.register()
            if reg.status != "registered":
                return Verdict(
                    value=INCONCLUSIVE, detail=f"registration {reg.status}", trace=ue.trace
                )
            ue.establish_session(dnn=dnn, snssai=snssai)
            return judge(expectation, ue.trace)
        finally:
            gnb.close()

    def rt04(self) -> Verdict:
        verdict = self._session_robustness(
            self.profile.rt04_dnn,
            self.profile.rt04_snssai,
            Expectation(
                accept_kinds=(str(K.DL_NAS_TRANSPORT),),
                forbid_kinds=(str(K.PDU_SESSION_ESTABLISHMENT_ACCEPT),),
                silence_verdict=FAIL,
            ),
        )
        if verdict.value == FAIL and not verdict.detail:
            verdict.detail = "session request dropped without a non-forwarding indication"
        return verdict

    def rt05(self) -> Verdict:
        return self._session_robustness(
            self.profile.rt05_dnn,
            self.profile.rt05_snssai,
            Expectation(
                accept_kinds=(str(K.PDU_SESSION_ESTABLISHMENT_REJECT),),
                forbid_kinds=(str(K.PDU_SESSION_ESTABLISHMENT_ACCEPT),),
                silence_verdict=FAIL,
            ),
        )

    def rt06(self) -> Verdict:
        p = self.profile
        gnb, ue, problem = self._registered_stack()
        try:
            if problem is not None:
                return problem
            window = p.sm_command_timer * (p.sm_command_retries + 2) + p.guard
            outcome = ue.register_with_early_session(dnn=p.dnn, observe=window)
            expected = 1 + p.sm_command_retries
            tolerance = max(0.010, p.sm_command_timer * 0.1)

            def retransmitted(trace):
                times = outcome.smc_times
                if outcome.early_session_accept:
                    return False, "core answered the out-of-order session request"
                if outcome.accepted_anyway:
                    return False, "core completed registration despite the misordered flow"
                if len(times) != expected:
                    return False, (
                        f"observed {len(times)} mode-command transmissions, "
                        f"expected {expected}"
                    )
                gaps = [b - a for a, b in zip(times, times[1:])]
                bad = [g for g in gaps if abs(g - p.sm_command_timer) > tolerance]
                if bad:
                    return False, (
                        f"retransmission spacing off: {['%.3f' % g for g in gaps]}"
                        f" (expected {p.sm_command_timer:.3f} +/- {tolerance:.3f})"
                    )
                if not outcome.rejected:
                    return False, "registration was not aborted after the final attempt"
                return True, ""

            return judge(
                Expectation(
                    accept_kinds=(str(K.REGISTRATION_REJECT),),
                    forbid_kinds=(str(K.PDU_SESSION_ESTABLISHMENT_ACCEPT),),
                    silence_verdict=FAIL,
                    predicate=retransmitted,
                ),
                ue.trace,
            )
        finally:
            gnb.close()

    def rt07(self) -> Verdict:
        gnb = self._gnb(tac=self.profile.rt07_tac)
        try:
            outcome = gnb.setup()
            verdict = judge(
                Expectation(
                    accept_kinds=(str(G.NG_SETUP_FAILURE),),
                    forbid_kinds=(str(G.NG_SETUP_RESPONSE),),
                    silence_verdict=FAIL,
                ),
                gnb.trace,
            )
            if verdict.value == FAIL and outcome.timed_out:
                verdict.detail = "core ignored the invalid setup request without any error"
            return verdict
        finally:
            gnb.close()

    # -- suite drivers -----------------------------------------------------------

    _CT_RUNNERS = {
        "CT-01": ct01, "CT-02": ct02, "CT-03": ct03, "CT-04": ct04, "CT-05": ct05,
        "CT-06": ct06, "CT-07": ct07, "CT-08": ct08, "CT-09": ct09, "CT-10": ct10,
        "CT-11": ct11,
    }
    _RT_RUNNERS = {
        "RT-01": rt01, "RT-02": rt02, "RT-03": rt03, "RT-04": rt04, "RT-05": rt05,
        "RT-06": rt06, "RT-07": rt07,
    }

    def _run_suite(self, entries, runners) -> TestReport:
        report = TestReport(
            target=self.target.describe(), transport=self.target.transport, started=_now()
        )
        unreachable: str | None = None
        for entry in entries:
            if unreachable is not None:
                report.add(
                    entry.case_id,
                    Verdict(value=INCONCLUSIVE, detail=f"target unreachable: {unreachable}"),
                )
                continue
            try:
                verdict = runners[entry.case_id](self)
            except TargetUnreachable as exc:
                unreachable = str(exc)
                report.add(
                    entry.case_id,
                    Verdict(value=INCONCLUSIVE, detail=f"target unreachable: {exc}"),
                )
                continue
            report.add(entry.case_id, verdict)
        report.finished = _now()
        return report

    def run_conformance(self) -> TestReport:
        return self._run_suite(CONFORMANCE, self._CT_RUNNERS)

    def run_robustness(self) -> TestReport:
        return self._run_suite(ROBUSTNESS, self._RT_RUNNERS)

    def run_all(self) -> TestReport:
        report = self._run_suite(CONFORMANCE, self._CT_RUNNERS)
        robustness = self._run_suite(ROBUSTNESS, self._RT_RUNNERS)
        report.results.extend(robustness.results)
        report.finished = robustness.finished
        return report
