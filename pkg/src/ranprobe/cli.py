"""Command-line entry point.

Subcommands: ``ng-setup``, ``register``, ``session`` (single flows),
``conformance``, ``robustness``, ``all`` (suites), and ``mock-core``
(run the reference core standalone).  Exit code is 0 when everything
passed, the capped failure count otherwise, and 64 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import signal
import sys
import threading

from .config import Config, ConfigError, parse_config
from .engine import (
    EXIT_CODE_CAP,
    ProbeProfile,
    Target,
    TestEngine,
    TestReport,
    render_report,
)
from .fsm import NgcState
from .mockcore import BindFailure, CoreConfig, MockCore
from .msglog import MessageLog
from .ngap import GlobalRanNodeId, TaiSliceSupport
from .security import UsimCredentials
from .sim import GnbAgent, GnbContext, UeAgent, UeContext
from .transport import TransportError, ngc_association

USAGE_EXIT = 64

log = logging.getLogger("ranprobe.cli")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 64, not argparse's default 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ranprobe", description=__doc__)
    parser.add_argument("--config", help="configuration file (YAML)")
    parser.add_argument("--report", help="write the run report to this path")
    parser.add_argument(
        "--format", choices=("human", "machine"), default="human", help="report format"
    )
    parser.add_argument("--log-dump", help="append every wire message (with hex) to this file")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("ng-setup", help="interface management flow only")
    sub.add_parser("register", help="single UE registration, prints the trace")
    sub.add_parser("session", help="registration plus one PDU session and an echo")
    sub.add_parser("conformance", help="run the conformance catalog")
    sub.add_parser("robustness", help="run the robustness catalog")
    sub.add_parser("all", help="run both catalogs")
    mock = sub.add_parser("mock-core", help="run the reference core standalone")
    mock.add_argument("--n2-port", type=int, default=38412)
    mock.add_argument("--n3-port", type=int, default=2152)
    mock.add_argument("--bind", default="127.0.0.1")
    return parser


def _profile_from(config: Config) -> ProbeProfile:
    return ProbeProfile(
        mcc=config.gnb.mcc,
        mnc=config.gnb.mnc,
        tac=config.gnb.tac,
        slices=list(config.gnb.slices),
        gnb_id=config.gnb.id,
        gnb_id_bits=config.gnb.id_bits,
        gnb_name=config.gnb.name,
        supi=config.ue.supi,
        k=config.ue.k,
        opc=config.ue.opc,
        sqn=config.ue.sqn,
        imeisv=config.ue.imeisv,
        dnn=config.ue.dnn,
        guard=config.timers.guard,
        config_update_wait=config.timers.config_update_wait,
        sm_command_timer=config.timers.sm_command_timer,
        sm_command_retries=config.timers.sm_command_retries,
    )


def _message_log(config: Config, args) -> MessageLog:
    dump_path = args.log_dump or config.log.dump_path
    dump_hex = config.log.message_dump or bool(args.log_dump)
    echo = print if args.command in ("register", "session", "ng-setup") else None
    return MessageLog(dump_path=dump_path, dump_hex=dump_hex, echo=echo)


class _LoopbackCore:
    """Starts the in-process reference core when the config asks for one."""

    def __init__(self, config: Config):
        self.core: MockCore | None = None
        self.config = config

    def __enter__(self) -> tuple[Target, float, int]:
        cfg = self.config
        if cfg.mock_core is not None:
            self.core = MockCore(cfg.mock_core).serve(transport=cfg.target.transport)
            target = Target(
                address=self.core.n2_address[0],
                port=self.core.n2_address[1],
                transport=cfg.target.transport,
                gtpu_port=self.core.n3_address[1],
            )
            return target, cfg.mock_core.sm_command_timer, cfg.mock_core.sm_command_retries
        target = Target(
            address=cfg.target.address,
            port=cfg.target.port,
            transport=cfg.target.transport,
            gtpu_port=cfg.target.gtpu_port,
        )
        return target, cfg.timers.sm_command_timer, cfg.timers.sm_command_retries

    def __exit__(self, *exc) -> None:
        if self.core is not None:
            self.core.shutdown()


def _emit_report(report: TestReport, args) -> int:
    text = render_report(report, args.format, args.report)
    if not args.report:
        print(text, end="")
    else:
        print(f"report written to {args.report} ({args.format})")
        print(
            f"pass {report.count('Pass')}  fail {report.fail_count}  "
            f"inconclusive {report.count('Inconclusive')}"
        )
    return report.exit_code


def _single_flow(config: Config, args, with_session: bool) -> int:
    mlog = _message_log(config, args)
    profile = _profile_from(config)
    failures = 0
    with _LoopbackCore(config) as (target, _timer, _retries):
        try:
            assoc = ngc_association(
                target.address, target.port, transport=target.transport, timeout=profile.guard
            )
        except TransportError as exc:
            print(f"cannot reach target: {exc}", file=sys.stderr)
            return 1
        gnb = GnbAgent(
            GnbContext(
                node_id=GlobalRanNodeId(
                    mcc=profile.mcc,
                    mnc=profile.mnc,
                    gnb_id=profile.gnb_id,
                    gnb_id_bits=profile.gnb_id_bits,
                ),
                name=profile.gnb_name,
                tais=[
                    TaiSliceSupport(
                        tac=profile.tac,
                        mcc=profile.mcc,
                        mnc=profile.mnc,
                        slices=tuple(profile.slices),
                    )
                ],
            ),
            assoc,
            log=mlog,
            guard=profile.guard,
            upf_port=target.gtpu_port,
        )
        try:
            setup = gnb.setup()
            if setup.state != NgcState.ACTIVE:
                print(f"interface setup did not complete: {setup}")
                return 1
            print(f"interface active, core: {setup.amf_name}")
            ue = UeAgent(
                UeContext(
                    creds=UsimCredentials(
                        supi=profile.supi, k=profile.k, opc=profile.opc, sqn=profile.sqn
                    ),
                    imeisv=profile.imeisv,
                    requested_nssai=list(profile.slices),
                ),
                gnb,
                guard=profile.guard,
                config_update_wait=profile.config_update_wait,
                log=mlog,
            )
            outcome = ue.register()
            print(f"registration: {outcome.status} (state {outcome.gmm.value})")
            if outcome.status != "registered":
                failures += 1
            elif with_session:
                session = ue.establish_session(dnn=profile.dnn)
                print(
                    f"session {session.psi}: {session.status} "
                    f"(address {session.pdu_address}, resource {session.resource.value})"
                )
                if session.status != "active":
                    failures += 1
                else:
                    echo = ue.userplane_send(session.psi, b"\xa5" * 64)
                    print(f"user-plane echo: {echo.status}")
                    if echo.status != "delivered":
                        failures += 1
        finally:
            gnb.close()
            mlog.close()
    return min(failures, EXIT_CODE_CAP)


def _run_suite(config: Config, args, which: str) -> int:
    mlog = _message_log(config, args)
    profile = _profile_from(config)
    with _LoopbackCore(config) as (target, timer, retries):
        profile.sm_command_timer = timer
        profile.sm_command_retries = retries
        engine = TestEngine(target, profile, log=mlog)
        if which == "conformance":
            report = engine.run_conformance()
        elif which == "robustness":
            report = engine.run_robustness()
        else:
            report = engine.run_all()
    mlog.close()
    return _emit_report(report, args)


def _run_ng_setup(config: Config, args) -> int:
    mlog = _message_log(config, args)
    profile = _profile_from(config)
    with _LoopbackCore(config) as (target, _timer, _retries):
        engine = TestEngine(target, profile, log=mlog)
        report = TestReport(
            target=target.describe(), transport=target.transport, started=""
        )
        from .engine.runner import _now

        report.started = _now()
        report.add("CT-08", engine.ct08())
        report.finished = _now()
    mlog.close()
    return _emit_report(report, args)


def _run_mock_core(config: Config, args) -> int:
    cfg = config.mock_core or CoreConfig()
    try:
        core = MockCore(cfg).serve(
            n2=(args.bind, args.n2_port),
            n3=(args.bind, args.n3_port),
            transport=config.target.transport,
        )
    except BindFailure as exc:
        print(f"cannot bind: {exc}", file=sys.stderr)
        return 1
    print(
        f"reference core on N2 {core.n2_address[0]}:{core.n2_address[1]} "
        f"({core.transport_name}) / N3 udp:{core.n3_address[1]}; interrupt to stop"
    )
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    stop.wait()
    core.shutdown()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    if not args.command:
        parser.print_usage(sys.stderr)
        return USAGE_EXIT

    try:
        config = parse_config(args.config) if args.config else Config()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return USAGE_EXIT

    logging.basicConfig(
        level=getattr(logging, config.log.level.upper(), logging.INFO),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )

    try:
        if args.command == "mock-core":
            return _run_mock_core(config, args)
        if args.command == "ng-setup":
            return _run_ng_setup(config, args)
        if args.command == "register":
            return _single_flow(config, args, with_session=False)
        if args.command == "session":
            return _single_flow(config, args, with_session=True)
        return _run_suite(config, args, args.command)
    except BindFailure as exc:
        print(f"cannot bind: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    console_main()
