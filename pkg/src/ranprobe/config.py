"""Run configuration: strict, sectioned, serializable.

One YAML file configures the target endpoint, the simulated node and
subscriber, timers, logging, and (optionally) the built-in reference
core for loopback runs.  Unknown keys are rejected so typos cannot
silently change a test campaign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml

from .mockcore.config import CoreConfig, Subscriber
from .nas.ies import Snssai


class ConfigError(ValueError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


def _require_mapping(value, key: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(key, "expected a mapping")
    return value


def _take(mapping: dict, key: str, default, section: str):
    return mapping.pop(key, default)


def _no_leftovers(mapping: dict, section: str) -> None:
    if mapping:
        raise ConfigError(section, f"unknown key(s): {', '.join(sorted(mapping))}")


def _hex_bytes(value, key: str, length: int | None = None) -> bytes:
    if isinstance(value, bytes):
        raw = value
    else:
        try:
            raw = bytes.fromhex(str(value))
        except ValueError as exc:
            raise ConfigError(key, f"invalid hex: {exc}") from exc
    if length is not None and len(raw) != length:
        raise ConfigError(key, f"expected {length} octets, got {len(raw)}")
    return raw


def _digits(value, key: str, length: int | None = None) -> str:
    text = str(value)
    if not text.isdigit():
        raise ConfigError(key, "decimal digits expected")
    if length is not None and len(text) != length:
        raise ConfigError(key, f"expected {length} digits, got {len(text)}")
    return text


def _slices(value, key: str) -> list[Snssai]:
    if value is None:
        return [Snssai(1)]
    out = []
    for i, item in enumerate(value):
        item = dict(_require_mapping(item, f"{key}[{i}]"))
        sst = item.pop("sst", None)
        sd = item.pop("sd", None)
        _no_leftovers(item, f"{key}[{i}]")
        if sst is None:
            raise ConfigError(f"{key}[{i}].sst", "required")
        out.append(Snssai(sst=int(sst), sd=_hex_bytes(sd, f"{key}[{i}].sd", 3) if sd else None))
    return out


def _slices_mapping(slices: list[Snssai]) -> list[dict]:
    return [
        {"sst": s.sst, **({"sd": s.sd.hex()} if s.sd is not None else {})} for s in slices
    ]


@dataclass
class TargetSection:
    address: str = "127.0.0.1"
    port: int = 38412
    transport: str = "auto"
    gtpu_port: int = 2152


@dataclass
class GnbSection:
    mcc: str = "208"
    mnc: str = "93"
    id: int = 1
    id_bits: int = 32
    name: str = "ranprobe-gnb"
    tac: bytes = b"\x00\x00\x01"
    slices: list[Snssai] = field(default_factory=lambda: [Snssai(1)])


@dataclass
class UeSection:
    supi: str = "208930000000003"
    k: bytes = bytes.fromhex("465b5ce8b199b49faa5f0a2ee238a6bc")
    opc: bytes = bytes.fromhex("cd63cb71954a9f4e48a5994e37a02baf")
    sqn: int = 32
    imeisv: str = "4370816125816151"
    nssai: list[Snssai] = field(default_factory=lambda: [Snssai(1)])
    dnn: str = "internet"


@dataclass
class TimerSection:
    guard: float = 5.0
    config_update_wait: float = 1.0
    sm_command_timer: float = 6.0
    sm_command_retries: int = 4


@dataclass
class LogSection:
    level: str = "info"
    message_dump: bool = False
    dump_path: str | None = None


@dataclass
class Config:
    target: TargetSection = field(default_factory=TargetSection)
    gnb: GnbSection = field(default_factory=GnbSection)
    ue: UeSection = field(default_factory=UeSection)
    timers: TimerSection = field(default_factory=TimerSection)
    log: LogSection = field(default_factory=LogSection)
    mock_core: CoreConfig | None = None

    def to_mapping(self) -> dict:
        out: dict[str, Any] = {
            "target": {
                "address": self.target.address,
                "port": self.target.port,
                "transport": self.target.transport,
                "gtpu_port": self.target.gtpu_port,
            },
            "gnb": {
                "mcc": self.gnb.mcc,
                "mnc": self.gnb.mnc,
                "id": self.gnb.id,
                "id_bits": self.gnb.id_bits,
                "name": self.gnb.name,
                "tac": self.gnb.tac.hex(),
                "slices": _slices_mapping(self.gnb.slices),
            },
            "ue": {
                "supi": self.ue.supi,
                "k": self.ue.k.hex(),
                "opc": self.ue.opc.hex(),
                "sqn": self.ue.sqn,
                "imeisv": self.ue.imeisv,
                "nssai": _slices_mapping(self.ue.nssai),
                "dnn": self.ue.dnn,
            },
            "timers": {
                "guard": self.timers.guard,
                "config_update_wait": self.timers.config_update_wait,
                "sm_command_timer": self.timers.sm_command_timer,
                "sm_command_retries": self.timers.sm_command_retries,
            },
            "log": {
                "level": self.log.level,
                "message_dump": self.log.message_dump,
                "dump_path": self.log.dump_path,
            },
        }
        if self.mock_core is not None:
            mc = self.mock_core
            out["mock_core"] = {
                "plmns": [f"{m}{n}" for m, n in mc.plmns],
                "tacs": [t.hex() for t in mc.tacs],
                "slices": _slices_mapping(mc.slices),
                "amf_dnns": list(mc.amf_dnns),
                "upf_dnns": list(mc.upf_dnns),
                "subscribers": [
                    {"supi": s.supi, "k": s.k.hex(), "opc": s.opc.hex(), "sqn": s.sqn}
                    for s in mc.subscribers.values()
                ],
                "amf_name": mc.amf_name,
                "relative_capacity": mc.relative_capacity,
                "sm_command_timer": mc.sm_command_timer,
                "sm_command_retries": mc.sm_command_retries,
                "send_configuration_update": mc.send_configuration_update,
                "request_identity": mc.request_identity,
                "request_imeisv": mc.request_imeisv,
                "session_via_initial_context": mc.session_via_initial_context,
                "ignore_bad_ngsetup": mc.ignore_bad_ngsetup,
                "unprotected_identity_request": mc.unprotected_identity_request,
                "accept_out_of_order_session": mc.accept_out_of_order_session,
                "rng_seed": mc.rng_seed,
            }
        return out


def _parse_target(raw: dict) -> TargetSection:
    section = TargetSection(
        address=str(_take(raw, "address", TargetSection.address, "target")),
        port=int(_take(raw, "port", TargetSection.port, "target")),
        transport=str(_take(raw, "transport", TargetSection.transport, "target")),
        gtpu_port=int(_take(raw, "gtpu_port", TargetSection.gtpu_port, "target")),
    )
    _no_leftovers(raw, "target")
    if section.transport not in ("sctp", "tcp-shim", "auto"):
        raise ConfigError("target.transport", f"unknown transport {section.transport!r}")
    return section


def _split_plmn(value, key: str) -> tuple[str, str]:
    text = _digits(value, key)
    if len(text) not in (5, 6):
        raise ConfigError(key, "PLMN needs 5 or 6 digits (MCC+MNC)")
    return text[:3], text[3:]


def _parse_gnb(raw: dict) -> GnbSection:
    defaults = GnbSection()
    plmn = raw.pop("plmn", None)
    mcc = _digits(raw.pop("mcc", defaults.mcc), "gnb.mcc", 3)
    mnc = raw.pop("mnc", defaults.mnc)
    if plmn is not None:
        mcc, mnc = _split_plmn(plmn, "gnb.plmn")
    else:
        mnc = _digits(mnc, "gnb.mnc")
        if len(mnc) not in (2, 3):
            raise ConfigError("gnb.mnc", "2 or 3 digits")
    section = GnbSection(
        mcc=mcc,
        mnc=mnc,
        id=int(raw.pop("id", defaults.id)),
        id_bits=int(raw.pop("id_bits", defaults.id_bits)),
        name=str(raw.pop("name", defaults.name)),
        tac=_hex_bytes(raw.pop("tac", defaults.tac), "gnb.tac", 3),
        slices=_slices(raw.pop("slices", None), "gnb.slices"),
    )
    _no_leftovers(raw, "gnb")
    if not 22 <= section.id_bits <= 32:
        raise ConfigError("gnb.id_bits", "must be within [22, 32]")
    return section


def _parse_ue(raw: dict) -> UeSection:
    defaults = UeSection()
    section = UeSection(
        supi=_digits(raw.pop("supi", defaults.supi), "ue.supi", 15),
        k=_hex_bytes(raw.pop("k", defaults.k), "ue.k", 16),
        opc=_hex_bytes(raw.pop("opc", defaults.opc), "ue.opc", 16),
        sqn=int(raw.pop("sqn", defaults.sqn)),
        imeisv=_digits(raw.pop("imeisv", defaults.imeisv), "ue.imeisv", 16),
        nssai=_slices(raw.pop("nssai", None), "ue.nssai"),
        dnn=str(raw.pop("dnn", defaults.dnn)),
    )
    _no_leftovers(raw, "ue")
    return section


def _parse_timers(raw: dict) -> TimerSection:
    defaults = TimerSection()
    section = TimerSection(
        guard=float(raw.pop("guard", defaults.guard)),
        config_update_wait=float(raw.pop("config_update_wait", defaults.config_update_wait)),
        sm_command_timer=float(raw.pop("sm_command_timer", defaults.sm_command_timer)),
        sm_command_retries=int(raw.pop("sm_command_retries", defaults.sm_command_retries)),
    )
    _no_leftovers(raw, "timers")
    if section.guard <= 0:
        raise ConfigError("timers.guard", "must be positive")
    return section


def _parse_log(raw: dict) -> LogSection:
    defaults = LogSection()
    section = LogSection(
        level=str(raw.pop("level", defaults.level)),
        message_dump=bool(raw.pop("message_dump", defaults.message_dump)),
        dump_path=raw.pop("dump_path", None),
    )
    _no_leftovers(raw, "log")
    return section


def _parse_mock_core(raw: dict) -> CoreConfig:
    defaults = CoreConfig()
    plmns = [_split_plmn(p, "mock_core.plmns") for p in raw.pop("plmns", ["20893"])]
    tacs = [_hex_bytes(t, "mock_core.tacs", 3) for t in raw.pop("tacs", ["000001"])]
    subscribers: dict[str, Subscriber] = {}
    for i, sub in enumerate(raw.pop("subscribers", None) or []):
        sub = dict(_require_mapping(sub, f"mock_core.subscribers[{i}]"))
        supi = _digits(sub.pop("supi", None), f"mock_core.subscribers[{i}].supi", 15)
        subscriber = Subscriber(
            supi=supi,
            k=_hex_bytes(sub.pop("k", None), f"mock_core.subscribers[{i}].k", 16),
            opc=_hex_bytes(sub.pop("opc", None), f"mock_core.subscribers[{i}].opc", 16),
            sqn=int(sub.pop("sqn", 0)),
        )
        _no_leftovers(sub, f"mock_core.subscribers[{i}]")
        subscribers[supi] = subscriber
    cfg = CoreConfig(
        plmns=plmns,
        tacs=tacs,
        slices=_slices(raw.pop("slices", None), "mock_core.slices"),
        amf_dnns=list(raw.pop("amf_dnns", defaults.amf_dnns)),
        upf_dnns=list(raw.pop("upf_dnns", defaults.upf_dnns)),
        subscribers=subscribers or defaults.subscribers,
        amf_name=str(raw.pop("amf_name", defaults.amf_name)),
        relative_capacity=int(raw.pop("relative_capacity", defaults.relative_capacity)),
        sm_command_timer=float(raw.pop("sm_command_timer", defaults.sm_command_timer)),
        sm_command_retries=int(raw.pop("sm_command_retries", defaults.sm_command_retries)),
        send_configuration_update=bool(
            raw.pop("send_configuration_update", defaults.send_configuration_update)
        ),
        request_identity=bool(raw.pop("request_identity", defaults.request_identity)),
        request_imeisv=bool(raw.pop("request_imeisv", defaults.request_imeisv)),
        session_via_initial_context=bool(
            raw.pop("session_via_initial_context", defaults.session_via_initial_context)
        ),
        ignore_bad_ngsetup=bool(raw.pop("ignore_bad_ngsetup", False)),
        unprotected_identity_request=bool(raw.pop("unprotected_identity_request", False)),
        accept_out_of_order_session=bool(raw.pop("accept_out_of_order_session", False)),
        rng_seed=raw.pop("rng_seed", None),
    )
    _no_leftovers(raw, "mock_core")
    return cfg


def parse_mapping(data: dict) -> Config:
    data = dict(_require_mapping(data, "<root>"))
    config = Config(
        target=_parse_target(dict(_require_mapping(data.pop("target", None), "target"))),
        gnb=_parse_gnb(dict(_require_mapping(data.pop("gnb", None), "gnb"))),
        ue=_parse_ue(dict(_require_mapping(data.pop("ue", None), "ue"))),
        timers=_parse_timers(dict(_require_mapping(data.pop("timers", None), "timers"))),
        log=_parse_log(dict(_require_mapping(data.pop("log", None), "log"))),
    )
    if "mock_core" in data:
        config.mock_core = _parse_mock_core(
            dict(_require_mapping(data.pop("mock_core"), "mock_core"))
        )
    _no_leftovers(data, "<root>")
    return config


def parse_config(path: str) -> Config:
    """Load and validate one configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(path, f"cannot read: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(path, f"invalid YAML: {exc}") from exc
    return parse_mapping(data or {})


def dump_config(config: Config) -> str:
    return yaml.safe_dump(config.to_mapping(), sort_keys=True)
