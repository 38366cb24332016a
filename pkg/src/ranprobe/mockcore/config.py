"""Configuration of the reference core stub."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..nas.ies import Snssai
from ..security.aka import UsimCredentials


@dataclass
class Subscriber:
    supi: str
    k: bytes
    opc: bytes
    sqn: int = 0

    def credentials(self) -> UsimCredentials:
        return UsimCredentials(supi=self.supi, k=self.k, opc=self.opc, sqn=self.sqn)


def _default_subscribers() -> dict[str, Subscriber]:
    sub = Subscriber(
        supi="208930000000003",
        k=bytes.fromhex("465b5ce8b199b49faa5f0a2ee238a6bc"),
        opc=bytes.fromhex("cd63cb71954a9f4e48a5994e37a02baf"),
        sqn=32,
    )
    return {sub.supi: sub}


@dataclass
class CoreConfig:
    plmns: list[tuple[str, str]] = field(default_factory=lambda: [("208", "93")])
    tacs: list[bytes] = field(default_factory=lambda: [b"\x00\x00\x01"])
    slices: list[Snssai] = field(default_factory=lambda: [Snssai(1)])
    # the AMF forwards requests for any of these; only the first is backed
    # by an actual user-plane function, so the two selection stages can be
    # exercised independently
    amf_dnns: list[str] = field(default_factory=lambda: ["internet", "edge"])
    upf_dnns: list[str] = field(default_factory=lambda: ["internet"])
    upf_slices: list[Snssai] | None = None  # defaults to `slices`
    subscribers: dict[str, Subscriber] = field(default_factory=_default_subscribers)
    amf_name: str = "ranprobe-amf"
    relative_capacity: int = 254
    guami: tuple[int, int, int] = (1, 1, 0)  # region, set, pointer
    pdu_address_prefix: str = "10.45.0."

    # timers (seconds)
    sm_command_timer: float = 6.0
    sm_command_retries: int = 4

    # behaviour toggles
    send_configuration_update: bool = True
    request_identity: bool = False
    request_imeisv: bool = True
    session_via_initial_context: bool = False
    integrity_alg: int = 2  # NIA number
    ciphering_alg: int = 2  # NEA number

    # deliberate misbehaviours, used as negative controls for the verdicts
    ignore_bad_ngsetup: bool = False
    unprotected_identity_request: bool = False
    accept_out_of_order_session: bool = False

    rng_seed: int | None = None

    def __post_init__(self) -> None:
        if not self.subscribers:
            raise ValueError("subscriber directory must not be empty")
        if self.sm_command_timer <= 0:
            raise ValueError("mode-command timer must be positive")
        if self.upf_slices is None:
            self.upf_slices = list(self.slices)

    def serves_plmn(self, mcc: str, mnc: str) -> bool:
        return (mcc, mnc) in self.plmns

    def serves_tac(self, tac: bytes) -> bool:
        return tac in self.tacs

    def serves_slice(self, s: Snssai) -> bool:
        return s in self.slices
