"""The fixed test catalog: eleven conformance and seven robustness cases."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CatalogEntry:
    case_id: str
    name: str
    protocol: str  # "NAS" | "NGAP"
    procedures: str
    messages: str


CONFORMANCE = (
    CatalogEntry(
        "CT-01",
        "Registration",
        "NAS",
        "Registration",
        "Registration Request, Registration Accept, and Registration Complete",
    ),
    CatalogEntry(
        "CT-02",
        "Primary authentication and key agreement",
        "NAS",
        "Primary authentication and key agreement",
        "Authentication Request and Authentication Response",
    ),
    CatalogEntry(
        "CT-03",
        "Identification",
        "NAS",
        "Identification",
        "Identity Request and Identity Response",
    ),
    CatalogEntry(
        "CT-04",
        "Transport",
        "NAS",
        "Transport",
        "UL NAS transport and DL NAS transport",
    ),
    CatalogEntry(
        "CT-05",
        "Security mode",
        "NAS",
        "Security mode",
        "Security Mode Command and Security Mode Complete",
    ),
    CatalogEntry(
        "CT-06",
        "Generic UE configuration update",
        "NAS",
        "Generic UE configuration update",
        "Configuration Update Command",
    ),
    CatalogEntry(
        "CT-07",
        "Session management",
        "NAS",
        "Session management",
        "PDU Establishment Request and PDU Establishment Accept",
    ),
    CatalogEntry(
        "CT-08",
        "Interface management",
        "NGAP",
        "Interface management",
        "NG Setup Request and NG Setup Response",
    ),
    CatalogEntry(
        "CT-09",
        "Transport NAS messages",
        "NGAP",
        "Transport of NAS messages",
        "Downlink NAS Transport and Uplink NAS Transport",
    ),
    CatalogEntry(
        "CT-10",
        "UE context management",
        "NGAP",
        "UE context management",
        "Initial Context Setup Request and Initial Context Setup Response",
    ),
    CatalogEntry(
        "CT-11",
        "PDU session management",
        "NGAP",
        "PDU session management",
        "PDU Session Resource Setup Request and PDU Session Resource Setup Response",
    ),
)

ROBUSTNESS = (
    CatalogEntry(
        "RT-01",
        "Registration",
        "NAS",
        "Registration",
        "Registration Request and Registration Reject",
    ),
    CatalogEntry(
        "RT-02",
        "Authentication",
        "NAS",
        "Primary authentication and key agreement",
        "Authentication Request, Authentication Response, Authentication Failure and Authentication Reject",
    ),
    CatalogEntry(
        "RT-03",
        "Security",
        "NAS",
        "Security mode, Registration and Identification",
        "Security Mode Command, Security Mode Complete, Registration Reject, Identity Request and Identity Response",
    ),
    CatalogEntry(
        "RT-04",
        "SMF selection",
        "NAS",
        "Transport",
        "UL NAS Transport and DL NAS Transport",
    ),
    CatalogEntry(
        "RT-05",
        "UPF selection",
        "NAS",
        "Transport, Session management",
        "UL NAS Transport, DL NAS Transport, PDU Establishment Request and PDU Establishment Reject",
    ),
    CatalogEntry(
        "RT-06",
        "NAS flow validate",
        "NAS",
        "Security mode, Transport, Session management and Registration",
        "Security Mode Command, UL NAS Transport, PDU Session Establishment Request, Security Mode Complete and Registration Accept",
    ),
    CatalogEntry(
        "RT-07",
        "Interface management",
        "NGAP",
        "Interface Management",
        "NG Setup Request and NG Setup Failure",
    ),
)

CATALOG = {entry.case_id: entry for entry in CONFORMANCE + ROBUSTNESS}
