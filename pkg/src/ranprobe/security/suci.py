"""Subscriber identifier concealment (null protection scheme only)."""

from __future__ import annotations

from ..nas.ies import IdentityKind, MobileIdentity, Suci

NULL_SCHEME = 0


class UnsupportedScheme(ValueError):
    pass


def conceal_supi(
    supi: str,
    mcc: str | None = None,
    mnc: str | None = None,
    routing_indicator: str = "0000",
    scheme: int = NULL_SCHEME,
) -> MobileIdentity:
    """Build the concealed identity sent in clear-text registration.

    With the null scheme the scheme output is simply the MSIN digits; the
    home-network PLMN defaults to the leading SUPI digits (2-digit MNC).
    """
    if scheme != NULL_SCHEME:
        raise UnsupportedScheme(f"protection scheme {scheme} not supported (null only)")
    if len(supi) != 15 or not supi.isdigit():
        raise ValueError(f"supi must be 15 decimal digits, got {supi!r}")
    mcc = mcc or supi[:3]
    mnc = mnc or supi[3:5]
    msin = supi[len(mcc) + len(mnc) :]
    return MobileIdentity(
        kind=IdentityKind.SUCI,
        suci=Suci(
            mcc=mcc,
            mnc=mnc,
            routing_indicator=routing_indicator,
            protection_scheme=NULL_SCHEME,
            home_network_key_id=0,
            scheme_output=msin,
        ),
    )


def reveal_supi(identity: MobileIdentity) -> str | None:
    """Recover the permanent identifier from a null-scheme concealed one."""
    if identity.kind != IdentityKind.SUCI or identity.suci is None:
        return None
    if identity.suci.protection_scheme != NULL_SCHEME:
        return None
    return identity.suci.mcc + identity.suci.mnc + identity.suci.scheme_output
