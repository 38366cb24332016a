"""Credential math, key hierarchy, and NAS protection."""

from .aka import (
    SQN_WINDOW,
    AkaSuccess,
    AuthVector,
    MacFailure,
    SyncFailure,
    UsimCredentials,
    build_auts,
    generate_vector,
    recover_sqn_from_auts,
    verify_autn_or_resync,
)
from .context import (
    DOWNLINK,
    NAS_BEARER,
    UPLINK,
    CipherAlg,
    CountReuse,
    IntegrityAlg,
    NasCount,
    SecurityContext,
    nas_crypt,
    nas_mac,
)
from .keys import (
    derive_kamf,
    derive_kausf,
    derive_key_hierarchy,
    derive_kgnb,
    derive_kseaf,
    derive_nas_key,
    derive_res_star,
    kdf,
    serving_network_name,
)
from .milenage import MilenageOutput, derive_opc, milenage
from .suci import NULL_SCHEME, UnsupportedScheme, conceal_supi, reveal_supi

__all__ = [name for name in dir() if not name.startswith("_")]
