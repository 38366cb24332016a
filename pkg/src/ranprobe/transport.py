"""Byte transport: message-oriented NG-C and GTP-U datagrams.

NG-C prefers a kernel SCTP socket (destination port 38412, one signaling
PDU per message).  Hosts without SCTP fall back to a TCP shim that frames
each PDU with a 4-octet big-endian length; runs over the shim are marked
as such in reports.  NG-U is plain GTPv1-U over UDP with the 8-octet
mandatory header only.
"""

from __future__ import annotations

import socket
import struct
import threading
from dataclasses import dataclass

NGAP_PORT = 38412
NGAP_PPID = 60
GTPU_PORT = 2152
GTPU_MAX_INNER = 1400  # keep encapsulated datagrams under typical MTU

_GTPU_FLAGS = 0x30  # version 1, protocol type GTP, no options
_GTPU_GPDU = 0xFF


class TransportError(Exception):
    pass


class ConnectionRefused(TransportError):
    pass


class TransportTimeout(TransportError):
    pass


class PeerClosed(TransportError):
    pass


class PayloadTooLarge(TransportError):
    pass


class GtpuDecodeError(TransportError):
    def __init__(self, kind: str, reason: str = ""):
        super().__init__(f"{kind}" + (f": {reason}" if reason else ""))
        self.kind = kind


def sctp_supported() -> bool:
    try:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM, socket.IPPROTO_SCTP)
    except OSError:
        return False
    sock.close()
    return True


class NgcAssociation:
    """One signaling association; boundary-preserving send/recv."""

    def __init__(self, sock: socket.socket, shim: bool, tap=None):
        self._sock = sock
        self.shim = shim
        self._tap = tap  # callable(direction, octets) for the wire log
        self._rxbuf = b""
        self._send_lock = threading.Lock()
        self.open = True

    @property
    def transport_name(self) -> str:
        return "tcp-shim" if self.shim else "sctp"

    def send(self, pdu: bytes) -> None:
        if not self.open:
            raise PeerClosed("association closed")
        with self._send_lock:
            try:
                if self.shim:
                    self._sock.sendall(struct.pack(">I", len(pdu)) + pdu)
                else:
                    self._sock.send(pdu)
            except OSError as exc:
                self.open = False
                raise PeerClosed(str(exc)) from exc
        if self._tap:
            self._tap("out", pdu)

    def recv(self, timeout: float | None = None) -> bytes:
        """Return exactly one PDU or raise TransportTimeout/PeerClosed."""
        pdu = self._recv_shim(timeout) if self.shim else self._recv_sctp(timeout)
        if self._tap:
            self._tap("in", pdu)
        return pdu

    def _recv_sctp(self, timeout: float | None) -> bytes:
        self._sock.settimeout(timeout)
        try:
            data = self._sock.recv(65536)
        except socket.timeout as exc:
            raise TransportTimeout("no PDU within timeout") from exc
        except OSError as exc:
            self.open = False
            raise PeerClosed(str(exc)) from exc
        if not data:
            self.open = False
            raise PeerClosed("peer closed the association")
        return data

    def _recv_shim(self, timeout: float | None) -> bytes:
        import time as _time

        deadline = None if timeout is None else _time.monotonic() + timeout
        while True:
            if len(self._rxbuf) >= 4:
                (length,) = struct.unpack(">I", self._rxbuf[:4])
                if len(self._rxbuf) >= 4 + length:
                    pdu = self._rxbuf[4 : 4 + length]
                    self._rxbuf = self._rxbuf[4 + length :]
                    return pdu
            remaining = None if deadline is None else max(0.0, deadline - _time.monotonic())
            if remaining == 0.0:
                raise TransportTimeout("no PDU within timeout")
            self._sock.settimeout(remaining)
            try:
                chunk = self._sock.recv(65536)
            except socket.timeout as exc:
                raise TransportTimeout("no PDU within timeout") from exc
            except OSError as exc:
                self.open = False
                raise PeerClosed(str(exc)) from exc
            if not chunk:
                self.open = False
                raise PeerClosed("peer closed the association")
            self._rxbuf += chunk

    def close(self) -> None:
        self.open = False
        try:
            self._sock.close()
        except OSError:
            pass


def ngc_association(
    remote: str,
    port: int = NGAP_PORT,
    transport: str = "auto",
    timeout: float = 5.0,
    tap=None,
) -> NgcAssociation:
    """Connect to a core's signaling endpoint.

    ``transport``: "sctp", "tcp-shim", or "auto" (SCTP when the host
    supports it, shim otherwise).
    """
    if transport not in ("sctp", "tcp-shim", "auto"):
        raise ValueError(f"unknown transport {transport!r}")
    use_sctp = transport == "sctp" or (transport == "auto" and sctp_supported())
    if transport == "sctp" and not sctp_supported():
        raise TransportError("host lacks SCTP support; use the tcp-shim transport")
    proto = socket.IPPROTO_SCTP if use_sctp else 0
    try:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM, proto)
        sock.settimeout(timeout)
        sock.connect((remote, port))
    except ConnectionRefusedError as exc:
        raise ConnectionRefused(f"{remote}:{port} refused") from exc
    except OSError as exc:
        raise TransportError(f"connect to {remote}:{port} failed: {exc}") from exc
    if not use_sctp:
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return NgcAssociation(sock, shim=not use_sctp, tap=tap)


class NgcListener:
    """Server side of the association (used by the reference core)."""

    def __init__(self, address: str, port: int, transport: str = "auto"):
        use_sctp = transport == "sctp" or (transport == "auto" and sctp_supported())
        if transport == "sctp" and not sctp_supported():
            raise TransportError("host lacks SCTP support; use the tcp-shim transport")
        proto = socket.IPPROTO_SCTP if use_sctp else 0
        self._shim = not use_sctp
        try:
            self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM, proto)
            self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            self._sock.bind((address, port))
            self._sock.listen(8)
        except OSError as exc:
            raise TransportError(f"bind {address}:{port} failed: {exc}") from exc
        self.address, self.port = self._sock.getsockname()

    @property
    def transport_name(self) -> str:
        return "tcp-shim" if self._shim else "sctp"

    def accept(self, timeout: float | None = None) -> NgcAssociation:
        self._sock.settimeout(timeout)
        try:
            conn, _peer = self._sock.accept()
        except socket.timeout as exc:
            raise TransportTimeout("no incoming association") from exc
        if self._shim:
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        return NgcAssociation(conn, shim=self._shim)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


# -- GTP-U ---------------------------------------------------------------------


def gtpu_encap(teid: bytes, inner: bytes) -> bytes:
    """Mandatory 8-octet GTPv1-U header + payload."""
    if len(teid) != 4:
        raise ValueError(f"teid must be 4 octets, got {len(teid)}")
    if len(inner) > GTPU_MAX_INNER:
        raise PayloadTooLarge(f"{len(inner)} octets exceeds {GTPU_MAX_INNER}")
    return bytes([_GTPU_FLAGS, _GTPU_GPDU]) + struct.pack(">H", len(inner)) + teid + inner


def gtpu_decap(datagram: bytes) -> tuple[bytes, bytes]:
    """Inverse of :func:`gtpu_encap`; returns (teid, inner)."""
    if len(datagram) < 8:
        raise GtpuDecodeError("Truncated", f"{len(datagram)} octets, header needs 8")
    flags, mtype = datagram[0], datagram[1]
    if flags >> 5 != 1:
        raise GtpuDecodeError("BadVersion", f"version {flags >> 5}")
    if mtype != _GTPU_GPDU:
        raise GtpuDecodeError("Unsupported", f"message type {mtype:#04x}")
    (length,) = struct.unpack(">H", datagram[2:4])
    teid = datagram[4:8]
    if 8 + length > len(datagram):
        raise GtpuDecodeError("Truncated", "declared length exceeds datagram")
    return teid, datagram[8 : 8 + length]


@dataclass
class Tunnel:
    local_teid: bytes
    peer_teid: bytes
    peer_address: tuple[str, int]


class GtpuEndpoint:
    """UDP socket plus the tunnel bindings of one user-plane endpoint."""

    def __init__(self, address: str = "0.0.0.0", port: int = GTPU_PORT, tap=None):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((address, port))
        self.address, self.port = self._sock.getsockname()
        self.tunnels: dict[bytes, Tunnel] = {}
        self._tap = tap

    def bind_tunnel(self, local_teid: bytes, peer_teid: bytes, peer: tuple[str, int]) -> None:
        if local_teid == b"\x00\x00\x00\x00":
            raise ValueError("teid 0 is reserved")
        if local_teid in self.tunnels:
            raise ValueError(f"teid {local_teid.hex()} already bound")
        self.tunnels[local_teid] = Tunnel(local_teid, peer_teid, peer)

    def send(self, peer_teid: bytes, inner: bytes, peer: tuple[str, int]) -> None:
        datagram = gtpu_encap(peer_teid, inner)
        self._sock.sendto(datagram, peer)
        if self._tap:
            self._tap("out", datagram)

    def recv(self, timeout: float | None = None) -> tuple[bytes, bytes, tuple[str, int]]:
        """One datagram: (teid, inner payload, sender)."""
        self._sock.settimeout(timeout)
        try:
            datagram, peer = self._sock.recvfrom(65536)
        except socket.timeout as exc:
            raise TransportTimeout("no datagram within timeout") from exc
        if self._tap:
            self._tap("in", datagram)
        teid, inner = gtpu_decap(datagram)
        return teid, inner, peer

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass
