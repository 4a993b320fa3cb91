"""Exception taxonomy shared across the package.

Every failure a caller may need to branch on gets its own class; protocol
check failures additionally carry a structured :class:`AbortReason` so they
can be mapped onto wire-level abort frames and CLI exit codes.
"""

from __future__ import annotations

import enum


class StcpError(Exception):
    """Base class for all errors raised by this package."""


class CryptoError(StcpError):
    """Unrecoverable failure in a cryptographic primitive (e.g. entropy source)."""


class ProtocolViolation(StcpError):
    """Peer-supplied cryptographic value violates a hard precondition.

    Raised for degenerate Diffie-Hellman public values; the connection must
    abort, never continue with a weak secret.
    """


class IntegrityError(StcpError):
    """Authentication tag mismatch on a sealed envelope."""


class CodecError(StcpError):
    """Malformed wire frame or envelope.

    Carries a byte offset when the failure position is known.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.offset = offset


class ConfigError(StcpError):
    """Invalid configuration, key material, or out-of-range parameter."""


class ProvisioningError(StcpError):
    """Peer is not present in the local registry; the connection never opens."""


class StateError(StcpError):
    """Operation invoked in a state that does not permit it."""


class PersistenceError(StcpError):
    """A key-store write failed."""


class ExpiredSessionError(StcpError):
    """Persisted master keys belong to a different flight."""


class UnrecoverableSessionError(StcpError):
    """No checksum-valid copy of the master session record exists."""


class AbortReason(enum.Enum):
    """Why a handshake was torn down.

    The first seven values map one-to-one onto the distinct verification
    steps of the handshake; the remainder cover policy, liveness, and
    role-arbitration outcomes.
    """

    COOKIE_MISMATCH = "CookieMismatch"
    DEGENERATE_EXPONENTIAL = "DegenerateExponential"
    SEAL_INTEGRITY = "SealIntegrity"
    PEER_SIGNATURE_INVALID = "PeerSignatureInvalid"
    ATTESTATION_SIGNATURE_INVALID = "AttestationSignatureInvalid"
    ATTESTATION_STALE = "AttestationStale"
    ATTESTATION_STATE_MISMATCH = "AttestationStateMismatch"
    ATTESTATION_MISSING = "AttestationMissing"
    TIMEOUT = "Timeout"
    INITIATION_SUPERSEDED = "InitiationSuperseded"
    PEER_ABORT = "PeerAbort"

    @property
    def wire_code(self) -> int:
        return _ABORT_WIRE_CODES[self]

    @classmethod
    def from_wire_code(cls, code: int) -> "AbortReason":
        try:
            return _ABORT_REASON_BY_CODE[code]
        except KeyError:
            raise CodecError(f"unknown abort reason code {code}") from None


_ABORT_WIRE_CODES = {reason: i + 1 for i, reason in enumerate(AbortReason)}
_ABORT_REASON_BY_CODE = {code: reason for reason, code in _ABORT_WIRE_CODES.items()}


class ProtocolAbort(StcpError):
    """A handshake verification step failed; the session is terminally aborted."""

    def __init__(self, reason: AbortReason, detail: str = ""):
        super().__init__(f"{reason.value}" + (f": {detail}" if detail else ""))
        self.reason = reason


class SilentDrop(StcpError):
    """Frame must be discarded without any reply (unauthenticated garbage)."""
