"""Cryptographic primitives behind the handshake.

Pure operations with no protocol logic: Diffie-Hellman over fixed MODP
groups, HMAC-based session-key derivation, encrypt-then-MAC envelopes,
RSA signatures, and hashing. All large integers are encoded big-endian
at the fixed width of the group modulus, both on the wire and inside
every transcript hash.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass
from typing import Callable

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import padding, rsa
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import CodecError, ConfigError, CryptoError, IntegrityError, ProtocolViolation

# Byte source signature: n -> n random bytes. Injectable so deterministic
# test networks can replay byte-identical handshakes.
RandomSource = Callable[[int], bytes]

DIGEST_SIZE = 32
NONCE_SIZE = 32
KEY_SIZE = 32
ENVELOPE_IV_SIZE = 16
ENVELOPE_TAG_SIZE = 32


def secure_random(n: int) -> bytes:
    try:
        return secrets.token_bytes(n)
    except OSError as exc:  # pragma: no cover - OS entropy failure
        raise CryptoError(f"entropy source failure: {exc}") from exc


def hash_data(data: bytes) -> bytes:
    """Collision-resistant 32-byte digest (SHA-256)."""
    return hashlib.sha256(data).digest()


def keyed_hash(key: bytes, data: bytes) -> bytes:
    """HMAC-SHA256; the keyed hash used everywhere a key separates contexts."""
    return hmac.new(key, data, hashlib.sha256).digest()


def int_to_bytes(value: int, width: int) -> bytes:
    return value.to_bytes(width, "big")


def bytes_to_int(data: bytes) -> int:
    return int.from_bytes(data, "big")


@dataclass(frozen=True)
class DhGroup:
    """A fixed, named MODP group. Instances are module constants, never
    parsed from user input; the generator and modulus come from the
    published safe-prime groups."""

    name: str
    prime_modulus: int
    generator: int
    exponent_bits: int

    def __post_init__(self):
        if not 1 < self.generator < self.prime_modulus - 1:
            raise ConfigError(f"generator out of range for group {self.name}")
        if self.exponent_bits < 1:
            raise ConfigError("exponent_bits must be positive")

    @property
    def modulus_bytes(self) -> int:
        return (self.prime_modulus.bit_length() + 7) // 8

    def encode_element(self, value: int) -> bytes:
        return int_to_bytes(value, self.modulus_bytes)


# 2048-bit MODP group 14 (generator 2): p = 2^2048 - 2^1984 - 1 + 2^64*(floor(2^1918*pi) + 124476)
MODP_2048 = DhGroup(
    name="modp2048",
    prime_modulus=int(
        "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
        "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
        "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
        "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05"
        "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb"
        "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
        "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718"
        "3995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff",
        16,
    ),
    generator=2,
    exponent_bits=384,
)

# 768-bit MODP group (generator 2): p = 2^768 - 2^704 - 1 + 2^64*(floor(2^638*pi) + 149686)
# Reduced-size profile for fast test runs; not for deployment.
MODP_768 = DhGroup(
    name="modp768",
    prime_modulus=int(
        "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
        "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
        "4fe1356d6d51c245e485b576625e7ec6f44c42e9a63a3620ffffffffffffffff",
        16,
    ),
    generator=2,
    exponent_bits=256,
)

GROUPS_BY_NAME = {g.name: g for g in (MODP_2048, MODP_768)}

MIN_EXPONENT_BITS = 256


@dataclass(frozen=True)
class DhKeyPair:
    group: DhGroup
    secret_exponent: int
    public_exponential: int

    def __post_init__(self):
        if _is_degenerate(self.public_exponential, self.group):
            raise ProtocolViolation("degenerate public exponential")


def _is_degenerate(value: int, group: DhGroup) -> bool:
    return not 1 < value < group.prime_modulus - 1


def generate_dh_keypair(group: DhGroup, rand: RandomSource = secure_random) -> DhKeyPair:
    """Fresh ephemeral keypair with the secret drawn uniformly from
    [2^(bits-1), 2^bits)."""
    if group.exponent_bits < MIN_EXPONENT_BITS:
        raise ConfigError(f"group {group.name}: exponent width below minimum")
    bits = group.exponent_bits
    while True:
        raw = bytes_to_int(rand((bits + 7) // 8))
        secret = (1 << (bits - 1)) | (raw & ((1 << (bits - 1)) - 1))
        public = pow(group.generator, secret, group.prime_modulus)
        if not _is_degenerate(public, group):
            return DhKeyPair(group=group, secret_exponent=secret, public_exponential=public)


def compute_shared_secret(own: DhKeyPair, peer_exponential: int, group: DhGroup) -> bytes:
    """Raw shared secret, big-endian at the modulus width.

    Degenerate peer values (0, 1, p-1, or out of range) force the whole
    secret into a tiny subgroup, so they abort the connection here rather
    than later.
    """
    if _is_degenerate(peer_exponential, group):
        raise ProtocolViolation("degenerate peer exponential")
    shared = pow(peer_exponential, own.secret_exponent, group.prime_modulus)
    return group.encode_element(shared)


def generate_nonce(rand: RandomSource = secure_random) -> bytes:
    return rand(NONCE_SIZE)


@dataclass(frozen=True)
class SessionKeys:
    """Channel keys derived from one handshake: k_e encrypts, k_a authenticates."""

    k_dh: bytes
    k_e: bytes
    k_a: bytes


def derive_session_keys(k_dh: bytes, initiator_nonce: bytes, responder_nonce: bytes) -> SessionKeys:
    """Derive the encryption and MAC keys from the shared secret.

    Both sides call this with the same argument order (initiator nonce
    first) so the result is byte-identical. The "1"/"2" trailing labels
    are single ASCII bytes and are the only difference between the two
    derivations, which guarantees k_e != k_a.
    """
    if not k_dh:
        raise CryptoError("empty shared secret")
    base = initiator_nonce + responder_nonce
    k_e = keyed_hash(k_dh, base + b"1")
    k_a = keyed_hash(k_dh, base + b"2")
    return SessionKeys(k_dh=k_dh, k_e=k_e, k_a=k_a)


@dataclass(frozen=True)
class SealedEnvelope:
    """AES-256-CTR ciphertext with an HMAC-SHA256 tag over iv || ciphertext."""

    iv: bytes
    ciphertext: bytes
    tag: bytes

    def to_bytes(self) -> bytes:
        return self.iv + self.ciphertext + self.tag

    @classmethod
    def from_bytes(cls, data: bytes) -> "SealedEnvelope":
        if len(data) < ENVELOPE_IV_SIZE + ENVELOPE_TAG_SIZE:
            raise CodecError("envelope shorter than iv + tag", offset=len(data))
        return cls(
            iv=data[:ENVELOPE_IV_SIZE],
            ciphertext=data[ENVELOPE_IV_SIZE:-ENVELOPE_TAG_SIZE],
            tag=data[-ENVELOPE_TAG_SIZE:],
        )


def _ctr_transform(key: bytes, iv: bytes, data: bytes) -> bytes:
    cipher = Cipher(algorithms.AES(key), modes.CTR(iv))
    ctx = cipher.encryptor()
    return ctx.update(data) + ctx.finalize()


def seal(message: bytes, keys: SessionKeys, rand: RandomSource = secure_random) -> SealedEnvelope:
    """Encrypt-then-MAC: ciphertext first, then the tag over iv || ciphertext."""
    iv = rand(ENVELOPE_IV_SIZE)
    ciphertext = _ctr_transform(keys.k_e, iv, message)
    tag = keyed_hash(keys.k_a, iv + ciphertext)
    return SealedEnvelope(iv=iv, ciphertext=ciphertext, tag=tag)


def open_envelope(envelope: SealedEnvelope, keys: SessionKeys) -> bytes:
    """Verify the tag in constant time, then decrypt. Never partially decrypts."""
    if len(envelope.iv) != ENVELOPE_IV_SIZE or len(envelope.tag) != ENVELOPE_TAG_SIZE:
        raise CodecError("malformed envelope framing")
    expected = keyed_hash(keys.k_a, envelope.iv + envelope.ciphertext)
    if not hmac.compare_digest(expected, envelope.tag):
        raise IntegrityError("envelope authentication failed")
    return _ctr_transform(keys.k_e, envelope.iv, envelope.ciphertext)


@dataclass(frozen=True)
class SignatureKeyPair:
    signing_key: rsa.RSAPrivateKey
    verification_key: rsa.RSAPublicKey


_SIGNATURE_PADDING = padding.PKCS1v15()
_SIGNATURE_HASH = hashes.SHA256()


def generate_signature_keypair(bits: int = 2048) -> SignatureKeyPair:
    private = rsa.generate_private_key(public_exponent=65537, key_size=bits)
    return SignatureKeyPair(signing_key=private, verification_key=private.public_key())


def sign(data: bytes, key: SignatureKeyPair) -> bytes:
    return key.signing_key.sign(data, _SIGNATURE_PADDING, _SIGNATURE_HASH)


def verify(data: bytes, signature: bytes, verification_key: rsa.RSAPublicKey) -> bool:
    try:
        verification_key.verify(signature, data, _SIGNATURE_PADDING, _SIGNATURE_HASH)
        return True
    except InvalidSignature:
        return False


def signing_key_to_pem(key: rsa.RSAPrivateKey) -> bytes:
    return key.private_bytes(
        serialization.Encoding.PEM,
        serialization.PrivateFormat.PKCS8,
        serialization.NoEncryption(),
    )


def verification_key_to_pem(key: rsa.RSAPublicKey) -> bytes:
    return key.public_bytes(
        serialization.Encoding.PEM,
        serialization.PublicFormat.SubjectPublicKeyInfo,
    )


def signing_key_from_pem(pem: bytes) -> SignatureKeyPair:
    try:
        key = serialization.load_pem_private_key(pem, password=None)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse private key: {exc}") from exc
    if not isinstance(key, rsa.RSAPrivateKey):
        raise ConfigError("private key is not RSA")
    return SignatureKeyPair(signing_key=key, verification_key=key.public_key())


def verification_key_from_pem(pem: bytes) -> rsa.RSAPublicKey:
    try:
        key = serialization.load_pem_public_key(pem)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse public key: {exc}") from exc
    if not isinstance(key, rsa.RSAPublicKey):
        raise ConfigError("public key is not RSA")
    return key


def fingerprint(data: bytes) -> str:
    """Short hex fingerprint used in operator output instead of key bytes."""
    return hash_data(data)[:8].hex()
