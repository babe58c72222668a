"""Threshold-signature and source-provenance primitives.

The default scheme is a deterministic structural stand-in: tags are keyed
digests and the aggregate is a canonical sorted digest of the contributor
tags. It enforces the functional contract (field binding, distinct
contributors, exact threshold size) without claiming cryptographic security;
a pairing-based backend can be slotted behind the same call surface later.

Data values are canonically encoded as fixed-precision decimal strings so
digests never depend on platform float formatting.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

VALUE_PRECISION = 6


class InsufficientPartials(ValueError):
    """Fewer consistent partial signatures than the threshold requires."""


class InconsistentMessage(ValueError):
    """Partial signatures disagree on task id or message digest."""


def encode_value(value: float) -> bytes:
    return f"{value:.{VALUE_PRECISION}f}".encode("ascii")


def _digest(*parts: bytes) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(len(part).to_bytes(4, "big"))
        h.update(part)
    return h.digest()


def _int_bytes(n: int) -> bytes:
    return n.to_bytes(8, "big", signed=True)


def message_digest(task_id: int, value: float) -> bytes:
    """Canonical digest of (task id, value) signed by every partial."""
    return _digest(b"msg", _int_bytes(task_id), encode_value(value))


@dataclass(frozen=True)
class NodeKeyPair:
    node_id: int
    sk: bytes
    pk: bytes


@dataclass(frozen=True)
class GroupKey:
    """Binds the full registered node key set and the threshold t."""

    threshold: int
    member_keys: tuple[bytes, ...]  # indexed by node_id
    value: bytes

    def key_of(self, node_id: int) -> bytes | None:
        if 0 <= node_id < len(self.member_keys):
            return self.member_keys[node_id]
        return None


@dataclass(frozen=True)
class PartialSignature:
    task_id: int
    node_id: int
    msg_digest: bytes
    tag: bytes


@dataclass(frozen=True)
class GroupSignature:
    task_id: int
    contributors: tuple[int, ...]
    msg_digest: bytes
    value: bytes


@dataclass(frozen=True)
class SourceKeyPair:
    source_id: int
    sk: bytes
    verify_key: bytes


@dataclass(frozen=True)
class SourceProof:
    """Non-repudiable binding of (node, source, task, data) to a source key."""

    task_id: int
    node_id: int
    source_id: int
    data_digest: bytes
    tag: bytes


# Certificate set: source_id -> source verification key.
CertificateSet = dict[int, bytes]


def _derive_pk(sk: bytes) -> bytes:
    return _digest(b"node-pk", sk)


def keygen(seed: int, n: int, t: int) -> tuple[list[NodeKeyPair], GroupKey]:
    """Dealer-style setup of n node key pairs and the group key for threshold t."""
    if not 1 <= t <= n:
        raise ValueError(f"threshold t={t} must satisfy 1 <= t <= N={n}")
    rng = random.Random(seed)
    keys = []
    for node_id in range(n):
        sk = rng.randbytes(32)
        keys.append(NodeKeyPair(node_id=node_id, sk=sk, pk=_derive_pk(sk)))
    member_keys = tuple(k.pk for k in keys)
    group_value = _digest(b"group", _int_bytes(t), *member_keys)
    return keys, GroupKey(threshold=t, member_keys=member_keys, value=group_value)


def source_keygen(seed: int, m: int) -> tuple[list[SourceKeyPair], CertificateSet]:
    """Per-source certificate keys; the CertificateSet is what tasks publish."""
    rng = random.Random(seed ^ 0x5EED50)
    keys = []
    for source_id in range(m):
        sk = rng.randbytes(32)
        keys.append(SourceKeyPair(source_id=source_id, sk=sk,
                                  verify_key=_digest(b"source-vk", sk)))
    certs = {k.source_id: k.verify_key for k in keys}
    return keys, certs


def _partial_tag(pk: bytes, task_id: int, msg: bytes) -> bytes:
    return _digest(b"partial", pk, _int_bytes(task_id), msg)


def sign_partial(key: NodeKeyPair, task_id: int, value: float) -> PartialSignature:
    msg = message_digest(task_id, value)
    return PartialSignature(task_id=task_id, node_id=key.node_id, msg_digest=msg,
                            tag=_partial_tag(key.pk, task_id, msg))


def verify_partial(sig: PartialSignature, pk: bytes, task_id: int, value: float) -> bool:
    msg = message_digest(task_id, value)
    return (sig.task_id == task_id
            and sig.msg_digest == msg
            and sig.tag == _partial_tag(pk, task_id, msg))


def aggregate(partials: list[PartialSignature], t: int) -> GroupSignature:
    """Combine exactly t consistent partials into a group signature.

    The caller chooses the subset; when more than t partials are supplied the
    first t in node-id order are used so aggregation stays deterministic.
    """
    if not partials:
        raise InsufficientPartials("no partial signatures supplied")
    task_id = partials[0].task_id
    msg = partials[0].msg_digest
    for p in partials:
        if p.task_id != task_id or p.msg_digest != msg:
            raise InconsistentMessage("partials cover different task ids or messages")
    by_node = {p.node_id: p for p in partials}
    if len(by_node) < t:
        raise InsufficientPartials(
            f"need {t} distinct contributors, have {len(by_node)}")
    chosen = [by_node[node_id] for node_id in sorted(by_node)][:t]
    contributors = tuple(p.node_id for p in chosen)
    value = _digest(b"aggregate", _int_bytes(t), msg, *(p.tag for p in chosen))
    return GroupSignature(task_id=task_id, contributors=contributors,
                          msg_digest=msg, value=value)


def verify_group(sig: GroupSignature, group_key: GroupKey, value: float) -> bool:
    """True iff sig aggregates exactly t distinct registered nodes over value."""
    t = group_key.threshold
    if len(sig.contributors) != t or len(set(sig.contributors)) != t:
        return False
    msg = message_digest(sig.task_id, value)
    if sig.msg_digest != msg:
        return False
    tags = []
    for node_id in sorted(sig.contributors):
        pk = group_key.key_of(node_id)
        if pk is None:
            return False
        tags.append(_partial_tag(pk, sig.task_id, msg))
    expected = _digest(b"aggregate", _int_bytes(t), msg, *tags)
    return sig.value == expected


def _proof_tag(verify_key: bytes, task_id: int, node_id: int, source_id: int,
               data_digest: bytes) -> bytes:
    return _digest(b"source-proof", verify_key, _int_bytes(task_id),
                   _int_bytes(node_id), _int_bytes(source_id), data_digest)


def issue_source_proof(source_key: SourceKeyPair, task_id: int, node_id: int,
                       value: float) -> SourceProof:
    """Proof that `value` came out of the session between node and source."""
    data_digest = _digest(b"data", _int_bytes(task_id), encode_value(value))
    return SourceProof(task_id=task_id, node_id=node_id,
                       source_id=source_key.source_id, data_digest=data_digest,
                       tag=_proof_tag(source_key.verify_key, task_id, node_id,
                                      source_key.source_id, data_digest))


def proof_data_digest(task_id: int, value: float) -> bytes:
    return _digest(b"data", _int_bytes(task_id), encode_value(value))


def verify_source_proof(proof: SourceProof, certs: CertificateSet) -> bool:
    verify_key = certs.get(proof.source_id)
    if verify_key is None:
        return False
    expected = _proof_tag(verify_key, proof.task_id, proof.node_id,
                          proof.source_id, proof.data_digest)
    return proof.tag == expected


def verify_div(proofs: list[SourceProof], certs: CertificateSet, k: int) -> bool:
    """True iff every proof verifies and the proofs span at least k distinct sources."""
    if not all(verify_source_proof(p, certs) for p in proofs):
        return False
    return len({p.source_id for p in proofs}) >= k
