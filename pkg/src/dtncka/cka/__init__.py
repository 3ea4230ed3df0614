"""Continuous group key agreement over a left-balanced ratchet tree."""

from .group import (
    BadConfirmation,
    EmptyGroupId,
    EpochMismatch,
    GroupState,
    NotAddressedToMe,
    OwnCommit,
    PathInconsistent,
    RemovedFromGroup,
    WouldEmptyGroup,
    commit,
    create_group,
    decode_group_state,
    encode_group_state,
    export_secret,
    group_context_hash,
    join_from_welcome,
    make_add_proposal,
    make_remove_proposal,
    make_update_proposal,
    process_commit,
    validate_proposal,
)
from .keyschedule import (
    BadLength,
    BadSecretLength,
    EpochSecrets,
    derive_epoch,
    derive_epoch_from_joiner,
    derive_joiner_secret,
    export_from,
)
from .messages import (
    CommitMessage,
    Identity,
    InvalidProposal,
    PreKeyBundle,
    Proposal,
    WelcomeMessage,
    decode_commit,
    decode_prekey_bundle_bytes,
    decode_welcome,
    encode_commit,
    encode_prekey_bundle,
    encode_welcome,
    new_identity,
    new_prekey_bundle,
)
from .suites import (
    DEFAULT_SUITE,
    REGISTRY,
    BadSignature,
    CipherSuiteProfile,
    UnsupportedSuite,
)
from .tree import BlankLeaf, RatchetTree, TreeNode, copath_resolution
from .treemath import EmptyTree, tree_math

__all__ = [
    "BadConfirmation",
    "BadLength",
    "BadSecretLength",
    "BadSignature",
    "BlankLeaf",
    "CipherSuiteProfile",
    "CommitMessage",
    "DEFAULT_SUITE",
    "EmptyGroupId",
    "EmptyTree",
    "EpochMismatch",
    "EpochSecrets",
    "GroupState",
    "Identity",
    "InvalidProposal",
    "NotAddressedToMe",
    "OwnCommit",
    "PathInconsistent",
    "PreKeyBundle",
    "Proposal",
    "RatchetTree",
    "REGISTRY",
    "RemovedFromGroup",
    "TreeNode",
    "UnsupportedSuite",
    "WelcomeMessage",
    "WouldEmptyGroup",
    "commit",
    "copath_resolution",
    "create_group",
    "decode_commit",
    "decode_group_state",
    "decode_prekey_bundle_bytes",
    "decode_welcome",
    "derive_epoch",
    "derive_epoch_from_joiner",
    "derive_joiner_secret",
    "encode_commit",
    "encode_group_state",
    "encode_prekey_bundle",
    "encode_welcome",
    "export_from",
    "export_secret",
    "group_context_hash",
    "join_from_welcome",
    "make_add_proposal",
    "make_remove_proposal",
    "make_update_proposal",
    "new_identity",
    "new_prekey_bundle",
    "process_commit",
    "tree_math",
    "validate_proposal",
]
