"""Group state machine: create, propose, commit, process, join, export.

A GroupState is one member's complete view: the ratchet tree, the current
epoch secrets and a transcript hash binding the commit history. Commits
apply proposals in Remove -> Update -> Add order, re-key the committer's
direct path with a fresh path-secret chain, and seal each level's secret to
the matching copath resolution. Processing a commit converges every member
on identical epoch secrets; old secrets are absent from the new state value,
which is the forward-secrecy mechanism.
"""

from __future__ import annotations

import hmac as _hmac
from dataclasses import dataclass, field, replace
from typing import Optional

from ..rng import Rng
from ..wire import TAG_GROUP_STATE, DecodeError, Reader, Writer
from . import suites, treemath as tm
from .keyschedule import (
    EpochSecrets,
    derive_epoch_from_joiner,
    derive_joiner_secret,
    export_from,
)
from .messages import (
    PROPOSAL_ADD,
    PROPOSAL_REMOVE,
    PROPOSAL_UPDATE,
    CommitMessage,
    GroupSnapshot,
    Identity,
    InvalidProposal,
    PathEntry,
    PreKeyBundle,
    Proposal,
    SealedSecret,
    WelcomeMessage,
)
from .suites import SECRET_LEN, CipherSuiteProfile, expand_label
from .tree import RatchetTree, TreeNode, copath_resolution_with_parents


class EmptyGroupId(Exception):
    pass


class WouldEmptyGroup(Exception):
    pass


class EpochMismatch(Exception):
    pass


class BadConfirmation(Exception):
    pass


class RemovedFromGroup(Exception):
    pass


class NotAddressedToMe(Exception):
    pass


class OwnCommit(Exception):
    """A committer must keep the state returned by commit(), not reprocess it."""


class PathInconsistent(Exception):
    """Derived path keys disagree with the commit's published keys."""


@dataclass
class GroupState:
    group_id: bytes
    suite: CipherSuiteProfile
    tree: RatchetTree
    secrets: EpochSecrets
    own_leaf_index: int
    transcript_hash: bytes
    signing_private_key: Optional[bytes] = None
    pending_update_private: Optional[bytes] = None
    retention_window: int = 0
    exporter_history: tuple[tuple[int, bytes], ...] = field(default_factory=tuple)

    @property
    def epoch(self) -> int:
        return self.secrets.epoch

    def member_count(self) -> int:
        return len(self.tree.member_leaves())

    def roster(self) -> list[tuple[int, Identity]]:
        return self.tree.roster()

    def own_identity(self) -> Identity:
        node = self.tree.leaf(self.own_leaf_index)
        assert node is not None and node.identity is not None
        return node.identity

    def exporter_for_epoch(self, epoch: int) -> Optional[bytes]:
        if epoch == self.secrets.epoch:
            return self.secrets.exporter_secret
        for past_epoch, secret in self.exporter_history:
            if past_epoch == epoch:
                return secret
        return None


def group_context_hash(
    group_id: bytes,
    suite: CipherSuiteProfile,
    epoch: int,
    tree_hash: bytes,
    transcript_hash: bytes,
) -> bytes:
    w = (
        Writer()
        .lp_bytes(group_id)
        .raw(suite.encode())
        .u64(epoch)
        .lp_bytes(tree_hash)
        .lp_bytes(transcript_hash)
    )
    return suites.sha256(w.getvalue())


def create_group(
    creator: Identity,
    suite: CipherSuiteProfile,
    group_id: bytes,
    rng: Rng,
    signing_key: Optional[bytes] = None,
) -> GroupState:
    """Single-member group at epoch 0, secrets drawn from the injected rng."""
    if not group_id:
        raise EmptyGroupId("group_id must be nonempty")
    suites.require_registered(suite)
    leaf_private, leaf_public = suites.kem_generate(rng)
    tree = RatchetTree([TreeNode(leaf_public, leaf_private, creator)])
    transcript_hash = bytes(32)
    ctx = group_context_hash(group_id, suite, 0, tree.tree_hash(), transcript_hash)
    joiner = derive_joiner_secret(rng.bytes(SECRET_LEN), rng.bytes(SECRET_LEN))
    secrets = derive_epoch_from_joiner(joiner, ctx, epoch=0)
    return GroupState(
        group_id=group_id,
        suite=suite,
        tree=tree,
        secrets=secrets,
        own_leaf_index=0,
        transcript_hash=transcript_hash,
        signing_private_key=signing_key,
    )


# -- Proposal construction and validation ------------------------------------

def make_add_proposal(state: GroupState, prekey: PreKeyBundle) -> Proposal:
    content_less = Proposal(PROPOSAL_ADD, state.own_leaf_index, add_prekey=prekey)
    sig = suites.sign(
        _require_signing_key(state),
        content_less.signed_content(state.group_id, state.epoch),
    )
    return replace(content_less, signature=sig)


def make_remove_proposal(state: GroupState, leaf: int) -> Proposal:
    content_less = Proposal(PROPOSAL_REMOVE, state.own_leaf_index, remove_leaf=leaf)
    sig = suites.sign(
        _require_signing_key(state),
        content_less.signed_content(state.group_id, state.epoch),
    )
    return replace(content_less, signature=sig)


def make_update_proposal(state: GroupState, rng: Rng) -> tuple[Proposal, GroupState]:
    """Fresh leaf key offer; the returned state retains the private half."""
    private, public = suites.kem_generate(rng)
    content_less = Proposal(
        PROPOSAL_UPDATE, state.own_leaf_index, update_public_key=public
    )
    sig = suites.sign(
        _require_signing_key(state),
        content_less.signed_content(state.group_id, state.epoch),
    )
    proposal = replace(content_less, signature=sig)
    return proposal, replace(state, pending_update_private=private)


def _require_signing_key(state: GroupState) -> bytes:
    if state.signing_private_key is None:
        raise InvalidProposal("this member holds no signing key")
    return state.signing_private_key


def validate_proposal(state: GroupState, proposal: Proposal) -> None:
    proposer_node = None
    if proposal.proposer < state.tree.n_leaves:
        proposer_node = state.tree.leaf(proposal.proposer)
    if proposer_node is None or proposer_node.identity is None:
        raise InvalidProposal(f"proposer leaf {proposal.proposer} is not a member")
    try:
        suites.verify(
            proposer_node.identity.signature_public_key,
            proposal.signed_content(state.group_id, state.epoch),
            proposal.signature,
        )
    except suites.BadSignature:
        raise InvalidProposal("proposal signature invalid") from None

    if proposal.kind == PROPOSAL_ADD:
        pkb = proposal.add_prekey
        assert pkb is not None
        try:
            pkb.verify()
        except suites.BadSignature:
            raise InvalidProposal("pre-key bundle signature invalid") from None
        if pkb.suite != state.suite:
            raise InvalidProposal("pre-key bundle suite differs from group suite")
        if state.tree.find_leaf_by_name(pkb.identity.name) is not None:
            raise InvalidProposal(f"{pkb.identity.name!r} is already a member")
    elif proposal.kind == PROPOSAL_REMOVE:
        target = proposal.remove_leaf
        assert target is not None
        if target >= state.tree.n_leaves or state.tree.leaf(target) is None:
            raise InvalidProposal(f"remove target {target} does not exist or is blank")
    elif proposal.kind == PROPOSAL_UPDATE:
        if (
            proposal.update_public_key is None
            or len(proposal.update_public_key) != suites.KEM_PUBLIC_LEN
        ):
            raise InvalidProposal("update public key must be 32 bytes")
    else:
        raise InvalidProposal(f"unknown proposal kind {proposal.kind}")


def _apply_proposals(
    state: GroupState, tree: RatchetTree, proposals: list[Proposal]
) -> tuple[list[int], list[tuple[int, PreKeyBundle]], list[int]]:
    """Mutates `tree` in Remove -> Update -> Add order.

    Returns (removed leaves, [(leaf, prekey)] for adds, updated leaves).
    Ties within a kind keep proposal-list order.
    """
    removes = [p for p in proposals if p.kind == PROPOSAL_REMOVE]
    updates = [p for p in proposals if p.kind == PROPOSAL_UPDATE]
    adds = [p for p in proposals if p.kind == PROPOSAL_ADD]

    removed: list[int] = []
    for p in removes:
        assert p.remove_leaf is not None
        if p.remove_leaf in removed:
            raise InvalidProposal(f"leaf {p.remove_leaf} removed twice")
        tree.remove_leaf(p.remove_leaf)
        removed.append(p.remove_leaf)

    updated: list[int] = []
    for p in updates:
        if p.proposer in removed:
            raise InvalidProposal("update from a removed member")
        node = tree.leaf(p.proposer)
        if node is None:
            raise InvalidProposal(f"update target leaf {p.proposer} is blank")
        assert p.update_public_key is not None
        tree.set_leaf(p.proposer, TreeNode(p.update_public_key, None, node.identity))
        tree.blank_direct_path(p.proposer)
        updated.append(p.proposer)

    added: list[tuple[int, PreKeyBundle]] = []
    for p in adds:
        assert p.add_prekey is not None
        leaf = tree.add_leaf(
            TreeNode(p.add_prekey.init_kem_public_key, None, p.add_prekey.identity)
        )
        added.append((leaf, p.add_prekey))
    return removed, added, updated


# -- Path secret chains -------------------------------------------------------

def _node_keypair(path_secret: bytes) -> tuple[bytes, bytes]:
    private = expand_label(path_secret, "node", b"", SECRET_LEN)
    return private, suites.kem_public_from_private(private)


def _next_path_secret(path_secret: bytes) -> bytes:
    return expand_label(path_secret, "path", b"", SECRET_LEN)


# -- Commit -------------------------------------------------------------------

def commit(
    state: GroupState, proposals: list[Proposal], rng: Rng
) -> tuple[Optional[GroupState], CommitMessage, Optional[WelcomeMessage]]:
    """Apply proposals and advance one epoch.

    Returns (new state, commit message, welcome-if-any-adds). The new state
    is None when the committer removed itself; the message then carries a
    sealed fresh commit secret instead of a path re-key.
    """
    committer = state.own_leaf_index
    if state.tree.leaf(committer) is None:
        raise InvalidProposal("committer is not a current member")
    for p in proposals:
        validate_proposal(state, p)

    new_tree = state.tree.clone()
    removed, added, updated = _apply_proposals(state, new_tree, list(proposals))

    self_removed = committer in removed
    if self_removed and not new_tree.member_leaves():
        raise WouldEmptyGroup("cannot remove the last member")

    new_epoch = state.epoch + 1
    path_public_keys: list[tuple[int, bytes]] = []
    path_entries: list[PathEntry] = []
    new_leaf_public_key: Optional[bytes] = None

    path_secret_at: dict[int, bytes] = {}
    if self_removed:
        commit_secret = rng.bytes(SECRET_LEN)
        root = tm.root(new_tree.n_leaves)
        sealed = []
        for recipient in new_tree.resolution(root):
            node = new_tree.node(recipient)
            assert node is not None
            enc, ct = suites.seal_to(state.suite, node.public_key, commit_secret, rng)
            sealed.append(SealedSecret(recipient, enc, ct))
        path_entries.append(PathEntry(root, tuple(sealed)))
    else:
        # Fresh chain: leaf secret, then one path secret per direct-path node.
        leaf_secret = rng.bytes(SECRET_LEN)
        leaf_private, leaf_public = _node_keypair(leaf_secret)
        own_node = new_tree.leaf(committer)
        assert own_node is not None
        new_tree.set_leaf(
            committer, TreeNode(leaf_public, leaf_private, own_node.identity)
        )
        new_leaf_public_key = leaf_public

        triples = copath_resolution_with_parents(new_tree, committer)
        sealed_for: dict[int, tuple[int, list[int]]] = {
            parent: (cp, res) for parent, cp, res in triples
        }

        path_secret = leaf_secret
        for parent in tm.direct_path(tm.leaf_node(committer), new_tree.n_leaves):
            path_secret = _next_path_secret(path_secret)
            path_secret_at[parent] = path_secret
            node_private, node_public = _node_keypair(path_secret)
            new_tree.nodes[parent] = TreeNode(node_public, node_private, None)
            path_public_keys.append((parent, node_public))
            if parent in sealed_for:
                _, res = sealed_for[parent]
                sealed = []
                for recipient in res:
                    node = new_tree.node(recipient)
                    assert node is not None
                    enc, ct = suites.seal_to(
                        state.suite, node.public_key, path_secret, rng
                    )
                    sealed.append(SealedSecret(recipient, enc, ct))
                path_entries.append(PathEntry(parent, tuple(sealed)))
        commit_secret = _next_path_secret(path_secret)

    unsigned = CommitMessage(
        epoch=state.epoch,
        committer=committer,
        proposals=tuple(proposals),
        new_leaf_public_key=new_leaf_public_key,
        path_public_keys=tuple(path_public_keys),
        path_entries=tuple(path_entries),
    )
    content = unsigned.content_bytes(state.group_id)
    new_transcript = suites.sha256(state.transcript_hash + suites.sha256(content))
    ctx = group_context_hash(
        state.group_id, state.suite, new_epoch, new_tree.tree_hash(), new_transcript
    )
    joiner_secret = derive_joiner_secret(state.secrets.init_secret, commit_secret)
    new_secrets = derive_epoch_from_joiner(joiner_secret, ctx, new_epoch)
    confirmation_tag = _hmac.new(
        new_secrets.confirmation_key, new_transcript, "sha256"
    ).digest()
    signature = suites.sign(_require_signing_key(state), content)
    msg = replace(unsigned, confirmation_tag=confirmation_tag, signature=signature)

    welcome = None
    if added:
        snapshot = GroupSnapshot(
            group_id=state.group_id,
            suite=state.suite,
            epoch=new_epoch,
            transcript_hash=new_transcript,
            public_tree=new_tree.encode(include_private=False),
        )
        sealed_joiners = []
        for leaf, prekey in added:
            # The committer's path refresh re-keys the joiner's ancestors from
            # their lowest common ancestor upward; hand the joiner that path
            # secret so it holds the privates of every non-blank ancestor.
            payload = joiner_secret + b"\x00"
            if not self_removed:
                for parent in tm.direct_path(
                    tm.leaf_node(committer), new_tree.n_leaves
                ):
                    if leaf in tm.subtree_leaves(parent, new_tree.n_leaves):
                        payload = joiner_secret + b"\x01" + path_secret_at[parent]
                        break
            enc, ct = suites.seal_to(
                state.suite, prekey.init_kem_public_key, payload, rng
            )
            sealed_joiners.append(SealedSecret(leaf, enc, ct))
        welcome = WelcomeMessage(snapshot, tuple(sealed_joiners))

    if self_removed:
        return None, msg, welcome

    new_state = replace(
        state,
        tree=new_tree,
        secrets=new_secrets,
        transcript_hash=new_transcript,
        pending_update_private=None,
        exporter_history=_rolled_history(state),
    )
    return new_state, msg, welcome


def _rolled_history(state: GroupState) -> tuple[tuple[int, bytes], ...]:
    if state.retention_window <= 0:
        return ()
    kept = ((state.secrets.epoch, state.secrets.exporter_secret),) + state.exporter_history
    return kept[: state.retention_window]


# -- Process ------------------------------------------------------------------

def process_commit(state: GroupState, msg: CommitMessage) -> GroupState:
    """Advance to the committed epoch; raises RemovedFromGroup for the evicted."""
    if msg.epoch != state.epoch:
        raise EpochMismatch(f"commit is for epoch {msg.epoch}, we are at {state.epoch}")
    if msg.committer == state.own_leaf_index:
        raise OwnCommit("cannot process a commit this member produced")
    committer_node = (
        state.tree.leaf(msg.committer) if msg.committer < state.tree.n_leaves else None
    )
    if committer_node is None or committer_node.identity is None:
        raise InvalidProposal(f"committer leaf {msg.committer} is not a member")

    content = msg.content_bytes(state.group_id)
    suites.verify(committer_node.identity.signature_public_key, content, msg.signature)

    for p in msg.proposals:
        validate_proposal(state, p)

    new_tree = state.tree.clone()
    removed, _added, updated = _apply_proposals(state, new_tree, list(msg.proposals))
    if state.own_leaf_index in removed:
        raise RemovedFromGroup("this member was removed by the commit")

    # Our own update proposal, committed by someone else: install the pending key.
    pending_cleared = state.pending_update_private
    if state.own_leaf_index in updated:
        own = new_tree.leaf(state.own_leaf_index)
        assert own is not None
        if (
            state.pending_update_private is None
            or suites.kem_public_from_private(state.pending_update_private)
            != own.public_key
        ):
            raise PathInconsistent("committed update does not match our pending key")
        new_tree.set_leaf(
            state.own_leaf_index,
            TreeNode(own.public_key, state.pending_update_private, own.identity),
        )
        pending_cleared = None

    if msg.new_leaf_public_key is None:
        if msg.committer not in removed:
            raise PathInconsistent("commit without a path must remove its committer")
        commit_secret = _open_removal_secret(state, new_tree, msg)
    else:
        if msg.committer in removed:
            raise PathInconsistent("removed committer cannot re-key a path")
        commit_secret = _apply_path_update(state, new_tree, msg)

    new_epoch = state.epoch + 1
    new_transcript = suites.sha256(state.transcript_hash + suites.sha256(content))
    ctx = group_context_hash(
        state.group_id, state.suite, new_epoch, new_tree.tree_hash(), new_transcript
    )
    joiner_secret = derive_joiner_secret(state.secrets.init_secret, commit_secret)
    new_secrets = derive_epoch_from_joiner(joiner_secret, ctx, new_epoch)
    expected_tag = _hmac.new(
        new_secrets.confirmation_key, new_transcript, "sha256"
    ).digest()
    if not _hmac.compare_digest(expected_tag, msg.confirmation_tag):
        raise BadConfirmation("confirmation tag mismatch")

    return replace(
        state,
        tree=new_tree,
        secrets=new_secrets,
        transcript_hash=new_transcript,
        pending_update_private=pending_cleared,
        exporter_history=_rolled_history(state),
    )


def _held_private(tree: RatchetTree, index: int) -> Optional[bytes]:
    node = tree.node(index)
    return node.private_key if node else None


def _open_removal_secret(
    state: GroupState, tree: RatchetTree, msg: CommitMessage
) -> bytes:
    """Self-removal commit: the fresh commit secret is sealed to the root resolution."""
    if len(msg.path_entries) != 1:
        raise PathInconsistent("removal commit must carry exactly one entry")
    for sealed in msg.path_entries[0].ciphertexts:
        private = _held_private(tree, sealed.recipient_node)
        if private is None:
            continue
        try:
            secret = suites.open_sealed(
                state.suite, sealed.kem_enc, sealed.ciphertext, private
            )
        except suites.OpenFailed:
            raise PathInconsistent("sealed commit secret failed to open") from None
        if len(secret) != SECRET_LEN:
            raise PathInconsistent("commit secret has wrong length")
        return secret
    raise NotAddressedToMe("no sealed commit secret addressed to a held key")


def _apply_path_update(
    state: GroupState, tree: RatchetTree, msg: CommitMessage
) -> bytes:
    """Install the committer's re-keyed path; decrypt our level; chain to root."""
    n = tree.n_leaves
    committer_leaf_node = tm.leaf_node(msg.committer)
    own_leaf = state.own_leaf_index

    old = tree.leaf(msg.committer)
    assert old is not None
    tree.set_leaf(msg.committer, TreeNode(msg.new_leaf_public_key, None, old.identity))

    direct = tm.direct_path(committer_leaf_node, n)
    published = dict(msg.path_public_keys)
    if list(published) != direct:
        raise PathInconsistent("path update does not cover the committer's direct path")

    # Which copath subtree holds us, and which sealed secret can we open?
    copath = tm.copath(committer_leaf_node, n)
    our_level = None
    for i, cp in enumerate(copath):
        if own_leaf in tm.subtree_leaves(cp, n):
            our_level = i
            break
    if our_level is None:
        raise NotAddressedToMe("local leaf is not under the committer's copath")

    entry = next(
        (e for e in msg.path_entries if e.node_index == direct[our_level]), None
    )
    if entry is None:
        raise NotAddressedToMe("no sealed path secret for our subtree")

    path_secret = None
    for sealed in entry.ciphertexts:
        private = _held_private(tree, sealed.recipient_node)
        if private is None:
            continue
        try:
            path_secret = suites.open_sealed(
                state.suite, sealed.kem_enc, sealed.ciphertext, private
            )
        except suites.OpenFailed:
            raise PathInconsistent("sealed path secret failed to open") from None
        break
    if path_secret is None:
        raise NotAddressedToMe("no ciphertext addressed to a held key")
    if len(path_secret) != SECRET_LEN:
        raise PathInconsistent("path secret has wrong length")

    # Derive upward from our level; everything must match the published keys.
    for level, parent in enumerate(direct):
        if level < our_level:
            tree.nodes[parent] = TreeNode(published[parent], None, None)
        else:
            private, public = _node_keypair(path_secret)
            if public != published[parent]:
                raise PathInconsistent(f"derived key mismatch at node {parent}")
            tree.nodes[parent] = TreeNode(public, private, None)
            path_secret = _next_path_secret(path_secret)
    return path_secret  # one step past the root = commit secret


# -- Welcome ------------------------------------------------------------------

def join_from_welcome(
    own_prekey_private: bytes,
    welcome: WelcomeMessage,
    signing_key: Optional[bytes] = None,
) -> GroupState:
    """Bootstrap a GroupState from a welcome; exporter converges with members."""
    snapshot = welcome.snapshot
    own_public = suites.kem_public_from_private(own_prekey_private)
    tree = RatchetTree.decode(Reader(snapshot.public_tree))

    payload = None
    own_leaf = None
    for sealed in welcome.sealed_joiner_secrets:
        leaf = sealed.recipient_node
        node = tree.leaf(leaf) if leaf < tree.n_leaves else None
        if node is None or node.public_key != own_public:
            continue
        try:
            payload = suites.open_sealed(
                snapshot.suite, sealed.kem_enc, sealed.ciphertext, own_prekey_private
            )
        except suites.OpenFailed:
            continue
        own_leaf = leaf
        break
    if payload is None or own_leaf is None or len(payload) < SECRET_LEN + 1:
        raise NotAddressedToMe("welcome holds no joiner secret for this key")
    joiner_secret = payload[:SECRET_LEN]
    has_path = payload[SECRET_LEN]

    node = tree.leaf(own_leaf)
    assert node is not None
    tree.set_leaf(own_leaf, TreeNode(node.public_key, own_prekey_private, node.identity))

    if has_path:
        ancestor_secret = payload[SECRET_LEN + 1 :]
        if len(ancestor_secret) != SECRET_LEN:
            raise PathInconsistent("welcome path secret has wrong length")
        _install_ancestor_chain(tree, own_leaf, ancestor_secret)

    ctx = group_context_hash(
        snapshot.group_id,
        snapshot.suite,
        snapshot.epoch,
        tree.tree_hash(),
        snapshot.transcript_hash,
    )
    secrets = derive_epoch_from_joiner(joiner_secret, ctx, snapshot.epoch)
    return GroupState(
        group_id=snapshot.group_id,
        suite=snapshot.suite,
        tree=tree,
        secrets=secrets,
        own_leaf_index=own_leaf,
        transcript_hash=snapshot.transcript_hash,
        signing_private_key=signing_key,
    )


def _install_ancestor_chain(tree: RatchetTree, leaf: int, path_secret: bytes) -> None:
    """Derive privates from the lowest non-blank ancestor up to the root.

    Ancestors below that point were blanked by the add; everything above was
    re-keyed by the welcoming commit and must match the derived chain.
    """
    chain_started = False
    for parent in tm.direct_path(tm.leaf_node(leaf), tree.n_leaves):
        node = tree.node(parent)
        if node is None:
            if chain_started:
                raise PathInconsistent("blank ancestor above the welcome chain start")
            continue
        private, public = _node_keypair(path_secret)
        if public != node.public_key:
            raise PathInconsistent(f"welcome chain mismatch at node {parent}")
        tree.nodes[parent] = TreeNode(public, private, node.identity)
        path_secret = _next_path_secret(path_secret)
        chain_started = True


# -- Exporter -----------------------------------------------------------------

def export_secret(state: GroupState, label: str, context: bytes, length: int) -> bytes:
    return export_from(state.secrets.exporter_secret, label, context, length)


# -- Serialization ------------------------------------------------------------

def encode_group_state(state: GroupState) -> bytes:
    w = Writer()
    w.lp_bytes(state.group_id)
    w.raw(state.suite.encode())
    w.u64(state.secrets.epoch)
    w.lp_bytes(state.secrets.init_secret)
    w.lp_bytes(state.secrets.epoch_secret)
    w.lp_bytes(state.secrets.exporter_secret)
    w.lp_bytes(state.secrets.confirmation_key)
    w.u32(state.own_leaf_index)
    w.lp_bytes(state.transcript_hash)
    w.lp_bytes(state.tree.encode(include_private=True))
    if state.signing_private_key is not None:
        w.u8(1).lp_bytes(state.signing_private_key)
    else:
        w.u8(0)
    if state.pending_update_private is not None:
        w.u8(1).lp_bytes(state.pending_update_private)
    else:
        w.u8(0)
    w.u32(state.retention_window)
    w.u32(len(state.exporter_history))
    for epoch, secret in state.exporter_history:
        w.u64(epoch).lp_bytes(secret)
    return Writer().tagged(TAG_GROUP_STATE, w.getvalue()).getvalue()


def decode_group_state(raw: bytes) -> GroupState:
    outer = Reader(raw)
    r = outer.tagged(TAG_GROUP_STATE)
    group_id = r.lp_bytes()
    suite = CipherSuiteProfile.decode(r.raw(4))
    epoch = r.u64()
    secrets = EpochSecrets(
        epoch=epoch,
        init_secret=r.lp_bytes(),
        epoch_secret=r.lp_bytes(),
        exporter_secret=r.lp_bytes(),
        confirmation_key=r.lp_bytes(),
    )
    own_leaf_index = r.u32()
    transcript_hash = r.lp_bytes()
    tree = RatchetTree.decode(Reader(r.lp_bytes()))
    signing_private_key = r.lp_bytes() if r.u8() else None
    pending_update_private = r.lp_bytes() if r.u8() else None
    retention_window = r.u32()
    exporter_history = tuple((r.u64(), r.lp_bytes()) for _ in range(r.u32()))
    r.expect_end()
    outer.expect_end()
    if not group_id:
        raise DecodeError("empty group id", 0)
    return GroupState(
        group_id=group_id,
        suite=suite,
        tree=tree,
        secrets=secrets,
        own_leaf_index=own_leaf_index,
        transcript_hash=transcript_hash,
        signing_private_key=signing_private_key,
        pending_update_private=pending_update_private,
        retention_window=retention_window,
        exporter_history=exporter_history,
    )
