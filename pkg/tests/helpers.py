"""Shared fixtures for group tests: a tiny multi-member harness."""

from __future__ import annotations

from dataclasses import dataclass, field

from dtncka.cka import (
    DEFAULT_SUITE,
    GroupState,
    commit,
    create_group,
    join_from_welcome,
    make_add_proposal,
    new_identity,
    new_prekey_bundle,
    process_commit,
)
from dtncka.rng import DeterministicRng


@dataclass
class Member:
    name: str
    state: GroupState
    signing_key: bytes
    rng: DeterministicRng


@dataclass
class Party:
    """Prospective member: identity + published pre-key, not yet joined."""

    name: str
    identity: object
    signing_key: bytes
    prekey_bundle: object
    prekey_private: bytes
    rng: DeterministicRng


def new_party(name: str, seed: bytes = b"party") -> Party:
    rng = DeterministicRng(seed + b"/" + name.encode())
    identity, signing_key = new_identity(name, rng)
    bundle, private = new_prekey_bundle(identity, signing_key, rng)
    return Party(name, identity, signing_key, bundle, private, rng)


def build_group(names: list[str], seed: bytes = b"grp") -> dict[str, Member]:
    """Creator adds each subsequent name with a single-Add commit."""
    parties = {n: new_party(n, seed) for n in names}
    creator = parties[names[0]]
    state = create_group(
        creator.identity,
        DEFAULT_SUITE,
        b"group-" + seed,
        creator.rng,
        signing_key=creator.signing_key,
    )
    members = {names[0]: Member(names[0], state, creator.signing_key, creator.rng)}
    for name in names[1:]:
        joiner = parties[name]
        adder = members[names[0]]
        proposal = make_add_proposal(adder.state, joiner.prekey_bundle)
        new_state, msg, welcome = commit(adder.state, [proposal], adder.rng)
        adder.state = new_state
        for other in members.values():
            if other is not adder:
                other.state = process_commit(other.state, msg)
        assert welcome is not None
        joined = join_from_welcome(
            joiner.prekey_private, welcome, signing_key=joiner.signing_key
        )
        members[name] = Member(name, joined, joiner.signing_key, joiner.rng)
    return members


def broadcast_commit(members: dict[str, Member], committer: str, proposals, removed=()):
    """Committer commits; everyone else processes; returns (msg, welcome)."""
    c = members[committer]
    new_state, msg, welcome = commit(c.state, proposals, c.rng)
    c.state = new_state
    for name, m in list(members.items()):
        if name == committer or name in removed:
            continue
        m.state = process_commit(m.state, msg)
    return msg, welcome


def run_random_script(seed: int, max_members: int = 8, max_ops: int = 20) -> int:
    """Random add/remove/update/commit interleaving; asserts convergence.

    Returns the number of epochs checked. Raises AssertionError if any two
    live members ever disagree on an exporter secret for the same epoch.
    """
    import random

    from dtncka.cka import (
        export_secret,
        make_remove_proposal,
        make_update_proposal,
    )

    rnd = random.Random(seed)
    tag = f"script-{seed}".encode()
    pool = [new_party(f"p{i}", tag) for i in range(max_members)]
    creator = pool.pop(0)
    state = create_group(
        creator.identity,
        DEFAULT_SUITE,
        b"gid-" + tag,
        creator.rng,
        signing_key=creator.signing_key,
    )
    members = {creator.name: Member(creator.name, state, creator.signing_key, creator.rng)}
    epochs_checked = 0

    def check():
        nonlocal epochs_checked
        live = list(members.values())
        epochs = {m.state.epoch for m in live}
        assert len(epochs) == 1, f"epoch divergence: {epochs}"
        exports = {export_secret(m.state, "conv", b"", 32) for m in live}
        assert len(exports) == 1, f"exporter divergence at epoch {epochs.pop()}"
        epochs_checked += 1

    for _ in range(rnd.randrange(1, max_ops + 1)):
        committer = rnd.choice(list(members))
        c = members[committer]
        proposals = []
        removed_names: list[str] = []

        kind = rnd.random()
        if kind < 0.35 and pool and len(members) < max_members:
            joiner = pool.pop(rnd.randrange(len(pool)))
            proposals.append(make_add_proposal(c.state, joiner.prekey_bundle))
            pending_join = joiner
        else:
            pending_join = None
            if kind < 0.55 and len(members) > 1:
                victim = rnd.choice([n for n in members if n != committer])
                leaf = members[victim].state.own_leaf_index
                proposals.append(make_remove_proposal(c.state, leaf))
                removed_names.append(victim)
            elif kind < 0.75 and len(members) > 1:
                updater = rnd.choice([n for n in members if n != committer])
                proposal, pending_state = make_update_proposal(
                    members[updater].state, members[updater].rng
                )
                members[updater].state = pending_state
                proposals.append(proposal)

        msg, welcome = broadcast_commit(
            members, committer, proposals, removed=tuple(removed_names)
        )
        for name in removed_names:
            del members[name]
        if pending_join is not None:
            assert welcome is not None
            joined = join_from_welcome(
                pending_join.prekey_private, welcome, signing_key=pending_join.signing_key
            )
            members[pending_join.name] = Member(
                pending_join.name, joined, pending_join.signing_key, pending_join.rng
            )
        check()
    return epochs_checked
