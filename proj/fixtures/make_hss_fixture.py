#!/usr/bin/env python3
"""Writes hss_subscribers.json: one teacher and ten students for the exam scenarios.

Passkeys follow the pattern pass-<user>; salts are derived from the impi so the
file is reproducible.
"""
import hashlib
import json
import pathlib

DOMAIN = "ims.kau.test"
AS_ADDR = "127.0.0.7:5060"


def exam_rule():
    return {"priority": 1, "method": "MESSAGE", "ruri_user": "exam",
            "ruri_domain": DOMAIN, "target": AS_ADDR}


def profile(user, roles, rules):
    impi = f"{user}@{DOMAIN}"
    salt = hashlib.sha256(("salt:" + impi).encode()).hexdigest()[:32]
    digest = hashlib.sha256(bytes.fromhex(salt) + f"pass-{user}".encode()).hexdigest()
    return {"impi": impi, "impus": [f"sip:{user}@{DOMAIN}"], "salt": salt,
            "passkey_hash": digest, "registration_state": "Unregistered",
            "assigned_scscf": None, "trigger_rules": rules, "roles": roles}


subs = [profile("teacher", ["teacher"], [])]
subs += [profile(f"s{i}", ["student"], [exam_rule()]) for i in range(1, 11)]
out = pathlib.Path(__file__).with_name("hss_subscribers.json")
out.write_text(json.dumps({"default_scscf": "scscf-1", "subscribers": subs}, indent=2) + "\n")
