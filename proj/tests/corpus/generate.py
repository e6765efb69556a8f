#!/usr/bin/env python3
"""Regenerates the SIP parser corpus (valid/ and malformed/).

Run from this directory. Output is committed; the script documents how each
message was produced."""
import json
import os

CRLF = "\r\n"
DOMAIN = "ims.kau.test"


def msg(start, headers, body="", length=True, eol=CRLF):
    lines = [start] + headers
    if length:
        lines.append(f"Content-Length: {len(body.encode())}")
    return eol.join(lines) + eol + eol + body


def via(host="10.0.0.9", port=5060, branch="z9hG4bKa1", extra=""):
    return f"Via: SIP/2.0/UDP {host}:{port};branch={branch}{extra}"


def base(method, user, cseq=1, call="c1", tag="t1", to_tag=None):
    to = f"To: <sip:{user}@{DOMAIN}>" + (f";tag={to_tag}" if to_tag else "")
    return [
        f"From: <sip:{user}@{DOMAIN}>;tag={tag}",
        to,
        f"Call-ID: {call}",
        f"CSeq: {cseq} {method}",
    ]


valid = []

# Requests for every method, a few variants each.
valid.append(("register_basic", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(), "Max-Forwards: 70"] + base("REGISTER", "s1") +
    ["Contact: <sip:s1@10.0.0.9:5060>", "Expires: 3600"])))
valid.append(("register_passkey", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKp2"), "Max-Forwards: 70"] + base("REGISTER", "s2", call="c2") +
    ["Contact: <sip:s2@10.0.0.12:5060>", "Expires: 600", "X-Passkey: pk-s2"])))
valid.append(("register_dereg", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKd3"), "Max-Forwards: 69"] + base("REGISTER", "s3", cseq=2, call="c3") +
    ["Contact: <sip:s3@10.0.0.13:5060>", "Expires: 0"])))
valid.append(("register_lowercase_names", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    ["via: SIP/2.0/UDP 10.0.0.9:5060;branch=z9hG4bKlc", "max-forwards: 70",
     f"from: <sip:s4@{DOMAIN}>;tag=a", f"to: <sip:s4@{DOMAIN}>", "call-id: lc4",
     "cseq: 7 REGISTER", "contact: <sip:s4@10.0.0.14>", "expires: 120"])))
valid.append(("register_mixed_case", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    ["VIA: SIP/2.0/udp 10.0.0.9:5060;branch=z9hG4bKmc", "MAX-FORWARDS: 70",
     f"FROM: <sip:s5@{DOMAIN}>;tag=b", f"TO: <sip:s5@{DOMAIN}>", "CALL-ID: mc5",
     "CSEQ: 8 REGISTER", "CONTACT: <sip:s5@10.0.0.15:5062>", "EXPIRES: 3600"])))
valid.append(("register_folded_via", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    ["Via: SIP/2.0/UDP 10.0.0.9:5060", "  ;branch=z9hG4bKfold", "Max-Forwards: 70"] +
    base("REGISTER", "s6", call="f6") + ["Contact: <sip:s6@10.0.0.16>"])))
valid.append(("register_folded_subject", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKfs"), "Max-Forwards: 70"] + base("REGISTER", "s7", call="f7") +
    ["Subject: first line", "\tcontinued here", "Contact: <sip:s7@10.0.0.17>"])))
valid.append(("register_lf_only", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKlf"), "Max-Forwards: 70"] + base("REGISTER", "s8", call="lf8") +
    ["Contact: <sip:s8@10.0.0.18>", "Expires: 3600"], eol="\n")))
valid.append(("register_no_content_length", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKncl"), "Max-Forwards: 70"] + base("REGISTER", "s9", call="n9") +
    ["Contact: <sip:s9@10.0.0.19>"], length=False)))
valid.append(("register_display_names", msg(f"REGISTER sip:{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKdn"), "Max-Forwards: 70",
     f"From: \"Student One\" <sip:s1@{DOMAIN}>;tag=dn1", f"To: Student <sip:s1@{DOMAIN}>",
     "Call-ID: dn1", "CSeq: 1 REGISTER", "Contact: \"s1 \\\"laptop\\\"\" <sip:s1@10.0.0.9:5060;transport=udp>"])))

for i, (user, body) in enumerate([("s1", "hello"), ("s2", "exam ready"), ("teacher", "")]):
    valid.append((f"message_plain_{i}", msg(f"MESSAGE sip:{user}@{DOMAIN} SIP/2.0",
        [via(branch=f"z9hG4bKm{i}"), "Max-Forwards: 70"] + base("MESSAGE", user, call=f"m{i}") +
        (["Content-Type: text/plain"] if body else []), body)))
valid.append(("message_exam_json", msg(f"MESSAGE sip:s1@{DOMAIN} SIP/2.0",
    [via("10.0.0.40", 5070, "z9hG4bKex"), "Max-Forwards: 70"] + base("MESSAGE", "s1", call="ex1") +
    ["Content-Type: application/exam+json"],
    json.dumps({"exam_id": "e1", "title": "Quiz", "questions": [{"qid": "q1", "prompt": "2+2?", "choices": ["3", "4"]}], "close_at": 660000}))))
valid.append(("message_answers_json", msg(f"MESSAGE sip:exam@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKans"), "Max-Forwards: 68"] + base("MESSAGE", "s2", call="ans2") +
    ["Content-Type: application/exam-answers+json"],
    json.dumps({"exam_id": "e1", "answers": {"q1": 1, "q2": 0}}))))
valid.append(("message_result_json", msg(f"MESSAGE sip:s3@{DOMAIN} SIP/2.0",
    [via("10.0.0.40", 5070, "z9hG4bKres"), "Max-Forwards: 70"] + base("MESSAGE", "s3", call="res3") +
    ["Content-Type: application/exam-result+json"],
    json.dumps({"exam_id": "e1", "score": 2, "max_score": 3}))))
valid.append(("message_multi_via", msg(f"MESSAGE sip:s4@{DOMAIN} SIP/2.0",
    ["Via: SIP/2.0/UDP 10.0.0.10:5060;branch=z9hG4bKp, SIP/2.0/UDP 10.0.0.30:5060;branch=z9hG4bKs",
     via("10.0.0.40", 5070, "z9hG4bKas"), "Max-Forwards: 67"] + base("MESSAGE", "s4", call="mv4") +
    ["Content-Type: text/plain"], "hi")))
valid.append(("message_utf8_body", msg(f"MESSAGE sip:s5@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKu8"), "Max-Forwards: 70"] + base("MESSAGE", "s5", call="u8") +
    ["Content-Type: text/plain; charset=utf-8"], "سلام exam")))
valid.append(("message_body_with_crlf", msg(f"MESSAGE sip:s6@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKcr"), "Max-Forwards: 70"] + base("MESSAGE", "s6", call="cr6") +
    ["Content-Type: text/plain"], "line1\r\n\r\nline3")))
valid.append(("message_escaped_user", msg(f"MESSAGE sip:s%41b@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKesc"), "Max-Forwards: 70"] + base("MESSAGE", "s%41b", call="esc") +
    ["Content-Type: text/plain"], "x")))
valid.append(("message_routes", msg(f"MESSAGE sip:s7@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKrt"), "Max-Forwards: 70",
     "Route: <sip:10.0.0.30:5060;lr>, <sip:10.0.0.10:5060;lr>", "Record-Route: <sip:10.0.0.20;lr>"] +
    base("MESSAGE", "s7", call="rt7"))))
valid.append(("message_unknown_headers", msg(f"MESSAGE sip:s8@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKuh"), "Max-Forwards: 70", "P-Asserted-Identity: <sip:s8@ims.kau.test>",
     "User-Agent: imstb-ua/1.0"] + base("MESSAGE", "s8", call="uh8") +
    ["X-Zeta: 1", "X-Alpha: 2", "Content-Type: text/plain"], "ok")))
valid.append(("message_addr_spec", msg(f"MESSAGE sip:s9@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKas"), "Max-Forwards: 70", f"From: sip:s9@{DOMAIN};tag=as9",
     f"To: sip:teacher@{DOMAIN}", "Call-ID: as9", "CSeq: 3 MESSAGE"])))
valid.append(("message_port_uri", msg(f"MESSAGE sip:s10@10.0.0.20:5080;transport=udp SIP/2.0",
    [via(branch="z9hG4bKpu"), "Max-Forwards: 1"] + base("MESSAGE", "s10", call="pu10"))))

for i, event in enumerate(["exam-service", "exam-service;id=7", "presence"]):
    valid.append((f"subscribe_{i}", msg(f"SUBSCRIBE sip:exam@{DOMAIN} SIP/2.0",
        [via(branch=f"z9hG4bKsub{i}"), "Max-Forwards: 70"] + base("SUBSCRIBE", f"s{i+1}", call=f"sub{i}") +
        [f"Contact: <sip:s{i+1}@10.0.0.9>", f"Event: {event}", "Expires: 3600"])))
valid.append(("subscribe_unsubscribe", msg(f"SUBSCRIBE sip:exam@{DOMAIN} SIP/2.0",
    [via(branch="z9hG4bKuns"), "Max-Forwards: 70"] + base("SUBSCRIBE", "s1", cseq=2, call="sub0", to_tag="x1") +
    ["Event: exam-service", "Expires: 0"])))

for i, state in enumerate(["active", "terminated", "active;changed=exam-docs/e1"]):
    valid.append((f"notify_{i}", msg(f"NOTIFY sip:s{i+1}@{DOMAIN} SIP/2.0",
        [via("10.0.0.50", 5060, f"z9hG4bKn{i}"), "Max-Forwards: 70",
         f"From: <sip:exam@{DOMAIN}>;tag=x{i}", f"To: <sip:s{i+1}@{DOMAIN}>;tag=t{i}",
         f"Call-ID: sub{i}", f"CSeq: {i+1} NOTIFY", "Event: exam-service",
         f"Subscription-State: {state.split(';')[0]}", "Content-Type: text/plain"], state)))

for i in range(3):
    valid.append((f"invite_{i}", msg(f"INVITE sip:callee{i}@example.test SIP/2.0",
        [via("192.0.2.1", 5060, f"z9hG4bKinv{i}"), "Max-Forwards: 70",
         "From: \"Caller\" <sip:caller@example.test>;tag=c" + str(i),
         f"To: <sip:callee{i}@example.test>", f"Call-ID: inv{i}", f"CSeq: {i+1} INVITE",
         "Contact: <sip:caller@192.0.2.1:5060>"])))
valid.append(("ack", msg("ACK sip:callee0@example.test SIP/2.0",
    [via("192.0.2.1", 5060, "z9hG4bKack"), "Max-Forwards: 70",
     "From: <sip:caller@example.test>;tag=c0", "To: <sip:callee0@example.test>;tag=r0",
     "Call-ID: inv0", "CSeq: 1 ACK"])))
valid.append(("bye", msg("BYE sip:callee0@192.0.2.2 SIP/2.0",
    [via("192.0.2.1", 5060, "z9hG4bKbye"), "Max-Forwards: 70",
     "From: <sip:caller@example.test>;tag=c0", "To: <sip:callee0@example.test>;tag=r0",
     "Call-ID: inv0", "CSeq: 2 BYE"])))

responses = [
    (100, "Trying", "INVITE"), (180, "Ringing", "INVITE"), (200, "OK", "REGISTER"),
    (200, "OK", "INVITE"), (202, "Accepted", "SUBSCRIBE"), (302, "Moved Temporarily", "INVITE"),
    (401, "Unauthorized", "REGISTER"), (403, "Forbidden", "REGISTER"), (404, "Not Found", "MESSAGE"),
    (408, "Request Timeout", "MESSAGE"), (480, "Temporarily Unavailable", "MESSAGE"),
    (500, "Server Internal Error", "REGISTER"), (200, "Everything Is Fine", "MESSAGE"),
]
for code, reason, method in responses:
    extra = []
    if code == 302:
        extra.append("Contact: <sip:callee@192.0.2.2:5060>")
    if method == "REGISTER" and code == 200:
        extra += ["Contact: <sip:s1@10.0.0.9:5060>", "Expires: 3600", "Service-Route: <sip:10.0.0.30:5060;lr>"]
    valid.append((f"response_{code}_{method.lower()}_{len(valid)}", msg(f"SIP/2.0 {code} {reason}",
        [via(), via("10.0.0.10", 5060, "z9hG4bKpc")] + base(method, "s1", to_tag=("r1" if code >= 200 else None)) + extra)))
valid.append(("response_body", msg("SIP/2.0 200 OK",
    [via()] + base("MESSAGE", "s2", to_tag="r2") + ["Content-Type: text/plain"], "ok")))

assert len(valid) == 50, len(valid)

def good_req(extra_first=(), skip=(), cseq="1 REGISTER", body="", cl=True, start=f"REGISTER sip:{DOMAIN} SIP/2.0"):
    hs = list(extra_first)
    table = [("Via", via()), ("Max-Forwards", "Max-Forwards: 70"), ("From", f"From: <sip:s1@{DOMAIN}>;tag=t1"),
             ("To", f"To: <sip:s1@{DOMAIN}>"), ("Call-ID", "Call-ID: c1"), ("CSeq", f"CSeq: {cseq}")]
    hs += [line for name, line in table if name not in skip]
    return msg(start, hs, body, length=cl)

malformed = [
    ("garbage_start", "MalformedStartLine", msg("HELLO", [via()] + base("REGISTER", "s1"))),
    ("bad_version", "MalformedStartLine", good_req(start=f"REGISTER sip:{DOMAIN} SIP/3.0")),
    ("bad_status_digits", "MalformedStartLine", msg("SIP/2.0 2O0 OK", [via()] + base("REGISTER", "s1"))),
    ("unsupported_status", "MalformedStartLine", msg("SIP/2.0 486 Busy Here", [via()] + base("INVITE", "s1"))),
    ("non_sip_request_uri", "MalformedStartLine", good_req(start="REGISTER http://ims.kau.test SIP/2.0")),
    ("extra_space_start", "MalformedStartLine", good_req(start=f"REGISTER  sip:{DOMAIN} SIP/2.0")),
    ("unknown_method_publish", "UnknownMethod", good_req(start=f"PUBLISH sip:{DOMAIN} SIP/2.0", cseq="1 PUBLISH")),
    ("unknown_method_foo", "UnknownMethod", good_req(start=f"FOO sip:{DOMAIN} SIP/2.0", cseq="1 FOO")),
    ("unknown_cseq_method", "UnknownMethod", msg("SIP/2.0 200 OK", [via()] + base("OPTIONS", "s1"))),
    ("missing_via", "MissingMandatoryHeader", good_req(skip=("Via",))),
    ("missing_from", "MissingMandatoryHeader", good_req(skip=("From",))),
    ("missing_to", "MissingMandatoryHeader", good_req(skip=("To",))),
    ("missing_call_id", "MissingMandatoryHeader", good_req(skip=("Call-ID",))),
    ("missing_cseq", "MissingMandatoryHeader", good_req(skip=("CSeq",))),
    ("compact_via", "MalformedHeader", good_req(skip=("Via",), extra_first=["v: SIP/2.0/UDP 10.0.0.9;branch=z9hG4bKc"])),
    ("length_exceeds_body", "BodyLengthMismatch",
     f"REGISTER sip:{DOMAIN} SIP/2.0\r\n{via()}\r\nFrom: <sip:s1@{DOMAIN}>;tag=t1\r\nTo: <sip:s1@{DOMAIN}>\r\nCall-ID: c1\r\nCSeq: 1 REGISTER\r\nContent-Length: 5\r\n\r\n"),
    ("length_short_of_body", "BodyLengthMismatch",
     f"MESSAGE sip:s1@{DOMAIN} SIP/2.0\r\n{via()}\r\nFrom: <sip:s2@{DOMAIN}>;tag=t1\r\nTo: <sip:s1@{DOMAIN}>\r\nCall-ID: c1\r\nCSeq: 1 MESSAGE\r\nContent-Length: 2\r\n\r\nhello"),
    ("cseq_not_numeric", "MalformedHeader", good_req(cseq="abc REGISTER")),
    ("max_forwards_too_large", "MalformedHeader", good_req(skip=("Max-Forwards",), extra_first=["Max-Forwards: 71"])),
    ("header_without_colon", "MalformedHeader", good_req(extra_first=["ThisIsNotAHeader"])),
]
assert len(malformed) == 20

here = os.path.dirname(os.path.abspath(__file__))
for sub in ("valid", "malformed"):
    os.makedirs(os.path.join(here, sub), exist_ok=True)
    for f in os.listdir(os.path.join(here, sub)):
        os.remove(os.path.join(here, sub, f))
for i, (name, text) in enumerate(valid):
    with open(os.path.join(here, "valid", f"{i:02d}_{name}.sip"), "wb") as fh:
        fh.write(text.encode())
expected = {}
for i, (name, err, text) in enumerate(malformed):
    fname = f"{i:02d}_{name}.sip"
    expected[fname] = err
    with open(os.path.join(here, "malformed", fname), "wb") as fh:
        fh.write(text.encode())
with open(os.path.join(here, "malformed", "expected.json"), "w") as fh:
    json.dump(expected, fh, indent=2, sort_keys=True)
    fh.write("\n")
