"""Regenerate the scenario fixtures (topology, catalog, sigmap, alerts) and
rebuild every ``ern.json`` under the fixture directory.

    python3 scripts/make_fixtures.py [fixtures-dir]

The fig5 topology and catalog are hand-written; only its ern.json is rebuilt.
"""
import json
import os
import sys
from pathlib import Path

from ernchain.builder import build_from_files

ROOT = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "fixtures")
for sub in ("lldos1", "lldos2", "treasure/alpha", "treasure/omega"):
    (ROOT / sub).mkdir(parents=True, exist_ok=True)
os.chdir(ROOT)


def dump(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")

def entry(node, vid, desc, cat, p, priv=None):
    v = {"id": vid, "description": desc, "impact_category": cat, "p": p}
    if priv:
        v["privilege"] = priv
    return {"node_id": node, "vulnerability": v}

def rule(premise, consequence, comb=None):
    r = {"premise": premise, "consequence": consequence}
    if comb:
        r["combinator"] = comb
    return r

def alerts(path, rows):
    with open(path, "w") as fh:
        for r in rows:
            fh.write(json.dumps(r) + "\n")

def a(sensor, ts, sig, src, dst, **kw):
    d = {"sensor_id": sensor, "ts": ts, "signature": sig, "src_addr": src, "dst_addr": dst}
    d.update(kw)
    return d

# ---------------- LLDOS1-style
H = "172.16.115.20"
ATK = "202.77.162.213"
dump("lldos1/topology.json", {
    "nodes": [{"node_id": H, "role": "server", "function_value": 0.55}],
    "reachability": [],
    "trust_relations": []})
dump("lldos1/catalog.json", {
    "entries": [
        entry(H, "icmp-sweep", "host answers ICMP echo from outside", 8, 0.55),
        entry(H, "sadmind-ping", "sadmind reachable via RPC", 7, 0.55),
        entry(H, "sadmind-bof", "Solaris sadmind buffer overflow", 1, 0.55, "root"),
        entry(H, "telnet-root", "telnet login with root shell", 1, 0.55, "root"),
        entry(H, "rsh-root", "rsh as root", 1, 0.55, "root"),
        entry(H, "ftp-upload", "ftp upload of mstream binaries", 2, 0.55),
        entry(H, "mstream", "mstream DDoS agent installed", 1, 0.55, "root"),
        entry(H, "ddos", "mstream agent floods victims", 4, 0.55),
    ],
    "rules": [
        rule([[H, "icmp-sweep"]], [H, "sadmind-ping"]),
        rule([[H, "sadmind-ping"]], [H, "sadmind-bof"]),
        rule([[H, "sadmind-bof"]], [H, "telnet-root"]),
        rule([[H, "sadmind-bof"]], [H, "rsh-root"]),
        rule([[H, "telnet-root"]], [H, "ftp-upload"]),
        rule([[H, "ftp-upload"], [H, "rsh-root"]], [H, "mstream"], "and"),
        rule([[H, "mstream"]], [H, "ddos"]),
    ]})
dump("lldos1/sigmap.json", {"rules": [
    {"signature": "ICMP Echo Reply", "dst": H, "vertex": f"{H}:icmp-sweep"},
    {"signature": "RPC portmap sadmind request*", "dst": H, "vertex": f"{H}:sadmind-ping"},
    {"signature": "RPC sadmind UDP overflow", "dst": H, "vertex": f"{H}:sadmind-bof"},
    {"signature": "INFO TELNET access", "dst": H, "vertex": f"{H}:telnet-root"},
    {"signature": "RSERVICES rsh root", "dst": H, "vertex": f"{H}:rsh-root"},
    {"signature": "FTP STOR*", "dst": H, "vertex": f"{H}:ftp-upload"},
    {"signature": "DDOS mstream agent to handler", "vertex": f"{H}:mstream"},
    {"signature": "DDOS mstream handler to client", "vertex": f"{H}:ddos"},
]})
l1 = [
    a("snort-dmz", "2000-03-07T16:51:02Z", "ICMP Echo Reply", "172.16.112.10", ATK),
    a("snort-dmz", "2000-03-07T16:51:03Z", "ICMP Echo Reply", "172.16.115.1", ATK),
    a("snort-in", "2000-03-07T16:51:05Z", "ICMP Echo Reply", ATK, H),
    a("snort-dmz", "2000-03-07T16:51:06Z", "ICMP Echo Reply", ATK, H),
    a("snort-in", "2000-03-07T17:50:14-05:00", "RPC portmap sadmind request UDP", ATK, H),
    a("snort-in", "", "RPC sadmind UDP overflow", ATK, H),
    a("snort-in", "2000-03-07T23:08:22Z", "RPC sadmind UDP overflow", ATK, H),
    a("snort-dmz", "2000-03-07T23:08:23Z", "RPC sadmind UDP overflow", ATK, H),
    a("snort-in", "2000-03-07T23:10:05Z", "SCAN nmap XMAS", ATK, "172.16.112.100"),
    a("snort-in", "2000-03-07T23:18:21Z", "INFO TELNET access", ATK, H),
    a("snort-in", "2000-03-07T23:20:40Z", "RSERVICES rsh root", ATK, H),
    a("snort-in", "2000-03-07T23:22:51Z", "FTP STOR mstream", ATK, H),
    a("snort-in", "2000-03-07T23:24:10Z", "DDOS mstream agent to handler", H, ATK),
    a("snort-in", "2000-03-08T00:27:51Z", "DDOS mstream handler to client", ATK, H),
    a("snort-in", "2000-03-08T00:27:51Z", "", ATK, H),
]
alerts("lldos1/alerts.jsonl", l1)
alerts("lldos1/alerts-missing-ftp.jsonl", [r for r in l1 if not r["signature"].startswith("FTP")])

# ---------------- LLDOS2.0.2-style, FTP upload not observed
H2 = "172.16.112.50"
dump("lldos2/topology.json", {
    "nodes": [{"node_id": H, "role": "server", "function_value": 0.55},
              {"node_id": H2, "role": "server", "function_value": 0.55}],
    "reachability": [[H, H2]],
    "trust_relations": []})
dump("lldos2/catalog.json", {
    "entries": [
        entry(H, "dns-hinfo", "DNS HINFO disclosure", 7, 0.55),
        entry(H, "sadmind-ping", "sadmind answers root-credential query", 3, 0.55),
        entry(H, "sadmind-bof", "Solaris sadmind buffer overflow", 1, 0.55, "root"),
        entry(H, "telnet-root", "telnet login with root shell", 1, 0.55, "root"),
        entry(H, "ftp-upload", "ftp upload of mstream binaries and script", 1, 0.55),
        entry(H, "mstream", "mstream DDoS agent installed", 1, 0.55, "root"),
        entry(H, "ddos", "mstream agent floods victims", 4, 0.55),
        entry(H2, "sadmind-bof", "Solaris sadmind buffer overflow", 1, 0.55, "root"),
    ],
    "rules": [
        rule([[H, "dns-hinfo"]], [H, "sadmind-ping"]),
        rule([[H, "sadmind-ping"]], [H, "sadmind-bof"]),
        rule([[H, "sadmind-bof"]], [H, "telnet-root"]),
        rule([[H, "telnet-root"]], [H, "ftp-upload"]),
        rule([[H, "ftp-upload"]], [H, "mstream"]),
        rule([[H, "mstream"]], [H, "ddos"]),
        rule([[H, "telnet-root"]], [H2, "sadmind-bof"]),
    ]})
dump("lldos2/sigmap.json", {"rules": [
    {"signature": "DNS HINFO query", "dst": H, "vertex": f"{H}:dns-hinfo"},
    {"signature": "RPC sadmind query with root credentials attempt*", "dst": H, "vertex": f"{H}:sadmind-ping"},
    {"signature": "RPC sadmind UDP overflow", "dst": H, "vertex": f"{H}:sadmind-bof"},
    {"signature": "RPC sadmind UDP overflow", "dst": "172.16.112.0/24", "vertex": f"{H2}:sadmind-bof"},
    {"signature": "INFO TELNET access", "dst": H, "vertex": f"{H}:telnet-root"},
    {"signature": "FTP STOR*", "dst": H, "vertex": f"{H}:ftp-upload"},
    {"signature": "DDOS mstream agent to handler", "vertex": f"{H}:mstream"},
    {"signature": "DDOS mstream handler to client", "vertex": f"{H}:ddos"},
]})
l2 = [
    a("snort-dmz", "2000-04-16T16:25:11Z", "DNS HINFO query", ATK, H),
    a("snort-in", "2000-04-16T16:25:12Z", "DNS HINFO query", ATK, H),
    a("snort-in", "2000-04-16T16:45:36Z", "RPC sadmind query with root credentials attempt UDP", ATK, H),
    a("snort-in", "2000-04-16T16:45:41Z", "RPC sadmind UDP overflow", ATK, H),
    a("snort-in", "2000-04-16T16:50:02Z", "INFO TELNET access", ATK, H),
    a("snort-in", "2000-04-16T16:52:20Z", "RPC sadmind UDP overflow", H, H2),
    a("snort-in", "2000-04-16T16:55:14Z", "WEB-MISC robots.txt access", "172.16.113.84", "172.16.114.50"),
    a("snort-in", "2000-04-16T17:01:30Z", "DDOS mstream agent to handler", H, ATK),
    a("snort-in", "2000-04-16T17:06:48Z", "DDOS mstream handler to client", ATK, H),
]
alerts("lldos2/alerts.jsonl", l2)

# ---------------- Treasure Hunt style, alpha subnet (one missed step)
web, fs, db, evt = "alpha-web", "alpha-fs", "alpha-db", "alpha-evt"
dump("treasure/alpha/topology.json", {
    "nodes": [{"node_id": n, "role": "server", "function_value": 0.5} for n in (web, fs, db, evt)],
    "reachability": [[web, fs], [fs, db], [db, evt]],
    "trust_relations": []})
dump("treasure/alpha/catalog.json", {
    "entries": [
        entry(web, "http-scan", "web server reachable from outside", 7, 0.5),
        entry(web, "php-inject", "PHP include injection", 3, 0.5, "user"),
        entry(web, "local-root", "local kernel privilege escalation", 1, 0.5, "root"),
        entry(web, "ssh-key-theft", "stored ssh keys readable", 2, 0.5, "root"),
        entry(fs, "ssh-login", "key-based ssh login", 1, 0.5, "root"),
        entry(fs, "nfs-export", "world-writable nfs export", 4, 0.5),
        entry(db, "mysql-cred", "mysql credentials in shared config", 1, 0.5),
        entry(db, "mysql-root", "mysql root account takeover", 1, 0.5, "root"),
        entry(evt, "event-forge", "event processing accepts forged events", 1, 0.5),
        entry(evt, "log-wipe", "audit logs erased", 1, 0.5),
    ],
    "rules": [
        rule([[web, "http-scan"]], [web, "php-inject"]),
        rule([[web, "php-inject"]], [web, "local-root"]),
        rule([[web, "local-root"]], [web, "ssh-key-theft"]),
        rule([[web, "ssh-key-theft"]], [fs, "ssh-login"]),
        rule([[fs, "ssh-login"]], [fs, "nfs-export"]),
        rule([[fs, "nfs-export"]], [db, "mysql-cred"]),
        rule([[db, "mysql-cred"]], [db, "mysql-root"]),
        rule([[db, "mysql-root"]], [evt, "event-forge"]),
        rule([[evt, "event-forge"]], [evt, "log-wipe"]),
    ]})
sig_alpha = [
    ("WEB-MISC scan", "10.0.1.10", "http-scan", web),
    ("WEB-PHP remote include", "10.0.1.10", "php-inject", web),
    ("SHELLCODE x86 setuid 0", "10.0.1.10", "local-root", web),
    ("POLICY ssh key read", "10.0.1.10", "ssh-key-theft", web),
    ("INFO SSH login", "10.0.1.20", "ssh-login", fs),
    ("NFS mount request", "10.0.1.20", "nfs-export", fs),
    ("MYSQL login with shared credentials", "10.0.1.30", "mysql-cred", db),
    ("MYSQL root login attempt", "10.0.1.30", "mysql-root", db),
    ("EVENT forged event injected", "10.0.1.40", "event-forge", evt),
    ("HOST audit log cleared", "10.0.1.40", "log-wipe", evt),
]
dump("treasure/alpha/sigmap.json", {"rules": [
    {"signature": s, "dst": ip, "vertex": f"{node}:{v}"} for s, ip, v, node in sig_alpha]})
rows, t = [], 0
for s, ip, v, node in sig_alpha:
    t += 47
    if v == "nfs-export":
        continue
    rows.append(a("sensor-alpha", 1_102_010_000_000 + t * 1000, s, "10.0.9.66", ip))
alerts("treasure/alpha/alerts.jsonl", rows)

# ---------------- Treasure Hunt style, omega subnet (entry exploit missed)
ow, of = "omega-web", "omega-file"
dump("treasure/omega/topology.json", {
    "nodes": [{"node_id": ow, "role": "server", "function_value": 0.7},
              {"node_id": of, "role": "server", "function_value": 0.3}],
    "reachability": [[ow, of]],
    "trust_relations": []})
dump("treasure/omega/catalog.json", {
    "entries": [
        entry(ow, "cgi-overflow", "CGI buffer overflow, root shell", 1, 0.7, "root"),
        entry(of, "smb-anon", "anonymous SMB share listing", 8, 0.3),
        entry(of, "share-read", "readable treasure share", 8, 0.3),
    ],
    "rules": [
        rule([[ow, "cgi-overflow"]], [of, "smb-anon"]),
        rule([[of, "smb-anon"]], [of, "share-read"]),
    ]})
dump("treasure/omega/sigmap.json", {"rules": [
    {"signature": "WEB-CGI overflow attempt", "vertex": f"{ow}:cgi-overflow"},
    {"signature": "NETBIOS SMB anonymous session", "dst": "10.0.2.20", "vertex": f"{of}:smb-anon"},
    {"signature": "NETBIOS SMB share read", "dst": "10.0.2.20", "vertex": f"{of}:share-read"},
]})
alerts("treasure/omega/alerts.jsonl", [
    a("sensor-omega", "2004-12-02T19:12:44.250Z", "NETBIOS SMB anonymous session", "10.0.2.10", "10.0.2.20"),
    a("sensor-omega", "2004-12-02T19:13:02.500Z", "NETBIOS SMB share read", "10.0.2.10", "10.0.2.20"),
])

for topo in sorted(ROOT.rglob("topology.json")):
    ern = build_from_files(topo, topo.with_name("catalog.json"))
    topo.with_name("ern.json").write_text(ern.dumps())
    print(f"{topo.parent.relative_to(ROOT)}: {len(ern.vertices)} vertices, {len(ern.links)} links")
