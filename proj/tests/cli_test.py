"""End-to-end checks of the normsim binary: answers, exit codes, byte-stable
output for a fixed seed, and run logs against the published schema."""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, DATA, SCHEMA = sys.argv[1:4]
with open(SCHEMA) as f:
    VALIDATOR = jsonschema.Draft202012Validator(json.load(f))

failures = []


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("NORMSIM_CAP", None)
    e.update(env or {})
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=e)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name)
    if not cond:
        failures.append(name)
        if detail:
            print("     " + detail.strip().replace("\n", "\n     "))


def expect(name, args, code=0, out=None, err=None, env=None):
    p = run(*args, env=env)
    ok = p.returncode == code
    if out is not None:
        ok = ok and out(p.stdout)
    if err is not None:
        ok = ok and err in p.stderr
    check(name, ok, f"exit {p.returncode}\n{p.stdout[:400]}\n{p.stderr[:400]}")
    return p


def logged(name, args, env=None):
    """Runs with --format json twice: schema-valid and byte-identical."""
    a = run(*args, "--format", "json", env=env)
    b = run(*args, "--format", "json", env=env)
    check(name + " exit 0", a.returncode == 0, a.stderr)
    check(name + " is byte-stable", a.stdout == b.stdout)
    try:
        log = json.loads(a.stdout)
    except json.JSONDecodeError as e:
        check(name + " log parses", False, str(e))
        return {}
    errs = sorted(VALIDATOR.iter_errors(log), key=str)
    check(name + " log matches schema", not errs, "\n".join(e.message for e in errs[:3]))
    return log


data = lambda f: os.path.join(DATA, f)

# factoring
expect("factor 15", ["factor", "15", "--seed", "1"], out=lambda s: s.strip() in {"3", "5"})
expect("factor 21", ["factor", "21", "--seed", "7"], out=lambda s: s.strip() in {"3", "7"})
expect("factor 9 is a prime power", ["factor", "9"], code=3, err="prime power")
expect("factor 13 is prime", ["factor", "13"], code=3)
expect("factor with no attempts", ["factor", "15", "--attempts", "0"], code=2)
log = logged("factor log", ["factor", "91", "--seed", "3"])
check("factor log answer", log.get("result", {}).get("factor") in (7, 13))

# discrete logs and orders
expect("dlog 7 3 6", ["dlog", "7", "3", "6"], out=lambda s: s.strip() == "3")
expect("dlog 11 2 9", ["dlog", "11", "2", "9"], out=lambda s: s.strip() == "6")
expect("dlog non-generator", ["dlog", "7", "2", "1"], code=3)
logged("dlog log", ["dlog", "13", "2", "5"])
expect("ecdlog", ["ecdlog", "5,1,1", "(0,1)", "(4,2)"], out=lambda s: s.strip() == "2")
expect("ecdlog b outside <a>", ["ecdlog", "5,4,0", "(0,0)", "(1,0)"], code=3)
logged("ecdlog log", ["ecdlog", "7,3,4", "(1,1)", "O"])
expect("order", ["order", "zn_star", "15", "2"], out=lambda s: s.strip() == "4")
expect("order ec", ["order", "ec", "5,1,1", "(0,1)"], out=lambda s: s.strip() == "9")
expect("order dense", ["order", "zn_star", "21", "2", "--engine", "dense", "--bound", "8", "--comb-M", "60"],
       out=lambda s: s.strip() == "6")
expect("order grid sampler", ["order", "zn_star", "21", "5", "--resolution", "1e-5"],
       out=lambda s: s.strip() == "6")
logged("order log", ["order", "zn_star", "35", "2"])
expect("order bad group", ["order", "zn", "15", "2"], code=4)
expect("order non-element", ["order", "zn_star", "15", "5"], code=3)

# decomposition
expect("decompose Z15", ["decompose", "zn_star", "15", "--gens", "2,7"],
       out=lambda s: s.splitlines()[0] == "Z4 x Z2")
expect("decompose Z5", ["decompose", "zn_star", "5", "--gens", "2"], out=lambda s: s.splitlines()[0] == "Z4")
log = logged("decompose sampled", ["decompose", "zn_star", "21"])
check("decompose notes sampled generators", log.get("inputs", {}).get("generators") == "sampled")
log = logged("decompose ec", ["decompose", "ec", "11,1,6", "--gens", "(2,4)"])

# hidden subgroups
expect("hsp", ["hsp", "Z4 x Z2", "--hidden", "(2,1)"], out=lambda s: s.strip() == "(2, 1)")
expect("hsp trivial", ["hsp", "Z2 x Z2"], out=lambda s: s.strip() == "trivial")
log = logged("hsp log", ["hsp", "Z2^3", "--hidden", "(1,1,0),(0,1,1)"])
check("hsp certificate", log.get("certificate", {}).get("passed") is True)
expect("hsp bad group", ["hsp", "Q8"], code=4)

# circuits
p = expect("run QFT on Z2", ["run", data("qft_z2.json"), "--shots", "1000"])
rows = [r.split(",") for r in p.stdout.strip().splitlines()[1:]]
counts = [int(r[1]) for r in rows]
check("QFT on Z2 has two rows", len(rows) == 2)
check("QFT on Z2 rows sum to shots", sum(counts) == 1000)
check("QFT on Z2 is uniform within 4 sigma", all(abs(c - 500) < 4 * 500 ** 0.5 for c in counts))

p = expect("run dlog circuit", ["run", data("dlog_p7.json"), "--shots", "600"])
pairs = set()
for r in p.stdout.strip().splitlines()[1:]:
    k, l = r.split('"')[1].split("|")[0].strip(" ()").split(",")
    pairs.add((int(k), int(l)))
check("dlog circuit support is (k, 3k mod 6)", pairs and all(l == 3 * k % 6 for k, l in pairs), str(pairs))
check("CSV is byte-stable", p.stdout == run("run", data("dlog_p7.json"), "--shots", "600").stdout)
log = logged("run log", ["run", data("dlog_p7.json"), "--shots", "100"], env={"NORMSIM_CAP": "10"})
check("NORMSIM_CAP selects the structured engine", log.get("engine") == "structured")
check("--cap overrides NORMSIM_CAP",
      json.loads(run("run", data("dlog_p7.json"), "--cap", "4096", "--format", "json",
                     env={"NORMSIM_CAP": "10"}).stdout).get("engine") == "dense")

expect("malformed JSON", ["run", data("malformed.json")], code=4, err="byte")
expect("invalid gate", ["run", data("bad_gate.json")], code=4, err="gate 0")
expect("missing file", ["run", data("nope.json")], code=4)

with tempfile.TemporaryDirectory() as tmp:
    p = expect("deblackbox", ["deblackbox", data("dlog_p7.json")])
    rewritten = os.path.join(tmp, "rewritten.json")
    with open(rewritten, "w") as f:
        f.write(p.stdout)
    expect("deblackbox output revalidates", ["run", rewritten, "--shots", "50"])
    logged("deblackbox log", ["deblackbox", data("dlog_p7.json")])
    out = os.path.join(tmp, "log.json")
    expect("--out writes the log", ["factor", "15", "--out", out], out=lambda s: s.strip() in {"3", "5"})
    with open(out) as f:
        check("--out log matches schema", VALIDATOR.is_valid(json.load(f)))

expect("check-modexp true", ["check-modexp", "zn_star", "15", "2", "8"], out=lambda s: s.startswith("true"))
expect("check-modexp false", ["check-modexp", "zn_star", "15", "2", "6"], out=lambda s: s.strip() == "false")
logged("check-modexp log", ["check-modexp", "zn_star", "21", "5", "12"])
expect("no subcommand", [], code=4)

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
