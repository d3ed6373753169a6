#!/usr/bin/env python3
"""Independent reference computations for the golden tests.

Reads the toy fixtures and writes fixtures/golden/oracle.json. Written from
the scoring rules, not from the Rust sources.
"""
import json
import re
from collections import Counter
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
TOY = ROOT / "fixtures" / "toy"


def normalize(s):
    tokens = []
    for run in re.split(r"[^0-9A-Za-z]+", s):
        tokens += re.findall(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+[a-z]*", run)
    return " ".join(t.lower() for t in tokens)


def grams(n):
    if not n:
        return Counter()
    while len(n) < 3:
        n += "$"
    return Counter(n[i:i + 3] for i in range(len(n) - 2))


def name_sim(a, b):
    na, nb = normalize(a), normalize(b)
    if na == nb:
        return 1.0
    ga, gb = grams(na), grams(nb)
    keys = set(ga) | set(gb)
    union = sum(max(ga[k], gb[k]) for k in keys)
    inter = sum(min(ga[k], gb[k]) for k in keys)
    return 0.0 if union == 0 else min(inter / union, 1 - 1e-9)


def load(name):
    return json.loads((TOY / name).read_text())


def columns(schema):
    for t in schema["tables"]:
        for c in t["columns"]:
            yield t, c


def key(t, c):
    return f"{t['name']}.{c['name']}".lower()


def is_fk(t, c):
    return any(fk["column"].lower() == c["name"].lower() for fk in t.get("foreign_keys", []))


def select(src, tgt, score, threshold):
    out = []
    for st, sc in columns(src):
        cands = [(score(st, sc, tt, tc), key(tt, tc), tt, tc) for tt, tc in columns(tgt)]
        top = max(x[0] for x in cands)
        best = min((x for x in cands if x[0] == top), key=lambda x: x[1])
        if best[0] >= threshold:
            out.append([st["name"], sc["name"], best[2]["name"], best[3]["name"]])
    return sorted(out)


def lexical_score(st, sc, tt, tc):
    return name_sim(f"{st['name']}.{sc['name']}", f"{tt['name']}.{tc['name']}")


def cupid_score(w_struct):
    def f(st, sc, tt, tc):
        lsim = name_sim(f"{sc['name']} {sc.get('description', '')}", f"{tc['name']} {tc.get('description', '')}")
        ssim = name_sim(st["name"], tt["name"])
        both_pk = sc.get("primary_key", False) and tc.get("primary_key", False)
        if both_pk or (is_fk(st, sc) and is_fk(tt, tc)):
            ssim = min(ssim + 0.2, 1.0)
        return w_struct * ssim + (1 - w_struct) * lsim
    return f


def flood(src, tgt, eps, max_iters):
    """Dense iteration over the pairwise connectivity graph."""
    nodes = []
    for st in src["tables"]:
        for tt in tgt["tables"]:
            nodes.append((st["name"].lower(), tt["name"].lower(), name_sim(st["name"], tt["name"])))
            for sc in st["columns"]:
                for tc in tt["columns"]:
                    nodes.append((key(st, sc), key(tt, tc), name_sim(sc["name"], tc["name"])))
    idx = {(a, b): i for i, (a, b, _) in enumerate(nodes)}
    edges = []
    for st in src["tables"]:
        for tt in tgt["tables"]:
            tp = idx[(st["name"].lower(), tt["name"].lower())]
            for sc in st["columns"]:
                for tc in tt["columns"]:
                    cp = idx[(key(st, sc), key(tt, tc))]
                    edges += [(tp, cp, "col"), (cp, tp, "col")]

    def fks(s):
        return [(f"{t['name']}.{fk['column']}".lower(), f"{fk['ref_table']}.{fk['ref_column']}".lower())
                for t in s["tables"] for fk in t.get("foreign_keys", [])]

    for cs, ps in fks(src):
        for ct, pt in fks(tgt):
            a, b = idx[(cs, ct)], idx[(ps, pt)]
            edges += [(a, b, "fk"), (b, a, "fk")]
    n = len(nodes)
    outdeg = Counter((f, l) for f, _, l in edges)
    w = [[0.0] * n for _ in range(n)]
    for f, t, l in edges:
        w[t][f] += 1.0 / outdeg[(f, l)]
    s0 = [x[2] for x in nodes]
    m = max(s0)
    s0 = [v / m for v in s0] if m > 0 else s0
    sigma = list(s0)
    it = 0
    while it < max_iters:
        nxt = [s0[p] + sigma[p] + sum(w[p][q] * sigma[q] for q in range(n)) for p in range(n)]
        m = max(nxt)
        nxt = [v / m for v in nxt] if m > 0 else nxt
        delta = max(abs(a - b) for a, b in zip(sigma, nxt))
        sigma = nxt
        it += 1
        if delta < eps:
            break
    return {(a, b): sigma[i] for i, (a, b, _) in enumerate(nodes)}, it


def flood_score(src, tgt, eps=1e-4, max_iters=100):
    fixed, _ = flood(src, tgt, eps, max_iters)
    return lambda st, sc, tt, tc: fixed[(key(st, sc), key(tt, tc))]


def render(t, names=True, desc=True, keys=True, types=True):
    lines = [f"table {t['name']}" + (f" — {t['description']}" if desc and t.get("description") else "")]
    for c in t["columns"]:
        line = f"column {c['name']}"
        if types and c.get("type"):
            line += f" : {c['type']}"
        if desc and c.get("description"):
            line += f" — {c['description']}"
        if keys and c.get("primary_key"):
            line += " [PK]"
        if keys:
            for fk in t.get("foreign_keys", []):
                if fk["column"].lower() == c["name"].lower():
                    line += f" [FK→{fk['ref_table']}.{fk['ref_column']}]"
        lines.append(line)
    return "\n".join(lines)


TWO_BY_TWO = (
    {"name": "s", "tables": [{"name": "person", "columns": [
        {"name": "person_id", "primary_key": True}, {"name": "birth_year"}]}]},
    {"name": "t", "tables": [{"name": "patient", "columns": [
        {"name": "patient_id", "primary_key": True}, {"name": "year_of_birth"}]}]},
)


def main():
    pairs = {
        "toy_bank": (load("toy_bank1.json"), load("toy_bank2.json")),
        "toy_clinic": (load("toy_clinic.json"), load("toy_omop.json")),
    }
    out = {"name_similarity": [], "lexical_0_4": {}, "lexical_0_25": {}, "cupid_default": {},
           "cupid_0_3": {}, "flood_default": {}, "flood_iterations": {}, "composite_all_0_4": {},
           "composite_all_0_25": {}}
    for a, b in [("currency_code", "currency"), ("customer_id", "CustomerId"), ("abc", "xyz"),
                 ("full_name", "name"), ("acct_id", "account_id"), ("birth_date", "year_of_birth"),
                 ("ab", "abc"), ("x", "x_y")]:
        out["name_similarity"].append([a, b, name_sim(a, b)])
    for name, (s, t) in pairs.items():
        out["lexical_0_4"][name] = select(s, t, lexical_score, 0.4)
        out["lexical_0_25"][name] = select(s, t, lexical_score, 0.25)
        out["cupid_default"][name] = select(s, t, cupid_score(0.5), 0.5)
        out["cupid_0_3"][name] = select(s, t, cupid_score(0.5), 0.3)
        fl = flood_score(s, t)
        out["flood_default"][name] = select(s, t, fl, 0.3)
        out["flood_iterations"][name] = flood(s, t, 1e-4, 100)[1]
        lx, cu = lexical_score, cupid_score(0.5)
        mean = lambda st, sc, tt, tc: (lx(st, sc, tt, tc) + fl(st, sc, tt, tc) + cu(st, sc, tt, tc)) / 3
        out["composite_all_0_4"][name] = select(s, t, mean, 0.4)
        out["composite_all_0_25"][name] = select(s, t, mean, 0.25)
    fixed, iters = flood(*TWO_BY_TWO, 1e-13, 100000)
    out["flood_2x2_fixed_point"] = [[a, b, v] for (a, b), v in sorted(fixed.items())]
    bank1 = load("toy_bank1.json")
    accounts = next(t for t in bank1["tables"] if t["name"] == "accounts")
    out["accounts_word_count"] = {
        "all": len(render(accounts).split()),
        "names_only": len(render(accounts, desc=False, keys=False, types=False).split()),
    }
    out["accounts_render_all"] = render(accounts)
    dest = ROOT / "fixtures" / "golden" / "oracle.json"
    dest.write_text(json.dumps(out, indent=1, ensure_ascii=False) + "\n")
    print(f"wrote {dest} ({iters} iterations for 2x2)")


if __name__ == "__main__":
    main()
