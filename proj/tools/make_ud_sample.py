#!/usr/bin/env python3
"""Writes the UD-style sample treebanks under data/ud_sample/.

Twelve synthetic languages, 50 sentences each. The files exercise the parts
of CoNLL-U a loader has to cope with: comment lines, multiword-token ranges,
empty nodes, filled LEMMA/XPOS/FEATS/DEPS/MISC columns and language-specific
relation subtypes. Output is deterministic.
"""
import os
import random

LANGS = [
    # code, svo, prepositions, adj_before, relation variants
    ("l01", True, True, True, {}),
    ("l02", True, True, False, {"nmod": "nmod:poss"}),
    ("l03", False, False, True, {"obl": "obl:arg"}),
    ("l04", True, True, False, {"advmod": "advmod:emph"}),
    ("l05", True, True, True, {"nsubj": "nsubj:pass"}),
    ("l06", False, True, False, {"amod": "amod:att"}),
    ("l07", True, False, True, {"det": "det:poss"}),
    ("l08", True, True, False, {"obj": "obj:lvc"}),
    ("l09", False, False, True, {"case": "case:loc"}),
    ("l10", True, True, True, {"cc": "cc:preconj"}),
    ("l11", True, True, False, {"conj": "flat"}),
    ("l12", False, True, True, {"obl": "obl:tmod", "nmod": "nmod:gen"}),
]


def words(rng, n, suffix):
    on = "b d f g k l m n p r s t v z".split()
    vo = "a e i o u".split()
    out = []
    while len(out) < n:
        w = "".join(rng.choice(on) + rng.choice(vo) for _ in range(rng.randint(1, 3))) + suffix
        if w not in out:
            out.append(w)
    return out


def sentence(rng, lex, svo, prep, adj_before, rel):
    toks = []  # dicts with form, upos, head(ref to dict or None), deprel

    def tok(form, upos, deprel):
        t = {"form": form, "upos": upos, "deprel": rel.get(deprel, deprel), "head": None}
        return t

    def np(label):
        noun = tok(rng.choice(lex["NOUN"]), "NOUN", label)
        left, right = [], []
        if rng.random() < 0.7:
            d = tok(rng.choice(lex["DET"]), "DET", "det")
            d["head"] = noun
            left.append(d)
        if rng.random() < 0.4:
            a = tok(rng.choice(lex["ADJ"]), "ADJ", "amod")
            a["head"] = noun
            (left if adj_before else right).append(a)
        if rng.random() < 0.2:
            c = tok(rng.choice(lex["NOUN"]), "NOUN", "conj")
            c["head"] = noun
            cc = tok(rng.choice(lex["CCONJ"]), "CCONJ", "cc")
            cc["head"] = c
            right += [cc, c]
        return noun, left + [noun] + right

    def pp(label):
        noun, span = np(label)
        adp = tok(rng.choice(lex["ADP"]), "ADP", "case")
        adp["head"] = noun
        return noun, ([adp] + span) if prep else (span + [adp])

    verb = tok(rng.choice(lex["VERB"]), "VERB", "root")
    subj, sspan = np("nsubj")
    subj["head"] = verb
    parts_before, parts_after = [sspan], []
    if rng.random() < 0.6:
        obj, ospan = np("obj")
        obj["head"] = verb
        (parts_after if svo else parts_before).append(ospan)
    if rng.random() < 0.4:
        obl, pspan = pp("obl")
        obl["head"] = verb
        (parts_after if svo else parts_before).append(pspan)
    if rng.random() < 0.25:
        adv = tok(rng.choice(lex["ADV"]), "ADV", "advmod")
        adv["head"] = verb
        parts_after.append([adv])
    punct = tok(".", "PUNCT", "punct")
    punct["head"] = verb
    for span in parts_before:
        toks += span
    toks.append(verb)
    for span in parts_after:
        toks += span
    toks.append(punct)
    # occasional non-projective arc: move an adverb to the front
    if rng.random() < 0.1:
        advs = [t for t in toks if t["upos"] == "ADV"]
        if advs:
            toks.remove(advs[0])
            toks.insert(0, advs[0])
    return toks


def render(lang, k, toks, rng):
    index = {id(t): i + 1 for i, t in enumerate(toks)}
    lines = [f"# sent_id = {lang}-{k:03d}", f"# lang = {lang}",
             "# text = " + " ".join(t["form"] for t in toks)]
    mwt_at = None
    # contract a case marker with the following determiner into one surface token
    for i in range(len(toks) - 1):
        if toks[i]["upos"] == "ADP" and toks[i + 1]["upos"] == "DET" and rng.random() < 0.5:
            mwt_at = i + 1
            break
    empty_after = rng.randint(1, len(toks)) if rng.random() < 0.15 else None
    for i, t in enumerate(toks, start=1):
        if mwt_at == i:
            surface = toks[i - 1]["form"][:2] + toks[i]["form"]
            lines.append(f"{i}-{i + 1}\t{surface}\t_\t_\t_\t_\t_\t_\t_\t_")
        head = 0 if t["head"] is None else index[id(t["head"])]
        feats = "_" if t["upos"] in ("PUNCT", "ADP", "CCONJ") else f"Lang={lang.title()}"
        misc = "SpaceAfter=No" if i < len(toks) and toks[i]["upos"] == "PUNCT" else "_"
        lines.append(f"{i}\t{t['form']}\t{t['form'].lower()}\t{t['upos']}\t{t['upos'][:2].lower()}"
                     f"\t{feats}\t{head}\t{t['deprel']}\t{head}:{t['deprel']}\t{misc}")
        if empty_after == i:
            lines.append(f"{i}.1\t{toks[i - 1]['form']}\t_\t_\t_\t_\t_\t_\t{i}:orphan\t_")
    return "\n".join(lines) + "\n\n"


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "data", "ud_sample")
    os.makedirs(out_dir, exist_ok=True)
    for n, (lang, svo, prep, adj_before, rel) in enumerate(LANGS):
        rng = random.Random(1000 + n)
        lex = {
            "NOUN": words(rng, 30, ""), "VERB": words(rng, 12, "r"), "ADJ": words(rng, 10, "y"),
            "DET": words(rng, 3, ""), "ADP": words(rng, 5, "n"), "ADV": words(rng, 6, "ly"),
            "CCONJ": words(rng, 2, "nd"),
        }
        text = "".join(render(lang, k + 1, sentence(rng, lex, svo, prep, adj_before, rel), rng)
                       for k in range(50))
        with open(os.path.join(out_dir, f"{lang}.conllu"), "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


if __name__ == "__main__":
    main()
