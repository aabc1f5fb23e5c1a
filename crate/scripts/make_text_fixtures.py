"""Writes the text-preparation fixtures and their cleaned references.

The reference cleaner is deliberately written without reference to the
Rust implementation: regex tag removal, NFD, drop listed marks, NFC.
"""
import random
import re
import unicodedata
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates/core/tests/data/text"
FOLD_MARKS = {"́", "̀"}
TAG = re.compile(r"<!--.*?-->|</?[A-Za-z][^<>]*>", re.S)

UK = ("мова слово книга місто річка поле сонце вітер земля небо хата двір "
      "ліс гора море день ніч ранок вечір людина дитина батько мати").split()
ACCENTED = ["мо́ва", "сло́во", "замо́к", "за́мок",
            "кни́га", "café", "résumé", "ві̀тер", "мі́сто"]
TAGS = ["<b>", "</b>", "<i>", "</i>", "<p>", "</p>", '<a href="x.html">', "</a>",
        "<br/>", "<!-- note -->", "<span class=\"k\">", "</span>", "<em>", "</em>"]


def clean(text):
    prev = None
    while prev != text:
        prev = text
        text = TAG.sub("", text)
        text = unicodedata.normalize("NFD", text)
        text = "".join(c for c in text if c not in FOLD_MARKS)
        text = unicodedata.normalize("NFC", text)
    return text


def html_fixture(rng):
    words = [rng.choice(UK) for _ in range(1000 - len(ACCENTED))]
    for w in ACCENTED:
        words.insert(rng.randrange(len(words) + 1), w)
    assert len(words) == 1000
    slots = sorted(rng.sample(range(1000), len(TAGS)))
    for i, t in zip(reversed(slots), reversed(TAGS)):
        words[i] = t + words[i] if not t.startswith("</") else words[i] + t
    lines = [" ".join(words[i:i + 20]) for i in range(0, 1000, 20)]
    raw = "\n".join(lines) + "\n"
    (OUT / "html_accents.txt").write_text(raw, encoding="utf-8")
    (OUT / "html_accents.clean.txt").write_text(clean(raw), encoding="utf-8")


def mixed_fixture(rng):
    pool = UK + "hello world tokenizer قلم كتاب مدرسة გამარჯობა სახლი წიგნი 2024 3.14 😀 naïve".split()
    words = [rng.choice(pool) for _ in range(250)]
    for i in rng.sample(range(250), 25):
        words[i] = words[i] + rng.choice([",", ".", "!", "?", ";", ":"])
    for i in rng.sample(range(250), 10):
        words[i] = "(" + words[i] + ")"
    seps = [" ", "  ", "\t", "  ", "\n"]
    text = words[0] + "".join(rng.choice(seps) + w for w in words[1:]) + "\n"
    assert len(text.split()) == 250
    (OUT / "mixed_250.txt").write_text(text, encoding="utf-8")


def arabic_fixture(rng):
    data = Path(__file__).resolve().parent.parent / "crates/core/data"
    def entries(name):
        lines = (data / name).read_text(encoding="utf-8").splitlines()
        return [l.strip() for l in lines if l.strip() and not l.strip().startswith("#")]

    prefixes = entries("arabic_prefixes.txt")
    suffixes = entries("arabic_suffixes.txt")
    stems = "كتاب قلم بيت مدرس طالب علم عمل سيار مكتب ولد بنت درس".split()
    out = []
    for _ in range(100):
        w = rng.choice(stems)
        if rng.random() < 0.6:
            w = rng.choice(prefixes) + w
        if rng.random() < 0.5:
            w = w + rng.choice(suffixes)
        if rng.random() < 0.1:
            w = rng.choice(["من", "في", "هو", "لا"])
        out.append(w)
    (OUT / "arabic_100.txt").write_text("\n".join(out) + "\n", encoding="utf-8")


if __name__ == "__main__":
    rng = random.Random(20240601)
    OUT.mkdir(parents=True, exist_ok=True)
    html_fixture(rng)
    mixed_fixture(rng)
    arabic_fixture(rng)
