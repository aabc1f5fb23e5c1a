"""Export word-frequency lists used by the acceptance fixtures.

Requires `pip install wordfreq`. Output: one `word<TAB>weight` line per word,
weight = frequency per billion words, rounded.
"""
import sys
from pathlib import Path

import wordfreq

SIZES = {"en": 20000, "uk": 20000, "ru": 8000, "el": 8000}


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for lang, n in SIZES.items():
        lines = []
        for w in wordfreq.top_n_list(lang, n):
            if not w or any(c.isspace() for c in w):
                continue
            weight = round(wordfreq.word_frequency(w, lang) * 1e9)
            if weight > 0:
                lines.append(f"{w}\t{weight}\n")
        (out / f"{lang}.tsv").write_text("".join(lines), encoding="utf-8")
        print(lang, len(lines))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/freq")
