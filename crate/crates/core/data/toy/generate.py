"""Regenerates the toy corpus and embeddings in this directory.

Four themes, each with common words and a few rare words. Documents mix one
dominant theme with background noise. Vectors are theme centers plus noise;
rare words sit closest to their center, so proximity alone favors them and
frequency reranking has something to fix.
"""
import random

THEMES = {
    "sports": "game team season player coach score league match win fans ball stadium".split(),
    "space": "orbit launch rocket moon nasa satellite planet mission shuttle astronaut solar earth".split(),
    "computing": "software computer windows file program disk memory driver graphics code server network".split(),
    "religion": "god church faith bible jesus christian belief prayer religion scripture heaven soul".split(),
}
RARE = {
    "sports": ["quarterbacking", "shortstops"],
    "space": ["perigee", "apoapsis"],
    "computing": ["bytecode", "mutexes"],
    "religion": ["exegesis", "homiletics"],
}
DIM = 50

rng = random.Random(7)
docs = []
for i in range(200):
    theme = list(THEMES)[i % 4]
    words = [rng.choice(THEMES[theme]) for _ in range(rng.randint(20, 40))]
    other = rng.choice([t for t in THEMES if t != theme])
    words += [rng.choice(THEMES[other]) for _ in range(rng.randint(2, 6))]
    if i % 25 < 2:
        words.append(rng.choice(RARE[theme]))
    rng.shuffle(words)
    docs.append(" ".join(words))

with open("corpus.txt", "w") as f:
    f.write("\n".join(docs) + "\n")
with open("split.txt", "w") as f:
    f.write("\n".join(str(i + 1) for i in range(200) if i % 5 in (1, 3)) + "\n")

centers = {t: [rng.gauss(0, 1) for _ in range(DIM)] for t in THEMES}
with open("embeddings.txt", "w") as f:
    for t, ws in THEMES.items():
        for w in ws:
            v = [c + rng.gauss(0, 0.5) for c in centers[t]]
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")
        for w in RARE[t]:
            v = [c + rng.gauss(0, 0.05) for c in centers[t]]
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")
    f.write("unusedword " + " ".join(f"{rng.gauss(0, 1):.6f}" for _ in range(DIM)) + "\n")
