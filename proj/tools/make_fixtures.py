#!/usr/bin/env python3
"""Regenerate the deterministic test fixtures under tests/fixtures/."""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
EMOTIONS = ["happy", "angry", "sad", "neutral", "fear", "disgust", "surprise"]


def emotion_vec(rng, label, strength=0.8, noise=0.05):
    v = {e: rng.uniform(0.0, noise) for e in EMOTIONS}
    v[label] += strength
    total = sum(v.values())
    return {e: round(x / total, 4) for e, x in v.items()}


def face(rng, fid, label, size, strength=0.8):
    x = round(rng.uniform(0.05, 0.5), 3)
    y = round(rng.uniform(0.05, 0.4), 3)
    return {"id": fid, "bbox": [x, y, size, size], "emotions": emotion_vec(rng, label, strength)}


def aesthetics(rng, movement):
    return {
        "panning": round(rng.uniform(0.0, 0.3), 3),
        "zoom": round(rng.uniform(0.0, 0.2), 3),
        "cut_similarity": round(rng.uniform(0.6, 1.0), 3),
        "movement": round(min(1.0, max(0.0, movement + rng.uniform(-0.1, 0.1))), 3),
        "colorfulness": round(rng.uniform(0.2, 0.8), 3),
    }


def film_five_minutes():
    """Five-minute film with three main characters, a faceless stretch and a
    happy/fearful co-presence."""
    rng = random.Random(7)
    step = 0.25
    frames = []
    t = 0.0
    while t < 300.0 - 1e-9:
        faces = []
        movement = 0.3
        if t < 60:
            faces.append(face(rng, "alice", "happy", 0.30))
        elif t < 100:
            faces.append(face(rng, "bob", "sad", 0.28))
            movement = 0.1
        elif t < 130:
            movement = 0.9
        elif t < 180:
            faces.append(face(rng, "alice", "happy", 0.32))
            faces.append(face(rng, "carol", "fear", 0.22))
            movement = 0.6
        elif t < 230:
            faces.append(face(rng, "carol", "fear", 0.30))
            movement = 0.7
        elif t < 270:
            faces.append(face(rng, "bob", "angry", 0.30))
            movement = 0.8
        else:
            faces.append(face(rng, "alice", "neutral", 0.30))
            if 280 <= t < 284:
                faces.append(face(rng, "dave", "surprise", 0.05))
            movement = 0.2
        frames.append({"t": round(t, 3), "faces": faces, "aesthetics": aesthetics(rng, movement)})
        t += step
    return {"fps": 24, "duration": 300.0, "frames": frames}


def film_two_characters():
    rng = random.Random(11)
    frames = []
    for i in range(240):
        t = i * 0.25
        f = face(rng, "A", "happy", 0.3, 0.9) if t < 30 else face(rng, "B", "sad", 0.3, 0.9)
        frames.append({"t": t, "faces": [f]})
    return {"fps": 4, "duration": 60.0, "frames": frames}


def film_constant():
    one = {"happy": 0.7, "angry": 0.0, "sad": 0.1, "neutral": 0.2, "fear": 0.0, "disgust": 0.0, "surprise": 0.0}
    frames = [{"t": i * 0.5, "faces": [{"id": "solo", "bbox": [0.3, 0.3, 0.3, 0.3], "emotions": one}]}
              for i in range(120)]
    return {"fps": 2, "duration": 60.0, "frames": frames}


# --- melodies -------------------------------------------------------------

LETTERS = "CDEFGAB"
KEYS = [("C", "C"), ("G", "G"), ("D", "D"), ("A", "A"), ("F", "F"), ("Bb", "B"), ("Eb", "E"),
        ("Em", "E"), ("Am", "A"), ("Dm", "D"), ("Bm", "B"), ("Gm", "G")]
BAR_RHYTHMS = [[2, 2, 2, 2], [1, 1, 2, 2, 2], [2, 1, 1, 2, 2], [4, 2, 2], [3, 1, 2, 2],
               [2, 2, 4], [1, 1, 1, 1, 2, 2], [6, 2], [2, 2, 2, 1, 1]]


def abc_note(index):
    """Diatonic step index (0 = middle C letter) to an ABC pitch."""
    octave, letter = divmod(index, 7)
    name = LETTERS[letter]
    if octave <= 0:
        return name + "," * (-octave)
    return name.lower() + "'" * (octave - 1)


def duration_text(n):
    return "" if n == 1 else str(n)


def make_tune(rng, number):
    key, letter = KEYS[number % len(KEYS)]
    tonic = LETTERS.index(letter)
    home = tonic + (7 if tonic < 3 else 0)
    style = number % 5
    pos = home
    bars = []
    tie_into_next = False
    for b in range(8):
        rhythm = [8] if b == 7 else rng.choice(BAR_RHYTHMS)
        notes = []
        for k, d in enumerate(rhythm):
            if b == 7:
                pos = home
            elif not (tie_into_next and k == 0):
                pos = max(3, min(15, pos + rng.choice([-2, -1, -1, 0, 1, 1, 2, 3, -3])))
            notes.append(abc_note(pos) + duration_text(d))
        tie_into_next = style == 2 and b == 3
        if tie_into_next:
            notes[-1] += "-"
        bars.append(" ".join(notes) if rng.random() < 0.3 else "".join(notes))
    if style == 3:
        # Broken rhythm: dotted eighth plus sixteenth pairs.
        bars[1] = "B>c d<e f2 e2"
    if style == 1:
        body = "|: " + " | ".join(bars[:4]) + " :| " + " | ".join(bars[4:]) + " |]"
    else:
        body = " | ".join(bars) + " |]"
    return f"X:{number}\nT:Fixture tune {number}\nM:4/4\nL:1/8\nK:{key}\n{body}\n"


def melody_corpus():
    rng = random.Random(3)
    return "\n".join(make_tune(rng, n) for n in range(1, 41))


# --- chord progressions ---------------------------------------------------

NOTE_NAMES = ["C", "Db", "D", "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B"]
MAJOR = {"I": (0, ""), "Imaj7": (0, "maj7"), "ii": (2, "m"), "ii7": (2, "m7"), "iii": (4, "m"),
         "iii7": (4, "m7"), "IV": (5, ""), "IVmaj7": (5, "maj7"), "V": (7, ""), "V7": (7, "7"),
         "vi": (9, "m"), "vi7": (9, "m7"), "viiø": (11, "m7b5"), "I6": (0, "6"), "V/V": (2, "7"),
         "IVsus": (5, "sus2"), "Vsus": (7, "sus4")}
MINOR = {"i": (0, "m"), "i7": (0, "m7"), "iiø": (2, "m7b5"), "III": (3, ""), "iv": (5, "m"),
         "iv7": (5, "m7"), "V": (7, ""), "V7": (7, "7"), "VI": (8, ""), "VII": (10, ""), "vii°7": (11, "dim7"),
         "i6": (0, "m6")}
MAJOR_TEMPLATES = [
    "I | vi | ii | V", "I | IV | V | I", "ii7 V7 | Imaj7", "I | IV | I | V7", "vi | IV | I | V",
    "Imaj7 | vi7 | ii7 | V7", "I | V/V | V7 | I", "I | iii | IV | V", "IVmaj7 | iii7 | ii7 V7 | Imaj7",
    "I6 | IV | Vsus V7 | I", "I | IVsus | V | I", "I | viiø | iii7 | vi7",
]
MINOR_TEMPLATES = ["i | iv | V7 | i", "i | VI | III | VII", "iiø | V7 | i", "i | iv7 | vii°7 | i",
                   "i6 | VI | iiø V7 | i"]


def render_template(template, table, root):
    bars = []
    for bar in template.split("|"):
        chords = []
        for numeral in bar.split():
            off, suffix = table[numeral]
            chords.append(NOTE_NAMES[(root + off) % 12] + suffix)
        bars.append(" ".join(chords))
    return bars


def chord_corpus():
    rng = random.Random(5)
    lines = ["% fixture chord progressions, one per line"]
    for n in range(100):
        root = rng.randrange(12)
        minor = rng.random() < 0.25
        table, templates = (MINOR, MINOR_TEMPLATES) if minor else (MAJOR, MAJOR_TEMPLATES)
        tonic = render_template("i" if minor else "I", table, root)[0]
        bars = []
        sections = rng.choice([1, 2, 3, 4])
        for _ in range(sections):
            bars += render_template(rng.choice(templates), table, root)
        if bars[-1] != tonic:
            bars.append(tonic)
        lines.append(" | ".join(bars[:16]) if len(bars) <= 16 else " | ".join(bars[:15] + [tonic]))
    return "\n".join(lines) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "film_5min.json").write_text(json.dumps(film_five_minutes(), separators=(",", ":")) + "\n")
    (OUT / "film_two_characters.json").write_text(json.dumps(film_two_characters(), indent=None) + "\n")
    (OUT / "film_constant.json").write_text(json.dumps(film_constant(), indent=None) + "\n")
    (OUT / "melodies.abc").write_text(melody_corpus())
    (OUT / "chords.txt").write_text(chord_corpus())


if __name__ == "__main__":
    main()
