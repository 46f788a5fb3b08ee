#pragma once

// Training-corpus ingestion: chord symbols, chord sheets, the ABC melody
// subset, and normalisation of everything to the key of C.

#include <string>
#include <string_view>
#include <vector>

#include "filmscore/errors.h"
#include "filmscore/music.h"

namespace filmscore::corpus {

/// Parse a chord symbol such as "Dm7", "F#m7b5/A" or "Bb9".
///
/// Grammar: root [A-G] ('#'|'b')?, a quality suffix, an optional extension
/// tail (9, 11, 13, b9, #9, #11, b13, alt) that folds into the base seventh
/// quality, and an optional "/" bass root. Throws MalformedChord with the
/// offset of the first character that cannot be consumed.
ChordSymbol parse_chord_symbol(std::string_view token);

/// Canonical spelling: sharps for black-key roots, one of the 13 base suffixes.
std::string format_chord(const ChordSymbol& c);
std::string format_pitch_class(PitchClass pc);

/// One progression per non-blank line, bars separated by '|', one or two
/// whitespace-separated chords per bar. Text before a ':' is a line label
/// and is ignored; lines starting with '%' are comments.
std::vector<ChordProgression> parse_chord_sheet(std::string_view doc);

/// Bars joined with " | ", two-chord bars space separated.
std::string format_progression(const ChordProgression& p);

struct MelodyCorpus {
  std::vector<Melody> melodies;
  /// One line per skipped tune, naming its X: number and the failure.
  std::vector<std::string> diagnostics;
};

/// Parse every tune of an ABC document. Each tune starts at an X: line.
/// Supported: headers X T M L K (others ignored), notes with accidentals and
/// octave marks, rests, ties, durations (n, /n, n/m, /), broken rhythm (> <), tuplets
/// (2 (3 (4, bar lines, repeats |: :| :: with first/second endings, quoted
/// chord annotations (ignored). Anything else fails the tune.
MelodyCorpus parse_melody_corpus(std::string_view doc);

/// Parse exactly one tune; throws InputError on failure.
Melody parse_abc_tune(std::string_view tune);

/// Serialise a melody as a single ABC tune (K:C, L:1/8, sharps for
/// accidentals, notes split across bar lines with ties). parse_abc_tune
/// recovers the same events up to velocity and articulation.
std::string format_abc(const Melody& m, int index = 1);

struct Register {
  int lo = 48;
  int hi = 84;
};

/// Semitone shift in [-6, +5] that moves pitch class `tonic` to C.
int shift_to_c(PitchClass tonic);

/// Tonic detection: root of the final chord.
PitchClass detect_tonic(const ChordProgression& p);
/// Tonic detection: key header when present, else the most frequent pitch
/// class (lowest wins ties).
PitchClass detect_tonic(const Melody& m);

ChordProgression transpose(const ChordProgression& p, int semitones);
Melody transpose(const Melody& m, int semitones);

/// Shift the progression so its detected tonic becomes C.
ChordProgression transpose_to_c(const ChordProgression& p);

/// Shift the melody so its detected tonic becomes C, then move it by whole
/// octaves into `range` (the octave placing the most notes in range wins,
/// preferring the smallest move). The key header, if any, becomes C.
Melody transpose_to_c(const Melody& m, Register range = {});

}  // namespace filmscore::corpus
