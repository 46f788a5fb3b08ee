#include <array>
#include <string>

#include "filmscore/corpus.h"

namespace filmscore::corpus {

namespace {

struct SuffixRule {
  std::string_view text;
  ChordQuality quality;
  bool takes_extensions;
};

// Longest match first. Numeric extensions reduce to their base seventh.
constexpr std::array<SuffixRule, 20> kSuffixes = {{
    {"m7b5", ChordQuality::kMin7b5, false},
    {"maj13", ChordQuality::kMaj7, true},
    {"maj9", ChordQuality::kMaj7, true},
    {"maj7", ChordQuality::kMaj7, true},
    {"dim7", ChordQuality::kDim7, false},
    {"sus4", ChordQuality::kSus4, false},
    {"sus2", ChordQuality::kSus2, false},
    {"dim", ChordQuality::kDim, false},
    {"aug", ChordQuality::kAug, false},
    {"m13", ChordQuality::kMin7, true},
    {"m11", ChordQuality::kMin7, true},
    {"m9", ChordQuality::kMin7, true},
    {"m7", ChordQuality::kMin7, true},
    {"m6", ChordQuality::kMin6, false},
    {"m", ChordQuality::kMin, false},
    {"13", ChordQuality::kDom7, true},
    {"11", ChordQuality::kDom7, true},
    {"9", ChordQuality::kDom7, true},
    {"7", ChordQuality::kDom7, true},
    {"6", ChordQuality::kMaj6, false},
}};

constexpr std::array<std::string_view, 5> kAlterations = {"alt", "#11", "b13", "b9", "#9"};

bool starts_with(std::string_view s, std::size_t pos, std::string_view prefix) {
  return s.substr(pos, prefix.size()) == prefix;
}

// Returns the number of characters consumed, 0 when no root is present.
std::size_t parse_root(std::string_view s, std::size_t pos, PitchClass& out) {
  if (pos >= s.size()) return 0;
  static constexpr int kNatural[] = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char c = s[pos];
  if (c < 'A' || c > 'G') return 0;
  int value = kNatural[c - 'A'];
  std::size_t used = 1;
  if (pos + 1 < s.size()) {
    if (s[pos + 1] == '#') {
      ++value;
      ++used;
    } else if (s[pos + 1] == 'b') {
      --value;
      ++used;
    }
  }
  out = PitchClass(value);
  return used;
}

}  // namespace

ChordSymbol parse_chord_symbol(std::string_view token) {
  const std::string tok(token);
  ChordSymbol out;
  std::size_t pos = parse_root(token, 0, out.root);
  if (pos == 0) throw MalformedChord(tok, 0);

  out.quality = ChordQuality::kMaj;
  bool takes_extensions = false;
  for (const SuffixRule& rule : kSuffixes) {
    if (starts_with(token, pos, rule.text)) {
      out.quality = rule.quality;
      takes_extensions = rule.takes_extensions;
      pos += rule.text.size();
      break;
    }
  }

  if (takes_extensions) {
    bool advanced = true;
    while (advanced && pos < token.size()) {
      advanced = false;
      for (std::string_view alt : kAlterations) {
        if (starts_with(token, pos, alt)) {
          pos += alt.size();
          advanced = true;
          break;
        }
      }
    }
  }

  if (pos < token.size() && token[pos] == '/') {
    PitchClass bass;
    const std::size_t used = parse_root(token, pos + 1, bass);
    if (used == 0) throw MalformedChord(tok, pos + 1);
    out.bass = bass;
    pos += 1 + used;
  }

  if (pos != token.size()) throw MalformedChord(tok, pos);
  return out;
}

std::string format_pitch_class(PitchClass pc) {
  static constexpr const char* kNames[] = {"C",  "C#", "D",  "D#", "E",  "F",
                                           "F#", "G",  "G#", "A",  "A#", "B"};
  return kNames[pc.value()];
}

std::string format_chord(const ChordSymbol& c) {
  std::string out = format_pitch_class(c.root) + quality_suffix(c.quality);
  if (c.bass) out += "/" + format_pitch_class(*c.bass);
  return out;
}

}  // namespace filmscore::corpus
