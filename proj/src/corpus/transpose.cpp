#include <array>
#include <cstdlib>
#include <stdexcept>

#include "filmscore/corpus.h"

namespace filmscore::corpus {

int shift_to_c(PitchClass tonic) {
  int s = (12 - tonic.value()) % 12;
  if (s > 5) s -= 12;
  return s;
}

PitchClass detect_tonic(const ChordProgression& p) {
  if (p.bars.empty()) throw std::invalid_argument("empty progression");
  return p.last_chord().root;
}

PitchClass detect_tonic(const Melody& m) {
  if (m.key_tonic) return *m.key_tonic;
  if (m.events.empty()) throw std::invalid_argument("empty melody");
  std::array<int, 12> counts{};
  for (const NoteEvent& e : m.events) ++counts[static_cast<std::size_t>(pitch_class_of(e.pitch).value())];
  int best = 0;
  for (int pc = 1; pc < 12; ++pc) {
    if (counts[static_cast<std::size_t>(pc)] > counts[static_cast<std::size_t>(best)]) best = pc;
  }
  return PitchClass(best);
}

ChordProgression transpose(const ChordProgression& p, int semitones) {
  ChordProgression out = p;
  for (auto& bar : out.bars) {
    for (auto& chord : bar) {
      chord.root = chord.root.transposed(semitones);
      if (chord.bass) chord.bass = chord.bass->transposed(semitones);
    }
  }
  return out;
}

Melody transpose(const Melody& m, int semitones) {
  Melody out = m;
  for (auto& e : out.events) e.pitch += semitones;
  if (out.key_tonic) out.key_tonic = out.key_tonic->transposed(semitones);
  return out;
}

ChordProgression transpose_to_c(const ChordProgression& p) {
  return transpose(p, shift_to_c(detect_tonic(p)));
}

Melody transpose_to_c(const Melody& m, Register range) {
  Melody out = transpose(m, shift_to_c(detect_tonic(m)));
  if (out.events.empty()) return out;

  int best_shift = 0;
  int best_inside = -1;
  for (int octaves = 0; octaves <= 10; ++octaves) {
    for (int sign : {1, -1}) {
      if (octaves == 0 && sign < 0) continue;
      const int shift = 12 * octaves * sign;
      int inside = 0;
      bool legal = true;
      for (const NoteEvent& e : out.events) {
        const int p = e.pitch + shift;
        if (p < 0 || p > 127) legal = false;
        if (p >= range.lo && p <= range.hi) ++inside;
      }
      // Strictly better only, so smaller moves (visited first) win ties.
      if (legal && inside > best_inside) {
        best_inside = inside;
        best_shift = shift;
      }
    }
  }
  for (auto& e : out.events) e.pitch += best_shift;
  return out;
}

}  // namespace filmscore::corpus
