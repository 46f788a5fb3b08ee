#pragma once

// Rendering a cue plan: layered Standard MIDI File, chord sheet and timeline.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "filmscore/assemble.h"
#include "filmscore/music.h"

namespace filmscore::emit {

struct LayerRange {
  int lo = 0;
  int hi = 127;
  bool contains(int pitch) const { return pitch >= lo && pitch <= hi; }
};

struct Layers {
  LayerRange melody{72, 95};
  LayerRange counter{60, 71};
  LayerRange chords{48, 59};
  LayerRange bass{36, 47};
};

struct Score {
  assemble::CuePlan plan;
  Layers layers;
};

inline constexpr int kPpq = 480;
inline constexpr int kTrackCount = 5;

enum class Layer { kMelody = 0, kCounter = 1, kChords = 2, kBass = 3 };

/// Fraction of the written duration that actually sounds.
double gate_ratio(Articulation a);

/// Pitch moved by whole octaves into the range (nearest octave).
int fold_into(int pitch, const LayerRange& r);

struct PlacedNote {
  Tick on = 0;
  Tick off = 0;
  int pitch = 60;
  int velocity = 72;
};

struct TempoChange {
  Tick tick = 0;
  int bpm = 120;
};

/// Absolute-time layout of a score, shared by the MIDI writer and tests.
struct Rendering {
  std::vector<TempoChange> tempo;
  /// Start tick of every cue, plus the end tick of the film last.
  std::vector<Tick> cue_ticks;
  std::array<std::vector<PlacedNote>, 4> layers;
};

/// Throws EmptyPlan for a plan without cues, and Error when the layer
/// ranges overlap or are narrower than an octave.
Rendering render(const Score& s);

/// Minimal-length MIDI variable-length quantity.
std::vector<std::uint8_t> encode_vlq(std::uint32_t value);

/// SMF format 1, five tracks: tempo map, melody, counter-melody, chords, bass.
std::vector<std::uint8_t> write_midi(const Score& s);

/// One line per cue: "index start tempo: bars".
std::string write_chord_sheet(const Score& s);

/// Versioned JSON projection of the cue plan.
std::string write_timeline(const Score& s);

}  // namespace filmscore::emit
