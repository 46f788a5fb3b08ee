#pragma once

// Core musical value types shared by every stage of the pipeline.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace filmscore {

using Tick = std::int64_t;

inline constexpr Tick kTicksPerQuarter = 480;
inline constexpr Tick kTicksPerWhole = 4 * kTicksPerQuarter;

/// Pitch class 0..11, 0 = C. Construction wraps any integer into range.
class PitchClass {
 public:
  constexpr PitchClass() = default;
  constexpr explicit PitchClass(int v) : value_(((v % 12) + 12) % 12) {}

  constexpr int value() const { return value_; }
  constexpr PitchClass transposed(int semitones) const { return PitchClass(value_ + semitones); }

  friend constexpr bool operator==(PitchClass, PitchClass) = default;
  friend constexpr auto operator<=>(PitchClass, PitchClass) = default;

 private:
  int value_ = 0;
};

constexpr PitchClass pitch_class_of(int midi_pitch) { return PitchClass(midi_pitch); }

enum class Articulation { kNone, kStaccato, kTenuto };

struct NoteEvent {
  Tick onset = 0;
  Tick duration = kTicksPerQuarter;
  int pitch = 60;
  int velocity = 72;
  Articulation articulation = Articulation::kNone;

  Tick end() const { return onset + duration; }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct Meter {
  int beats_per_bar = 4;
  int beat_unit = 4;

  Tick bar_ticks() const { return beats_per_bar * (kTicksPerWhole / beat_unit); }
  friend bool operator==(const Meter&, const Meter&) = default;
};

/// A monophonic line. Events are sorted by onset and never overlap.
struct Melody {
  std::vector<NoteEvent> events;
  Meter meter;
  int length_bars = 0;
  std::string title;
  /// Tonic from a key-signature header, when the source carried one.
  std::optional<PitchClass> key_tonic;

  Tick length_ticks() const { return length_bars * meter.bar_ticks(); }
  friend bool operator==(const Melody&, const Melody&) = default;
};

bool is_valid_melody(const Melody& m, std::string* why = nullptr);

/// Recompute length_bars as the smallest bar count holding every event.
void fit_length_to_events(Melody& m);

enum class ChordQuality {
  kMaj,
  kMin,
  kDim,
  kAug,
  kDom7,
  kMaj7,
  kMin7,
  kMin7b5,
  kDim7,
  kSus4,
  kSus2,
  kMin6,
  kMaj6,
};

inline constexpr std::array<ChordQuality, 13> kAllQualities = {
    ChordQuality::kMaj,  ChordQuality::kMin,    ChordQuality::kDim,  ChordQuality::kAug,
    ChordQuality::kDom7, ChordQuality::kMaj7,   ChordQuality::kMin7, ChordQuality::kMin7b5,
    ChordQuality::kDim7, ChordQuality::kSus4,   ChordQuality::kSus2, ChordQuality::kMin6,
    ChordQuality::kMaj6,
};

/// Semitone offsets of the chord tones above the root.
std::span<const int> quality_intervals(ChordQuality q);
const char* quality_suffix(ChordQuality q);
const char* quality_name(ChordQuality q);

struct ChordSymbol {
  PitchClass root;
  ChordQuality quality = ChordQuality::kMaj;
  std::optional<PitchClass> bass;

  /// Sorted, duplicate-free pitch classes of the chord tones (bass excluded).
  std::vector<int> tone_classes() const;
  bool contains(PitchClass pc) const;

  friend bool operator==(const ChordSymbol&, const ChordSymbol&) = default;
};

/// One bar slot: one chord for the whole bar, or two splitting it at the midpoint.
using BarChords = std::vector<ChordSymbol>;

struct ChordProgression {
  std::vector<BarChords> bars;
  Meter meter;

  std::size_t chord_count() const;
  const ChordSymbol& last_chord() const { return bars.back().back(); }
  /// Chord sounding at tick `t`, with the progression repeated cyclically.
  const ChordSymbol& chord_at(Tick t) const;

  friend bool operator==(const ChordProgression&, const ChordProgression&) = default;
};

/// Repeat or cut `p` so it holds exactly `bars` bars.
ChordProgression tile_progression(const ChordProgression& p, int bars);

/// MIDI pitch of pitch class `pc` inside [lo, lo + 11].
int place_in_octave(PitchClass pc, int lo);

}  // namespace filmscore
