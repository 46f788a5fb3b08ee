#pragma once

// Feature annotation of chords, progressions and melodies, and the on-disk
// pool manifest that carries candidates with their annotations.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filmscore/errors.h"
#include "filmscore/music.h"

namespace filmscore::annotate {

enum class Field {
  kHarmonyConsonance,
  kHarmonyComplexity,
  kPitchVariation,
  kIntervalSize,
  kIntervalDirection,
  kIntervalConsonance,
  kRhythmRegularity,
  kRhythmVariation,
  kTempoMin,
  kTempoMax,
  kContourAscending,
  kContourDescending,
  kContourVariation,
  kChordConsonance,
  kChordVariation,
};

inline constexpr std::size_t kFieldCount = 15;

const char* field_name(Field f);
std::optional<Field> parse_field(std::string_view name);

/// Feature values of one candidate. Melodies fill every field except the two
/// chord fields; progressions fill only the chord fields.
struct AnnotationVector {
  std::array<double, kFieldCount> v{};

  double operator[](Field f) const { return v[static_cast<std::size_t>(f)]; }
  double& operator[](Field f) { return v[static_cast<std::size_t>(f)]; }
  friend bool operator==(const AnnotationVector&, const AnnotationVector&) = default;
};

/// Lower and upper bound of every field.
std::pair<double, double> field_bounds(Field f);

enum class MinorScale { kNatural, kHarmonic };

/// Pitch classes of C major and of C minor in the given form.
std::array<int, 7> c_major_scale();
std::array<int, 7> c_minor_scale(MinorScale form = MinorScale::kNatural);

/// Step score of a count of out-of-scale tones: 0 -> 0, 1 -> 0.5, 2+ -> 1.
double consonance_step(int outside);

/// Dissonance of a chord against C major / C minor: the step score of the
/// smaller out-of-scale tone count. The slash bass is not a chord tone.
double chord_consonance(const ChordSymbol& c, MinorScale minor = MinorScale::kNatural);

struct ProgressionAnnotation {
  double chord_consonance = 0.0;
  double chord_variation = 0.0;
};

/// Mean chord score, and (distinct chords - 1) / (chords - 1), 0 for one chord.
ProgressionAnnotation annotate_progression(const ChordProgression& p, MinorScale minor = MinorScale::kNatural);
AnnotationVector progression_vector(const ChordProgression& p, MinorScale minor = MinorScale::kNatural);

/// Every melody field. Throws TooShort for fewer than 2 events.
AnnotationVector annotate_melody(const Melody& m, MinorScale minor = MinorScale::kNatural);

// ---------------------------------------------------------------------------
// Pool manifests

enum class PoolKind { kMelody, kProgression };

struct Candidate {
  std::string id;
  std::uint64_t seed = 0;
  /// ABC text for melodies, a chord-sheet line for progressions.
  std::string notation;
  AnnotationVector annotation;
  std::optional<Melody> melody;
  std::optional<ChordProgression> progression;
};

struct PoolManifest {
  PoolKind kind = PoolKind::kMelody;
  std::uint64_t seed = 0;
  std::vector<Candidate> candidates;

  /// Candidate with the given id, or nullptr.
  const Candidate* find(std::string_view id) const;
};

/// Ids are "m0001".. for melodies and "c0001".. for progressions.
std::string candidate_id(PoolKind kind, std::size_t index);

PoolManifest melody_manifest(const std::vector<Melody>& pool, std::uint64_t seed,
                             MinorScale minor = MinorScale::kNatural);
PoolManifest progression_manifest(const std::vector<ChordProgression>& pool, std::uint64_t seed,
                                  MinorScale minor = MinorScale::kNatural);

std::string manifest_to_json(const PoolManifest& m);
/// Throws SchemaError.
PoolManifest manifest_from_json(std::string_view text);

}  // namespace filmscore::annotate
