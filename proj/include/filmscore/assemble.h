#pragma once

// Leitmotif selection, melody/harmony reconciliation, tempo fitting,
// variations, counter-melodies, reharmonisation and cue placement.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filmscore/annotate.h"
#include "filmscore/errors.h"
#include "filmscore/music.h"
#include "filmscore/rng.h"
#include "filmscore/vision.h"

namespace filmscore::assemble {

using annotate::AnnotationVector;
using annotate::Field;
using annotate::kFieldCount;
using vision::Emotion;

enum class Dynamics { kP, kMf, kF };
enum class Mode { kMajor, kMinor };
/// What a cue adds on top of the theme when no character conflict applies.
enum class Treatment { kCounterMelody, kReharmonize };

int dynamics_velocity(Dynamics d);
const char* dynamics_name(Dynamics d);
const char* articulation_name(Articulation a);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

struct EmotionRow {
  /// Target range of every annotation field. The tempo fields mirror
  /// tempo_lo and tempo_hi.
  std::array<Range, kFieldCount> targets{};
  int tempo_lo = 90;
  int tempo_hi = 110;
  Dynamics dynamics = Dynamics::kMf;
  Articulation articulation = Articulation::kNone;
  Mode mode = Mode::kMajor;
  /// Counter-melody velocities vary by up to this much around the level.
  int velocity_variation = 0;
  /// Counter-melody onset density in [0,1], mapped to pulses per bar.
  double density = 0.5;
  Treatment treatment = Treatment::kCounterMelody;

  /// +1 ascending, -1 descending, 0 none, from the contour targets.
  int contour_bias() const;
};

struct EmotionMusicMapping {
  std::array<EmotionRow, vision::kEmotionCount> rows{};
  annotate::MinorScale minor_scale = annotate::MinorScale::kNatural;

  const EmotionRow& row(Emotion e) const { return rows[static_cast<std::size_t>(e)]; }
  EmotionRow& row(Emotion e) { return rows[static_cast<std::size_t>(e)]; }
};

EmotionMusicMapping default_mapping();
/// Throws SchemaError naming the offending entry.
void validate_mapping(const EmotionMusicMapping& m);
/// Rows not named in the document keep their defaults; every field named
/// must be well formed. Throws SchemaError.
EmotionMusicMapping mapping_from_json(std::string_view text);
std::string mapping_to_json(const EmotionMusicMapping& m);

/// Scale pitch classes of a mode in C.
std::array<int, 7> mode_scale(Mode mode, annotate::MinorScale minor = annotate::MinorScale::kNatural);

/// Probability-weighted blend of the rows' range midpoints. A zero vector
/// yields the neutral row.
AnnotationVector emotion_target(const vision::EmotionVector& profile, const EmotionMusicMapping& mapping);

// ---------------------------------------------------------------------------
// Selection

struct SelectionWeights {
  std::array<double, kFieldCount> field{};
  /// Divisor applied to field differences before weighting.
  std::array<double, kFieldCount> scale{};
  double w_fit = 1.0;
  double w_contrast = 0.5;

  static SelectionWeights defaults();
};

/// Fields compared for a pool: every melody field for melody pools, the two
/// chord fields for progression pools.
std::array<bool, kFieldCount> pool_fields(annotate::PoolKind kind);

double weighted_distance(const AnnotationVector& a, const AnnotationVector& b, const SelectionWeights& w,
                         const std::array<bool, kFieldCount>& mask);

/// The k lowest-scoring candidate ids, score = w_fit d(c, target) - w_contrast
/// d(c, contrast); ties broken by id. `exclude` ids are skipped. Throws
/// PoolTooSmall when the eligible pool is smaller than k.
std::vector<std::string> select_candidates(const annotate::PoolManifest& pool, const AnnotationVector& target,
                                           std::size_t k = 3,
                                           const std::optional<AnnotationVector>& contrast_against = std::nullopt,
                                           const SelectionWeights& weights = SelectionWeights::defaults(),
                                           const std::vector<std::string>& exclude = {});

// ---------------------------------------------------------------------------
// Reconciliation

/// True for onsets on beats 1 and 3 of a 4/4 bar (generally: the bar start
/// and its midpoint).
bool is_strong_onset(Tick onset, const Meter& meter);

/// Move non-chord tones onto chord tones of the concurrent chord.
///
/// Strong-beat onsets always end on a chord tone. A weak-beat non-chord tone
/// stays only if the notes before and after it (as output) are within two
/// semitones of it. A moved note goes to the nearest chord tone in the
/// direction of the local contour when one lies within 3 semitones, else to
/// the nearest chord tone (downward on ties). Among all outputs obeying these
/// rules the one with the smallest total displacement is returned, keeping
/// notes where that is a tie.
Melody reconcile(const Melody& m, const ChordProgression& p);

/// Per-note target used by reconcile when a note has to move.
int reconcile_target(int pitch, int contour, const ChordSymbol& chord);

/// Direction used for note i: sign of the step from the previous note, or of
/// the step to the next note when that is zero or absent.
int local_contour(const std::vector<NoteEvent>& events, std::size_t i);

// ---------------------------------------------------------------------------
// Tempo and variation

struct TempoFit {
  int measures = 8;
  int tempo = 120;
};

/// Exhaustive search over measures {2,4,8} and integer tempi in the row's
/// range for the duration closest to the segment length; larger measure
/// counts win ties, then slower tempi.
TempoFit fit_tempo(double segment_length, Emotion emotion, const EmotionMusicMapping& mapping);
TempoFit fit_tempo(const vision::SegmentAnnotation& segment, Emotion emotion, const EmotionMusicMapping& mapping);

/// Seconds covered by `measures` bars of 4/4 at `tempo`.
double cue_seconds(int measures, int tempo);

/// Reduce an 8-bar theme to `measures` bars and ornament it by pacing.
///
/// A reduction keeps the first `measures` bars and ends on a chord tone held
/// to the final barline. Pacing above 0.7 splits stepwise quarter-note pairs
/// into eighths with a passing tone, with probability (pacing - 0.7) / 0.3
/// each; pacing below 0.3 merges repeated adjacent pitches. `harmony`
/// supplies the cadence chord; the C triad is used without it.
Melody make_variation(const Melody& m, int measures, Emotion emotion, double pacing, Rng& rng,
                      const EmotionMusicMapping& mapping = default_mapping(),
                      const std::optional<ChordProgression>& harmony = std::nullopt);

/// Pitch range of a counter-melody under a lead whose lowest note is given.
std::pair<int, int> counter_register(int lead_lowest);

/// One voice under `lead`: a Euclidean rhythm per bar with pulses from the
/// row's density, chord tones on strong beats, scale steps in the row's
/// contour direction elsewhere, never the pitch class of the lead note
/// sounding at the same onset. Articulation and velocity come from the row.
Melody counter_melody(const ChordProgression& p, Emotion emotion, const EmotionMusicMapping& mapping,
                      const Melody& lead, Rng& rng);

/// Move chord qualities along the substitution ladders
/// maj <-> maj7 <-> dom7 -> min7b5 -> dim7 and min <-> min7 -> min7b5 -> dim7,
/// all movable chords one rung at a time, until the mean chord consonance is
/// within 0.25 of the row's target or no chord can move further. Roots and
/// bass notes are kept; qualities off the ladders are kept.
ChordProgression reharmonize(const ChordProgression& p, Emotion emotion, const EmotionMusicMapping& mapping);
ChordProgression reharmonize_to(const ChordProgression& p, double target,
                                annotate::MinorScale minor = annotate::MinorScale::kNatural);

// ---------------------------------------------------------------------------
// Cue plan

struct LeitmotifChoice {
  std::string melody;
  std::string progression;
  friend bool operator==(const LeitmotifChoice&, const LeitmotifChoice&) = default;
};

using Assignment = std::map<std::string, LeitmotifChoice>;

struct Cue {
  vision::SegmentAnnotation segment;
  /// The segment's dominant character, if any.
  std::optional<std::string> character;
  /// Character whose theme the cue plays.
  std::string theme_character;
  std::string melody_id;
  std::string progression_id;
  Emotion emotion = Emotion::kNeutral;
  Melody melody;
  ChordProgression progression;
  int tempo = 120;
  int measures = 8;
  /// Times the theme is played back to back inside the segment.
  int repeats = 1;
  std::optional<Melody> counter_melody;
  /// Emotion the counter-melody was built from.
  std::optional<Emotion> counter_emotion;
  bool reharmonized = false;
  bool variation = false;
  Dynamics dynamics = Dynamics::kMf;
  Articulation articulation = Articulation::kNone;

  double bar_seconds() const { return cue_seconds(1, tempo); }
  double music_seconds() const { return repeats * cue_seconds(measures, tempo); }
};

struct CuePlan {
  std::vector<Cue> cues;
  Meter meter;
};

struct Pools {
  const annotate::PoolManifest* melodies = nullptr;
  const annotate::PoolManifest* progressions = nullptr;
};

/// Dominant labels differ and both are at least 0.4.
bool emotions_conflict(const vision::EmotionVector& a, const vision::EmotionVector& b);

/// Place one cue per segment. `main_characters` is ranked; the first is the
/// main character whose theme covers characterless segments. Throws
/// MissingAssignment when a main character has no choice and SchemaError when
/// an assignment names an id missing from the pools.
CuePlan build_cue_plan(const std::vector<vision::SegmentAnnotation>& segments,
                       const std::vector<std::string>& main_characters, const Assignment& assignment,
                       const Pools& pools, const EmotionMusicMapping& mapping, const Rng& rng);

}  // namespace filmscore::assemble
