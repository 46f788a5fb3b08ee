#pragma once

// Film-analysis ingestion and the higher-level annotations derived from it:
// main characters, smoothed emotion arcs, pacing and cue segmentation.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filmscore/errors.h"

namespace filmscore::vision {

enum class Emotion { kHappy, kAngry, kSad, kNeutral, kFear, kDisgust, kSurprise };

inline constexpr std::size_t kEmotionCount = 7;
inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::kHappy, Emotion::kAngry,   Emotion::kSad,     Emotion::kNeutral,
    Emotion::kFear,  Emotion::kDisgust, Emotion::kSurprise,
};

const char* emotion_name(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view name);

/// One probability per emotion label, summing to 1.
struct EmotionVector {
  std::array<double, kEmotionCount> p{};

  double operator[](Emotion e) const { return p[static_cast<std::size_t>(e)]; }
  double& operator[](Emotion e) { return p[static_cast<std::size_t>(e)]; }

  /// Label with the largest probability; earlier labels win exact ties.
  Emotion dominant() const;
  double sum() const;
  /// Divide by the sum; a zero vector stays zero.
  EmotionVector normalized() const;

  static EmotionVector one_hot(Emotion e);
};

struct BoundingBox {
  double x = 0, y = 0, w = 0, h = 0;
  double area() const { return w * h; }
};

struct Face {
  std::string id;
  BoundingBox bbox;
  EmotionVector emotions;
};

struct Aesthetics {
  double panning = 0.0;
  double zoom = 0.0;
  double cut_similarity = 1.0;
  double movement = 0.0;
  double colorfulness = 0.0;
};

struct FrameRecord {
  double t = 0.0;
  std::vector<Face> faces;
  Aesthetics aesthetics;
};

struct FilmAnalysis {
  double fps = 24.0;
  double duration = 0.0;
  std::vector<FrameRecord> frames;
};

/// Parse and validate an analysis document (JSON text).
/// Emotions are renormalised to sum 1 and frames sorted by time.
FilmAnalysis load_analysis(std::string_view json_text);

/// Sample point of an emotion arc; `emotions` is empty where the face is absent.
struct ArcPoint {
  double t = 0.0;
  std::optional<EmotionVector> emotions;
};

struct CharacterProfile {
  std::string id;
  int screen_frames = 0;
  double first_seen = 0.0;
  std::vector<ArcPoint> arc;
  EmotionVector aggregate;
};

struct ArcOptions {
  double window = 2.0;
  double stride = 0.5;
};

/// Windowed mean of the character's raw emotion vectors at every stride
/// point k*stride in [0, duration]. Throws UnknownCharacter.
std::vector<ArcPoint> emotion_arc(const FilmAnalysis& a, const std::string& id, ArcOptions opts = {});

/// The `n` faces with the most frames, ties broken by first appearance then id.
/// Throws NoFaces.
std::vector<CharacterProfile> identify_main_characters(const FilmAnalysis& a, int n = 3,
                                                       ArcOptions opts = {});

struct PacingWeights {
  double movement = 0.3;
  double panning = 0.2;
  double zoom = 0.2;
  double cut_change = 0.3;  // applied to 1 - cut_similarity
};

double frame_pacing(const Aesthetics& a, const PacingWeights& w = {});

struct PacingPoint {
  double t = 0.0;
  double value = 0.0;
};

/// Mean frame pacing over [t - stride/2, t + stride/2) at each stride point;
/// a point with no frame in its window takes the nearest frame's value.
std::vector<PacingPoint> pacing_curve(const FilmAnalysis& a, double stride = 0.5,
                                      const PacingWeights& w = {});

struct CharacterPresence {
  std::string id;
  /// Fraction of the segment's bbox-area presence that belongs to this character.
  double share = 0.0;
  /// Mean of the character's emotions over the segment.
  EmotionVector emotions;
};

struct SegmentAnnotation {
  double start = 0.0;
  double end = 0.0;
  std::optional<std::string> dominant_character;
  Emotion dominant_emotion = Emotion::kNeutral;
  double pacing = 0.0;
  /// Main characters on screen during the segment, most present first.
  std::vector<CharacterPresence> present;

  double length() const { return end - start; }
};

struct SegmentOptions {
  double stride = 0.5;
  double dominance_window = 2.0;
  double min_segment_len = 4.0;
  double emotion_margin = 0.15;
  PacingWeights pacing;
};

/// Cut the film into cue regions. A boundary is placed where the dominant
/// main character changes, or where that character's dominant emotion
/// changes by at least `emotion_margin`, and the new state persists for
/// `min_segment_len`. Segments tile [0, duration].
std::vector<SegmentAnnotation> segment_film(const FilmAnalysis& a,
                                            const std::vector<CharacterProfile>& profiles,
                                            const SegmentOptions& opts = {});

}  // namespace filmscore::vision
