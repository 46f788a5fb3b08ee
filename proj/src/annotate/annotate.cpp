#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "filmscore/annotate.h"

namespace filmscore::annotate {

namespace {

constexpr std::array<const char*, kFieldCount> kFieldNames = {
    "harmony_consonance", "harmony_complexity", "pitch_variation",   "interval_size",
    "interval_direction", "interval_consonance", "rhythm_regularity", "rhythm_variation",
    "tempo_min",          "tempo_max",          "contour_ascending", "contour_descending",
    "contour_variation",  "chord_consonance",   "chord_variation",
};

constexpr double kTempoFloor = 40.0;
constexpr double kTempoCeil = 200.0;
// Note-rate window (notes per second) that bounds the playable tempo range.
constexpr double kMinRate = 1.0;
constexpr double kMaxRate = 6.0;

int sign(int x) { return (x > 0) - (x < 0); }

double entropy_bits(const std::map<long, int>& histogram, int total) {
  double h = 0.0;
  for (const auto& [_, n] : histogram) {
    const double p = static_cast<double>(n) / total;
    h -= p * std::log2(p);
  }
  return h;
}

int outside(const std::vector<int>& tones, const std::array<int, 7>& scale) {
  int n = 0;
  for (int t : tones) {
    if (std::find(scale.begin(), scale.end(), t) == scale.end()) ++n;
  }
  return n;
}

double scale_score(const std::vector<int>& tones, MinorScale minor) {
  return consonance_step(std::min(outside(tones, c_major_scale()), outside(tones, c_minor_scale(minor))));
}

}  // namespace

const char* field_name(Field f) { return kFieldNames[static_cast<std::size_t>(f)]; }

std::optional<Field> parse_field(std::string_view name) {
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    if (name == kFieldNames[i]) return static_cast<Field>(i);
  }
  return std::nullopt;
}

std::pair<double, double> field_bounds(Field f) {
  switch (f) {
    case Field::kIntervalDirection:
      return {-1.0, 1.0};
    case Field::kTempoMin:
    case Field::kTempoMax:
      return {kTempoFloor, kTempoCeil};
    default:
      return {0.0, 1.0};
  }
}

std::array<int, 7> c_major_scale() { return {0, 2, 4, 5, 7, 9, 11}; }

std::array<int, 7> c_minor_scale(MinorScale form) {
  if (form == MinorScale::kHarmonic) return {0, 2, 3, 5, 7, 8, 11};
  return {0, 2, 3, 5, 7, 8, 10};
}

double consonance_step(int outside) {
  if (outside <= 0) return 0.0;
  if (outside == 1) return 0.5;
  return 1.0;
}

double chord_consonance(const ChordSymbol& c, MinorScale minor) { return scale_score(c.tone_classes(), minor); }

ProgressionAnnotation annotate_progression(const ChordProgression& p, MinorScale minor) {
  ProgressionAnnotation out;
  std::vector<ChordSymbol> distinct;
  double sum = 0.0;
  std::size_t total = 0;
  for (const BarChords& bar : p.bars) {
    for (const ChordSymbol& c : bar) {
      sum += chord_consonance(c, minor);
      ++total;
      if (std::find(distinct.begin(), distinct.end(), c) == distinct.end()) distinct.push_back(c);
    }
  }
  if (total == 0) return out;
  out.chord_consonance = sum / static_cast<double>(total);
  out.chord_variation =
      total == 1 ? 0.0 : static_cast<double>(distinct.size() - 1) / static_cast<double>(total - 1);
  return out;
}

AnnotationVector progression_vector(const ChordProgression& p, MinorScale minor) {
  const ProgressionAnnotation a = annotate_progression(p, minor);
  AnnotationVector v;
  v[Field::kChordConsonance] = a.chord_consonance;
  v[Field::kChordVariation] = a.chord_variation;
  return v;
}

AnnotationVector annotate_melody(const Melody& m, MinorScale minor) {
  const auto& ev = m.events;
  if (ev.size() < 2) throw TooShort(ev.size());
  const int n = static_cast<int>(ev.size());
  AnnotationVector v;

  double harmony = 0.0;
  std::map<long, int> pcs;
  std::map<long, int> durations;
  double mean_pitch = 0.0;
  double mean_duration = 0.0;
  for (const NoteEvent& e : ev) {
    harmony += scale_score({pitch_class_of(e.pitch).value()}, minor);
    ++pcs[pitch_class_of(e.pitch).value()];
    ++durations[static_cast<long>(e.duration)];
    mean_pitch += e.pitch;
    mean_duration += static_cast<double>(e.duration);
  }
  mean_pitch /= n;
  mean_duration /= n;
  v[Field::kHarmonyConsonance] = harmony / n;
  v[Field::kHarmonyComplexity] = std::clamp(entropy_bits(pcs, n) / std::log2(12.0), 0.0, 1.0);

  double var = 0.0;
  for (const NoteEvent& e : ev) var += (e.pitch - mean_pitch) * (e.pitch - mean_pitch);
  v[Field::kPitchVariation] = std::clamp(std::sqrt(var / n) / 12.0, 0.0, 1.0);

  const int intervals = n - 1;
  double size = 0.0;
  double direction = 0.0;
  int consonant = 0;
  int up = 0;
  int down = 0;
  int changes = 0;
  int last_dir = 0;
  for (int i = 1; i < n; ++i) {
    const int step = ev[i].pitch - ev[i - 1].pitch;
    const int mag = std::abs(step);
    size += mag;
    direction += sign(step);
    const int ic = mag > 12 ? mag % 12 : mag;
    if (ic == 0 || ic == 3 || ic == 4 || ic == 5 || ic == 7 || ic == 8 || ic == 9 || ic == 12) ++consonant;
    if (step > 0) ++up;
    if (step < 0) ++down;
    if (step != 0) {
      if (last_dir != 0 && sign(step) != last_dir) ++changes;
      last_dir = sign(step);
    }
  }
  v[Field::kIntervalSize] = std::clamp(size / intervals / 12.0, 0.0, 1.0);
  v[Field::kIntervalDirection] = direction / intervals;
  v[Field::kIntervalConsonance] = static_cast<double>(consonant) / intervals;

  v[Field::kRhythmRegularity] = std::clamp(1.0 - entropy_bits(durations, n) / std::log2(static_cast<double>(n)), 0.0, 1.0);
  v[Field::kRhythmVariation] = static_cast<double>(durations.size() - 1) / intervals;

  // Tempo range keeping the note rate inside [kMinRate, kMaxRate] per second.
  const double beats = mean_duration / static_cast<double>(kTicksPerQuarter);
  v[Field::kTempoMin] = std::clamp(60.0 * kMinRate * beats, kTempoFloor, kTempoCeil);
  v[Field::kTempoMax] = std::clamp(60.0 * kMaxRate * beats, kTempoFloor, kTempoCeil);

  const int moving = up + down;
  if (moving > 0) {
    v[Field::kContourAscending] = static_cast<double>(up) / moving;
    v[Field::kContourDescending] = static_cast<double>(down) / moving;
  }
  v[Field::kContourVariation] = moving > 1 ? static_cast<double>(changes) / (moving - 1) : 0.0;
  return v;
}

}  // namespace filmscore::annotate
