#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "filmscore/assemble.h"

namespace filmscore::assemble {

namespace {

constexpr std::array<int, 3> kMeasureChoices = {8, 4, 2};
constexpr double kOrnamentAbove = 0.7;
constexpr double kMergeBelow = 0.3;

bool in_scale(int pitch, const std::array<int, 7>& scale) {
  const int pc = pitch_class_of(pitch).value();
  return std::find(scale.begin(), scale.end(), pc) != scale.end();
}

int scale_neighbour(int pitch, int dir, const std::array<int, 7>& scale) {
  int p = pitch + dir;
  while (!in_scale(p, scale)) p += dir;
  return p;
}

int nearest_chord_tone(int pitch, const ChordSymbol& chord) {
  // Downward wins ties.
  for (int d = 0; d < 12; ++d) {
    if (chord.contains(pitch_class_of(pitch - d))) return pitch - d;
    if (chord.contains(pitch_class_of(pitch + d))) return pitch + d;
  }
  return pitch;
}

}  // namespace

double cue_seconds(int measures, int tempo) { return measures * 4 * 60.0 / tempo; }

TempoFit fit_tempo(double segment_length, Emotion emotion, const EmotionMusicMapping& mapping) {
  const EmotionRow& row = mapping.row(emotion);
  TempoFit best{kMeasureChoices.front(), row.tempo_lo};
  double best_err = std::abs(cue_seconds(best.measures, best.tempo) - segment_length);
  for (int c : kMeasureChoices) {
    for (int t = row.tempo_lo; t <= row.tempo_hi; ++t) {
      const double err = std::abs(cue_seconds(c, t) - segment_length);
      if (err < best_err) {
        best_err = err;
        best = {c, t};
      }
    }
  }
  return best;
}

TempoFit fit_tempo(const vision::SegmentAnnotation& segment, Emotion emotion, const EmotionMusicMapping& mapping) {
  return fit_tempo(segment.length(), emotion, mapping);
}

Melody make_variation(const Melody& m, int measures, Emotion emotion, double pacing, Rng& rng,
                      const EmotionMusicMapping& mapping, const std::optional<ChordProgression>& harmony) {
  Melody out = m;
  const Tick bar = m.meter.bar_ticks();
  const Tick end = measures * bar;
  out.length_bars = measures;

  if (measures < m.length_bars) {
    std::vector<NoteEvent> kept;
    for (const NoteEvent& e : m.events) {
      if (e.onset >= end) break;
      NoteEvent c = e;
      c.duration = std::min(c.duration, end - c.onset);
      kept.push_back(c);
    }
    // Cadence: the last note starting by the final half bar, held to the end.
    const Tick last_half = end - bar / 2;
    while (kept.size() > 1 && kept.back().onset > last_half) kept.pop_back();
    if (!kept.empty()) {
      NoteEvent& fin = kept.back();
      const ChordSymbol tonic{PitchClass(0), ChordQuality::kMaj, std::nullopt};
      const ChordSymbol& chord = harmony && !harmony->bars.empty() ? harmony->chord_at(fin.onset) : tonic;
      fin.pitch = std::clamp(nearest_chord_tone(fin.pitch, chord), 0, 127);
      fin.duration = end - fin.onset;
    }
    out.events = std::move(kept);
  }

  const auto scale = mode_scale(mapping.row(emotion).mode, mapping.minor_scale);
  if (pacing > kOrnamentAbove) {
    const double p = std::min(1.0, (pacing - kOrnamentAbove) / (1.0 - kOrnamentAbove));
    std::vector<NoteEvent> ornamented;
    for (std::size_t i = 0; i < out.events.size(); ++i) {
      const NoteEvent& e = out.events[i];
      const bool pair = i + 1 < out.events.size() && e.duration == kTicksPerQuarter &&
                        out.events[i + 1].onset == e.end() && out.events[i + 1].duration == kTicksPerQuarter;
      const int step = pair ? out.events[i + 1].pitch - e.pitch : 0;
      if (step != 0 && std::abs(step) <= 2 && rng.chance(p)) {
        NoteEvent a = e;
        a.duration = kTicksPerQuarter / 2;
        NoteEvent b = a;
        b.onset = a.end();
        const int dir = step > 0 ? 1 : -1;
        if (std::abs(step) == 2) {
          b.pitch = e.pitch + dir;
        } else {
          b.pitch = scale_neighbour(e.pitch, 1, scale);
          if (b.pitch == out.events[i + 1].pitch) b.pitch = scale_neighbour(e.pitch, -1, scale);
        }
        b.pitch = std::clamp(b.pitch, 0, 127);
        ornamented.push_back(a);
        ornamented.push_back(b);
      } else {
        ornamented.push_back(e);
      }
    }
    out.events = std::move(ornamented);
  } else if (pacing < kMergeBelow) {
    std::vector<NoteEvent> merged;
    for (const NoteEvent& e : out.events) {
      if (!merged.empty() && merged.back().pitch == e.pitch && merged.back().end() == e.onset) {
        merged.back().duration += e.duration;
      } else {
        merged.push_back(e);
      }
    }
    out.events = std::move(merged);
  }
  return out;
}

}  // namespace filmscore::assemble
