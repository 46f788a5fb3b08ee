#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "filmscore/assemble.h"
#include "filmscore/generate.h"

namespace filmscore::assemble {

namespace {

constexpr int kCounterTop = 71;
constexpr int kStepsPerBar = 8;
constexpr double kConsonanceTolerance = 0.25;

const NoteEvent* sounding_at(const Melody& lead, Tick t) {
  for (const NoteEvent& e : lead.events) {
    if (e.onset <= t && t < e.end()) return &e;
    if (e.onset > t) break;
  }
  return nullptr;
}

int pick(const std::vector<int>& allowed, std::optional<int> prev, int bias, int lo, int hi) {
  if (!prev) {
    if (bias < 0) return allowed.back();
    if (bias > 0) return allowed.front();
    const int middle = (lo + hi) / 2;
    return *std::min_element(allowed.begin(), allowed.end(),
                             [middle](int a, int b) { return std::abs(a - middle) < std::abs(b - middle); });
  }
  if (bias != 0) {
    std::optional<int> best;
    for (int c : allowed) {
      if ((c - *prev) * bias > 0 && (!best || std::abs(c - *prev) < std::abs(*best - *prev))) best = c;
    }
    if (best) return *best;
    // Register exhausted in the bias direction: restart from the far end.
    return bias < 0 ? allowed.back() : allowed.front();
  }
  int best = allowed.front();
  for (int c : allowed) {
    const int d = std::abs(c - *prev);
    const int bd = std::abs(best - *prev);
    if (d != 0 && (bd == 0 || d < bd)) best = c;
  }
  return best;
}

std::optional<ChordQuality> ladder_step(ChordQuality q, bool forward) {
  using Q = ChordQuality;
  if (forward) {
    switch (q) {
      case Q::kMaj:
        return Q::kMaj7;
      case Q::kMaj7:
        return Q::kDom7;
      case Q::kDom7:
      case Q::kMin7:
        return Q::kMin7b5;
      case Q::kMin7b5:
        return Q::kDim7;
      case Q::kMin:
        return Q::kMin7;
      default:
        return std::nullopt;
    }
  }
  switch (q) {
    case Q::kMaj7:
      return Q::kMaj;
    case Q::kDom7:
      return Q::kMaj7;
    case Q::kMin7:
      return Q::kMin;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::pair<int, int> counter_register(int lead_lowest) {
  const int hi = std::min(kCounterTop, lead_lowest - 1);
  return {hi - 11, hi};
}

Melody counter_melody(const ChordProgression& p, Emotion emotion, const EmotionMusicMapping& mapping,
                      const Melody& lead, Rng& rng) {
  const EmotionRow& row = mapping.row(emotion);
  Melody out;
  out.meter = lead.meter;
  out.length_bars = lead.length_bars;
  out.key_tonic = PitchClass(0);
  if (p.bars.empty() || lead.length_bars <= 0) return out;

  int lowest = 128;
  for (const NoteEvent& e : lead.events) lowest = std::min(lowest, e.pitch);
  if (lowest == 128) lowest = kCounterTop + 1;
  const auto [lo, hi] = counter_register(lowest);
  if (lo < 0) return out;

  const auto scale = mode_scale(row.mode, mapping.minor_scale);
  const int bias = row.contour_bias();
  const auto rhythm = generate::euclidean_rhythm(generate::movement_to_pulses(row.density, kStepsPerBar), kStepsPerBar);
  const Tick bar = lead.meter.bar_ticks();
  const Tick step = bar / kStepsPerBar;
  const Tick total = lead.length_ticks();
  const int base = dynamics_velocity(row.dynamics);

  std::vector<Tick> onsets;
  for (int b = 0; b < lead.length_bars; ++b) {
    for (int s = 0; s < kStepsPerBar; ++s) {
      if (rhythm.pattern[static_cast<std::size_t>(s)]) onsets.push_back(b * bar + s * step);
    }
  }

  std::optional<int> prev;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    const Tick t = onsets[i];
    const bool strong = is_strong_onset(t, lead.meter);
    const ChordSymbol& chord = p.chord_at(t);
    const NoteEvent* above = sounding_at(lead, t);
    std::vector<int> allowed;
    for (int pitch = lo; pitch <= hi; ++pitch) {
      const PitchClass pc = pitch_class_of(pitch);
      if (above && pitch_class_of(above->pitch) == pc) continue;
      const bool ok = strong ? chord.contains(pc)
                             : std::find(scale.begin(), scale.end(), pc.value()) != scale.end();
      if (ok) allowed.push_back(pitch);
    }
    if (allowed.empty()) continue;

    NoteEvent e;
    e.onset = t;
    e.duration = (i + 1 < onsets.size() ? onsets[i + 1] : total) - t;
    e.pitch = pick(allowed, prev, bias, lo, hi);
    e.articulation = row.articulation;
    const int spread = row.velocity_variation;
    e.velocity = std::clamp(base + static_cast<int>(rng.uniform_int(-spread, spread)), 1, 127);
    out.events.push_back(e);
    prev = e.pitch;
  }
  return out;
}

ChordProgression reharmonize_to(const ChordProgression& p, double target, annotate::MinorScale minor) {
  ChordProgression cur = p;
  if (p.bars.empty()) return cur;
  double mean = annotate::annotate_progression(cur, minor).chord_consonance;
  if (std::abs(mean - target) <= kConsonanceTolerance) return cur;
  const bool forward = target > mean;
  for (;;) {
    bool moved = false;
    for (BarChords& bar : cur.bars) {
      for (ChordSymbol& c : bar) {
        if (const auto next = ladder_step(c.quality, forward)) {
          c.quality = *next;
          moved = true;
        }
      }
    }
    if (!moved) break;
    mean = annotate::annotate_progression(cur, minor).chord_consonance;
    if (std::abs(mean - target) <= kConsonanceTolerance) break;
  }
  return cur;
}

ChordProgression reharmonize(const ChordProgression& p, Emotion emotion, const EmotionMusicMapping& mapping) {
  const double target = mapping.row(emotion).targets[static_cast<std::size_t>(Field::kChordConsonance)].mid();
  return reharmonize_to(p, target, mapping.minor_scale);
}

}  // namespace filmscore::assemble
