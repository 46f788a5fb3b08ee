#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "filmscore/vision.h"

namespace filmscore::vision {

namespace {

constexpr double kEps = 1e-9;

struct PointState {
  double t = 0.0;
  std::vector<double> presence;                  // per main character, bbox-area sum
  std::vector<std::optional<EmotionVector>> mood;  // per main character, windowed mean
  std::optional<EmotionVector> scene;            // all faces pooled
  int dominant = -1;                             // main-character index or -1
};

std::vector<PointState> sample_states(const FilmAnalysis& a, const std::vector<CharacterProfile>& mains,
                                      const SegmentOptions& opts) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < mains.size(); ++i) index.emplace(mains[i].id, i);

  std::vector<PointState> states;
  const auto count = static_cast<long>(std::floor(a.duration / opts.stride + kEps));
  for (long k = 0; k <= count; ++k) {
    PointState s;
    s.t = static_cast<double>(k) * opts.stride;
    s.presence.assign(mains.size(), 0.0);
    std::vector<EmotionVector> sums(mains.size());
    std::vector<int> counts(mains.size(), 0);
    EmotionVector scene_sum;
    int scene_count = 0;

    const double lo = s.t - opts.dominance_window / 2 - kEps;
    const double hi = s.t + opts.dominance_window / 2 + kEps;
    auto it = std::lower_bound(a.frames.begin(), a.frames.end(), lo,
                               [](const FrameRecord& f, double t) { return f.t < t; });
    for (; it != a.frames.end() && it->t <= hi; ++it) {
      for (const Face& face : it->faces) {
        for (std::size_t e = 0; e < kEmotionCount; ++e) scene_sum.p[e] += face.emotions.p[e];
        ++scene_count;
        const auto found = index.find(face.id);
        if (found == index.end()) continue;
        const std::size_t c = found->second;
        s.presence[c] += face.bbox.area();
        for (std::size_t e = 0; e < kEmotionCount; ++e) sums[c].p[e] += face.emotions.p[e];
        ++counts[c];
      }
    }
    s.mood.resize(mains.size());
    for (std::size_t c = 0; c < mains.size(); ++c) {
      if (counts[c] > 0) s.mood[c] = sums[c].normalized();
    }
    if (scene_count > 0) s.scene = scene_sum.normalized();

    double best = 0.0;
    for (std::size_t c = 0; c < mains.size(); ++c) {
      // A face with a zero-area box still counts as present.
      const double weight = counts[c] > 0 ? std::max(s.presence[c], 1e-12) : 0.0;
      if (weight > best + kEps) {
        best = weight;
        s.dominant = static_cast<int>(c);
      }
    }
    states.push_back(std::move(s));
  }
  return states;
}

struct Mood {
  int character = -1;
  Emotion label = Emotion::kNeutral;
};

Mood mood_at(const PointState& s) {
  Mood m;
  m.character = s.dominant;
  if (s.dominant >= 0) m.label = s.mood[static_cast<std::size_t>(s.dominant)]->dominant();
  return m;
}

// Whether point `s` departs from the current mood, and if so to what.
std::optional<Mood> departure(const PointState& s, const Mood& current, double margin) {
  if (s.dominant != current.character) return mood_at(s);
  if (current.character < 0) return std::nullopt;
  const EmotionVector& v = *s.mood[static_cast<std::size_t>(current.character)];
  const Emotion top = v.dominant();
  if (top != current.label && v[top] - v[current.label] >= margin - kEps) {
    return Mood{current.character, top};
  }
  return std::nullopt;
}

bool holds(const PointState& s, const Mood& from, const Mood& to, double margin) {
  if (s.dominant != to.character) return false;
  if (from.character != to.character) return true;
  const EmotionVector& v = *s.mood[static_cast<std::size_t>(to.character)];
  return v[to.label] - v[from.label] >= margin - kEps;
}

template <typename Key>
Key mode_of(const std::vector<Key>& keys, const std::vector<Key>& priority) {
  std::map<Key, int> counts;
  for (const Key& k : keys) ++counts[k];
  Key best = priority.front();
  int best_count = -1;
  for (const Key& k : priority) {
    const auto it = counts.find(k);
    const int c = it == counts.end() ? 0 : it->second;
    if (c > best_count) {
      best_count = c;
      best = k;
    }
  }
  return best;
}

SegmentAnnotation label_segment(const FilmAnalysis& a, double start, double end, bool closed,
                                const std::vector<PointState>& states, std::size_t first, std::size_t last,
                                const std::vector<CharacterProfile>& mains,
                                const std::vector<PacingPoint>& pacing) {
  SegmentAnnotation seg;
  seg.start = start;
  seg.end = end;

  std::vector<int> dominants;
  std::vector<int> priority;
  for (std::size_t c = 0; c < mains.size(); ++c) priority.push_back(static_cast<int>(c));
  priority.push_back(-1);
  double pacing_sum = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    dominants.push_back(states[k].dominant);
    pacing_sum += pacing[k].value;
  }

  // Who is on screen comes from the raw frames inside the segment; the
  // windowed states would leak faces from across the boundary.
  std::vector<double> presence(mains.size(), 0.0);
  std::vector<EmotionVector> mood_sum(mains.size());
  std::vector<int> mood_n(mains.size(), 0);
  for (const FrameRecord& f : a.frames) {
    if (f.t < start - kEps) continue;
    if (closed ? f.t > end + kEps : f.t >= end - kEps) break;
    for (const Face& face : f.faces) {
      for (std::size_t c = 0; c < mains.size(); ++c) {
        if (mains[c].id != face.id) continue;
        presence[c] += std::max(face.bbox.area(), 1e-12);
        for (std::size_t e = 0; e < kEmotionCount; ++e) mood_sum[c].p[e] += face.emotions.p[e];
        ++mood_n[c];
      }
    }
  }
  seg.pacing = last > first ? pacing_sum / static_cast<double>(last - first) : 0.0;

  const int dom = mains.empty() ? -1 : mode_of(dominants, priority);
  std::vector<Emotion> emotion_priority(kAllEmotions.begin(), kAllEmotions.end());
  std::vector<Emotion> labels;
  if (dom >= 0) {
    seg.dominant_character = mains[static_cast<std::size_t>(dom)].id;
    for (std::size_t k = first; k < last; ++k) {
      const auto& v = states[k].mood[static_cast<std::size_t>(dom)];
      if (v) labels.push_back(v->dominant());
    }
  } else {
    for (std::size_t k = first; k < last; ++k) {
      if (states[k].scene) labels.push_back(states[k].scene->dominant());
    }
  }
  seg.dominant_emotion = labels.empty() ? Emotion::kNeutral : mode_of(labels, emotion_priority);

  double total = 0.0;
  for (double p : presence) total += p;
  for (std::size_t c = 0; c < mains.size(); ++c) {
    if (mood_n[c] == 0) continue;
    CharacterPresence cp;
    cp.id = mains[c].id;
    cp.share = total > 0.0 ? presence[c] / total : 0.0;
    cp.emotions = mood_sum[c].normalized();
    seg.present.push_back(std::move(cp));
  }
  std::stable_sort(seg.present.begin(), seg.present.end(),
                   [](const CharacterPresence& x, const CharacterPresence& y) { return x.share > y.share; });
  return seg;
}

}  // namespace

std::vector<SegmentAnnotation> segment_film(const FilmAnalysis& a,
                                            const std::vector<CharacterProfile>& profiles,
                                            const SegmentOptions& opts) {
  if (!(opts.stride > 0.0) || !(opts.dominance_window > 0.0) || opts.min_segment_len < 0.0) {
    throw std::invalid_argument("segment options must be positive");
  }
  const std::vector<PointState> states = sample_states(a, profiles, opts);
  const std::vector<PacingPoint> pacing = pacing_curve(a, opts.stride, opts.pacing);
  const auto persist = static_cast<std::size_t>(std::max(1.0, std::ceil(opts.min_segment_len / opts.stride - kEps)));

  struct Cut {
    std::size_t index;
    double t;
  };
  std::vector<Cut> cuts;
  Mood current = mood_at(states.front());
  double seg_start = 0.0;

  for (std::size_t k = 1; k < states.size(); ++k) {
    const auto next = departure(states[k], current, opts.emotion_margin);
    if (!next) continue;
    if (k + persist > states.size()) continue;
    bool persisted = true;
    for (std::size_t j = k; j < k + persist && persisted; ++j) {
      persisted = holds(states[j], current, *next, opts.emotion_margin);
    }
    if (!persisted) continue;
    const double t = states[k].t;
    if (t - seg_start >= opts.min_segment_len - kEps && a.duration - t >= opts.min_segment_len - kEps) {
      cuts.push_back({k, t});
      seg_start = t;
    }
    current = *next;
  }

  std::vector<SegmentAnnotation> segments;
  std::size_t first = 0;
  double start = 0.0;
  for (const Cut& cut : cuts) {
    segments.push_back(label_segment(a, start, cut.t, false, states, first, cut.index, profiles, pacing));
    first = cut.index;
    start = cut.t;
  }
  segments.push_back(label_segment(a, start, a.duration, true, states, first, states.size(), profiles, pacing));
  return segments;
}

}  // namespace filmscore::vision
