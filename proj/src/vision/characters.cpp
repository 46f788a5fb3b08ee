#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "filmscore/vision.h"

namespace filmscore::vision {

namespace {

std::vector<double> stride_points(double duration, double stride) {
  std::vector<double> ts;
  const auto count = static_cast<long>(std::floor(duration / stride + 1e-9));
  for (long k = 0; k <= count; ++k) ts.push_back(static_cast<double>(k) * stride);
  return ts;
}

// Index range of frames with t in [lo, hi].
std::pair<std::size_t, std::size_t> frames_between(const FilmAnalysis& a, double lo, double hi) {
  const auto first = std::lower_bound(a.frames.begin(), a.frames.end(), lo - 1e-9,
                                      [](const FrameRecord& f, double t) { return f.t < t; });
  const auto last = std::upper_bound(a.frames.begin(), a.frames.end(), hi + 1e-9,
                                     [](double t, const FrameRecord& f) { return t < f.t; });
  return {static_cast<std::size_t>(first - a.frames.begin()),
          static_cast<std::size_t>(last - a.frames.begin())};
}

}  // namespace

std::vector<ArcPoint> emotion_arc(const FilmAnalysis& a, const std::string& id, ArcOptions opts) {
  if (!(opts.window > 0.0) || !(opts.stride > 0.0)) throw std::invalid_argument("window and stride must be positive");
  bool seen = false;
  for (const auto& f : a.frames) {
    for (const auto& face : f.faces) seen = seen || face.id == id;
  }
  if (!seen) throw UnknownCharacter(id);

  std::vector<ArcPoint> arc;
  for (double t : stride_points(a.duration, opts.stride)) {
    const auto [lo, hi] = frames_between(a, t - opts.window / 2, t + opts.window / 2);
    EmotionVector acc;
    int n = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (const Face& face : a.frames[i].faces) {
        if (face.id != id) continue;
        for (std::size_t k = 0; k < kEmotionCount; ++k) acc.p[k] += face.emotions.p[k];
        ++n;
      }
    }
    ArcPoint point{t, std::nullopt};
    if (n > 0) point.emotions = acc.normalized();
    arc.push_back(point);
  }
  return arc;
}

std::vector<CharacterProfile> identify_main_characters(const FilmAnalysis& a, int n, ArcOptions opts) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  struct Tally {
    int frames = 0;
    double first_seen = 0.0;
    EmotionVector sum;
    int samples = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const FrameRecord& f : a.frames) {
    std::vector<std::string> counted;
    for (const Face& face : f.faces) {
      auto [it, inserted] = tallies.try_emplace(face.id);
      Tally& tally = it->second;
      if (inserted) tally.first_seen = f.t;
      if (std::find(counted.begin(), counted.end(), face.id) == counted.end()) {
        ++tally.frames;
        counted.push_back(face.id);
      }
      for (std::size_t k = 0; k < kEmotionCount; ++k) tally.sum.p[k] += face.emotions.p[k];
      ++tally.samples;
    }
  }
  if (tallies.empty()) throw NoFaces();

  std::vector<CharacterProfile> ranked;
  for (const auto& [id, tally] : tallies) {
    CharacterProfile p;
    p.id = id;
    p.screen_frames = tally.frames;
    p.first_seen = tally.first_seen;
    p.aggregate = tally.sum.normalized();
    ranked.push_back(std::move(p));
  }
  std::sort(ranked.begin(), ranked.end(), [](const CharacterProfile& x, const CharacterProfile& y) {
    if (x.screen_frames != y.screen_frames) return x.screen_frames > y.screen_frames;
    if (x.first_seen != y.first_seen) return x.first_seen < y.first_seen;
    return x.id < y.id;
  });
  if (ranked.size() > static_cast<std::size_t>(n)) ranked.resize(static_cast<std::size_t>(n));
  for (auto& p : ranked) p.arc = emotion_arc(a, p.id, opts);
  return ranked;
}

double frame_pacing(const Aesthetics& a, const PacingWeights& w) {
  const double raw = w.movement * a.movement + w.panning * a.panning + w.zoom * a.zoom +
                     w.cut_change * (1.0 - a.cut_similarity);
  return std::clamp(raw, 0.0, 1.0);
}

std::vector<PacingPoint> pacing_curve(const FilmAnalysis& a, double stride, const PacingWeights& w) {
  if (!(stride > 0.0)) throw std::invalid_argument("stride must be positive");
  if (a.frames.empty()) throw EmptyAnalysis();
  std::vector<PacingPoint> out;
  for (double t : stride_points(a.duration, stride)) {
    const double lo = t - stride / 2;
    const double hi = t + stride / 2;
    double sum = 0.0;
    int n = 0;
    for (auto [i, end] = frames_between(a, lo, hi); i < end; ++i) {
      if (a.frames[i].t >= hi) continue;  // half-open window
      sum += frame_pacing(a.frames[i].aesthetics, w);
      ++n;
    }
    double value = 0.0;
    if (n > 0) {
      value = sum / n;
    } else {
      const auto next = std::lower_bound(a.frames.begin(), a.frames.end(), t,
                                         [](const FrameRecord& f, double x) { return f.t < x; });
      const FrameRecord* nearest = nullptr;
      if (next == a.frames.end()) {
        nearest = &a.frames.back();
      } else if (next == a.frames.begin()) {
        nearest = &*next;
      } else {
        const auto prev = std::prev(next);
        nearest = (t - prev->t) <= (next->t - t) ? &*prev : &*next;
      }
      value = frame_pacing(nearest->aesthetics, w);
    }
    out.push_back({t, value});
  }
  return out;
}

}  // namespace filmscore::vision
