#include <algorithm>
#include <cstdlib>
#include <limits>

#include "filmscore/assemble.h"

namespace filmscore::assemble {

namespace {

constexpr int kMaxContourShift = 3;
constexpr int kStep = 2;

int sign(int x) { return (x > 0) - (x < 0); }

struct Option {
  int pitch;
  // A kept non-chord tone, which needs stepwise neighbours.
  bool passing;
};

bool step_ok(int neighbour, int pitch) { return std::abs(neighbour - pitch) <= kStep; }

}  // namespace

bool is_strong_onset(Tick onset, const Meter& meter) {
  const Tick bar = meter.bar_ticks();
  const Tick pos = ((onset % bar) + bar) % bar;
  return pos == 0 || 2 * pos == bar;
}

int local_contour(const std::vector<NoteEvent>& events, std::size_t i) {
  if (i > 0) {
    const int back = sign(events[i].pitch - events[i - 1].pitch);
    if (back != 0) return back;
  }
  if (i + 1 < events.size()) return sign(events[i + 1].pitch - events[i].pitch);
  return 0;
}

int reconcile_target(int pitch, int contour, const ChordSymbol& chord) {
  if (chord.contains(pitch_class_of(pitch))) return pitch;
  int up = 1;
  while (!chord.contains(pitch_class_of(pitch + up))) ++up;
  int down = 1;
  while (!chord.contains(pitch_class_of(pitch - down))) ++down;
  if (pitch + up > 127) return pitch - down;
  if (pitch - down < 0) return pitch + up;
  if (contour > 0 && up <= kMaxContourShift) return pitch + up;
  if (contour < 0 && down <= kMaxContourShift) return pitch - down;
  return up < down ? pitch + up : pitch - down;
}

Melody reconcile(const Melody& m, const ChordProgression& p) {
  Melody out = m;
  const auto& ev = m.events;
  const std::size_t n = ev.size();
  if (n == 0 || p.bars.empty()) return out;

  std::vector<std::vector<Option>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ChordSymbol& chord = p.chord_at(ev[i].onset);
    const int o = ev[i].pitch;
    if (chord.contains(pitch_class_of(o))) {
      options[i].push_back({o, false});
      continue;
    }
    const bool inner = i > 0 && i + 1 < n;
    if (!is_strong_onset(ev[i].onset, m.meter) && inner) options[i].push_back({o, true});
    options[i].push_back({reconcile_target(o, local_contour(ev, i), chord), false});
  }

  const auto compatible = [&](std::size_t i, const Option& a, const Option& b) {
    // a is the option of note i, b of note i + 1.
    if (b.passing && !step_ok(a.pitch, ev[i + 1].pitch)) return false;
    if (a.passing && !step_ok(b.pitch, ev[i].pitch)) return false;
    return true;
  };

  // cost[i][j]: least displacement of notes i.. given option j at note i.
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  std::vector<std::vector<long>> cost(n);
  for (std::size_t ii = n; ii-- > 0;) {
    cost[ii].assign(options[ii].size(), kInf);
    for (std::size_t j = 0; j < options[ii].size(); ++j) {
      const long own = std::abs(options[ii][j].pitch - ev[ii].pitch);
      if (ii + 1 == n) {
        cost[ii][j] = own;
        continue;
      }
      long best = kInf;
      for (std::size_t k = 0; k < options[ii + 1].size(); ++k) {
        if (compatible(ii, options[ii][j], options[ii + 1][k])) best = std::min(best, cost[ii + 1][k]);
      }
      if (best < kInf) cost[ii][j] = own + best;
    }
  }

  // Options are listed keep-first, so strict comparison keeps notes on ties.
  std::size_t choice = 0;
  for (std::size_t j = 1; j < options[0].size(); ++j) {
    if (cost[0][j] < cost[0][choice]) choice = j;
  }
  out.events[0].pitch = options[0][choice].pitch;
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t next = options[i].size();
    for (std::size_t k = 0; k < options[i].size(); ++k) {
      if (!compatible(i - 1, options[i - 1][choice], options[i][k])) continue;
      if (next == options[i].size() || cost[i][k] < cost[i][next]) next = k;
    }
    choice = next;
    out.events[i].pitch = options[i][choice].pitch;
  }
  return out;
}

}  // namespace filmscore::assemble
