#include <algorithm>
#include <cmath>

#include "filmscore/generate.h"

namespace filmscore::generate {

std::string RhythmPattern::str() const {
  std::string s;
  for (bool b : pattern) s.push_back(b ? '1' : '0');
  return s;
}

RhythmPattern euclidean_rhythm(int k, int n) {
  if (n < 1 || k < 0 || k > n) throw BadArity(k, n);
  RhythmPattern r{k, n, {}};
  if (k == 0) {
    r.pattern.assign(static_cast<std::size_t>(n), false);
    return r;
  }

  // Bjorklund: repeatedly append the remainder groups to the leading groups.
  std::vector<std::vector<bool>> head(static_cast<std::size_t>(k), std::vector<bool>{true});
  std::vector<std::vector<bool>> tail(static_cast<std::size_t>(n - k), std::vector<bool>{false});
  while (tail.size() > 1) {
    const std::size_t pairs = std::min(head.size(), tail.size());
    std::vector<std::vector<bool>> joined;
    for (std::size_t i = 0; i < pairs; ++i) {
      auto g = head[i];
      g.insert(g.end(), tail[i].begin(), tail[i].end());
      joined.push_back(std::move(g));
    }
    std::vector<std::vector<bool>> rest;
    if (head.size() > pairs) {
      rest.assign(head.begin() + static_cast<std::ptrdiff_t>(pairs), head.end());
    } else {
      rest.assign(tail.begin() + static_cast<std::ptrdiff_t>(pairs), tail.end());
    }
    head = std::move(joined);
    tail = std::move(rest);
  }
  for (const auto& g : head) r.pattern.insert(r.pattern.end(), g.begin(), g.end());
  for (const auto& g : tail) r.pattern.insert(r.pattern.end(), g.begin(), g.end());

  const auto first = std::find(r.pattern.begin(), r.pattern.end(), true);
  std::rotate(r.pattern.begin(), first, r.pattern.end());
  return r;
}

int movement_to_pulses(double movement, int n) {
  if (n < 1) throw BadArity(1, n);
  const double m = std::clamp(movement, 0.0, 1.0);
  const int k = static_cast<int>(std::lround(1.0 + m * (n - 1)));
  return std::clamp(k, 1, n);
}

std::vector<std::vector<int>> embodied_chords(PitchClass root, int size) {
  if (size != 3 && size != 4) throw BadArity(size, 12);
  std::vector<std::vector<int>> out;
  const int r = root.value();
  // Subsets of the other 11 classes, completed with the root.
  for (unsigned mask = 0; mask < (1u << 12); ++mask) {
    if (!(mask & (1u << r)) || __builtin_popcount(mask) != size) continue;
    std::vector<int> set;
    for (int pc = 0; pc < 12; ++pc) {
      if (mask & (1u << pc)) set.push_back(pc);
    }
    bool semitone = false;
    for (int pc : set) {
      if (mask & (1u << ((pc + 1) % 12))) semitone = true;
    }
    if (semitone) out.push_back(std::move(set));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace filmscore::generate
