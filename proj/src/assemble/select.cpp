#include <algorithm>
#include <cmath>

#include "filmscore/assemble.h"

namespace filmscore::assemble {

SelectionWeights SelectionWeights::defaults() {
  SelectionWeights w;
  w.field.fill(1.0);
  w.scale.fill(1.0);
  for (Field f : {Field::kTempoMin, Field::kTempoMax}) {
    w.field[static_cast<std::size_t>(f)] = 0.5;
    // Tempo fields live on a BPM scale; 160 is the width of the clamp window.
    w.scale[static_cast<std::size_t>(f)] = 160.0;
  }
  return w;
}

std::array<bool, kFieldCount> pool_fields(annotate::PoolKind kind) {
  std::array<bool, kFieldCount> mask{};
  const bool melody = kind == annotate::PoolKind::kMelody;
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const bool chord = f == static_cast<std::size_t>(Field::kChordConsonance) ||
                       f == static_cast<std::size_t>(Field::kChordVariation);
    mask[f] = melody ? !chord : chord;
  }
  return mask;
}

double weighted_distance(const AnnotationVector& a, const AnnotationVector& b, const SelectionWeights& w,
                         const std::array<bool, kFieldCount>& mask) {
  double sum = 0.0;
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    if (!mask[f]) continue;
    const double d = (a.v[f] - b.v[f]) / w.scale[f];
    sum += w.field[f] * d * d;
  }
  return std::sqrt(sum);
}

std::vector<std::string> select_candidates(const annotate::PoolManifest& pool, const AnnotationVector& target,
                                           std::size_t k, const std::optional<AnnotationVector>& contrast_against,
                                           const SelectionWeights& weights, const std::vector<std::string>& exclude) {
  const auto mask = pool_fields(pool.kind);
  std::vector<std::pair<double, const std::string*>> scored;
  for (const annotate::Candidate& c : pool.candidates) {
    if (std::find(exclude.begin(), exclude.end(), c.id) != exclude.end()) continue;
    double score = weights.w_fit * weighted_distance(c.annotation, target, weights, mask);
    if (contrast_against) score -= weights.w_contrast * weighted_distance(c.annotation, *contrast_against, weights, mask);
    scored.emplace_back(score, &c.id);
  }
  if (scored.size() < k) throw PoolTooSmall(scored.size(), k);
  const auto less = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : *a.second < *b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), less);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(*scored[i].second);
  return out;
}

}  // namespace filmscore::assemble
