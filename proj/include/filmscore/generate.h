#pragma once

// Candidate material: Markov melodies and chord progressions, Euclidean
// rhythms, and semitone-cluster chord sets.

#include <array>
#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "filmscore/corpus.h"
#include "filmscore/errors.h"
#include "filmscore/music.h"
#include "filmscore/rng.h"

namespace filmscore::generate {

using Symbol = std::int32_t;

/// Left padding for contexts at the start of a training sequence.
inline constexpr Symbol kStart = INT32_MIN;

struct Transition {
  Symbol next;
  std::uint64_t count;
};

class MarkovModel {
 public:
  MarkovModel(int order, std::vector<Symbol> alphabet,
              std::vector<std::map<std::vector<Symbol>, std::vector<Transition>>> tables);

  int order() const { return order_; }
  const std::vector<Symbol>& alphabet() const { return alphabet_; }

  /// Continuations recorded after an exact context (any length 0..order), or
  /// nullptr when the context was never followed by anything.
  const std::vector<Transition>* continuations(std::span<const Symbol> context) const;

  /// Continuations for a full-length context, backing off by dropping the
  /// oldest symbol until some suffix has been seen. Never null for a trained
  /// model: the empty context holds the unigram counts.
  const std::vector<Transition>& backoff(std::span<const Symbol> context) const;

  /// Next-symbol probabilities of an exact context; empty when unseen.
  std::map<Symbol, double> distribution(std::span<const Symbol> context) const;

  /// Every exact context of full length with its distribution.
  std::vector<std::pair<std::vector<Symbol>, std::map<Symbol, double>>> full_order_table() const;

 private:
  int order_;
  std::vector<Symbol> alphabet_;
  std::vector<std::map<std::vector<Symbol>, std::vector<Transition>>> tables_;
};

/// Empirical (context -> next) frequencies within each sequence, with kStart
/// padding the first `order` contexts. Throws InsufficientData unless some
/// sequence is longer than `order`.
MarkovModel train_markov(const std::vector<std::vector<Symbol>>& sequences, int order);

/// Stopping rule for constrained sampling: keep drawing until the summed
/// symbol weights reach `budget`; if `accept` is set, the final symbol must
/// satisfy it. With `exact` the sum must land on the budget, not past it.
struct SampleConstraint {
  std::function<std::int64_t(Symbol)> weight = [](Symbol) { return std::int64_t{1}; };
  std::int64_t budget = 1;
  std::function<bool(Symbol)> accept;
  bool exact = false;
};

/// Markov sampler with look-ahead.
///
/// At each step the sampler only draws continuations from which the budget
/// can still be met without leaving the training transitions; probabilities
/// are the empirical counts renormalised over those continuations. When no
/// continuation qualifies it draws from all of them, and a context with no
/// continuation at all backs off to shorter contexts.
class ConstrainedSampler {
 public:
  ConstrainedSampler(const MarkovModel& model, std::function<std::int64_t(Symbol)> weight,
                     std::function<bool(Symbol)> accept = {}, bool exact = false);

  std::vector<Symbol> sample(Rng& rng, std::int64_t budget);
  /// Whether the budget is reachable from the start context.
  bool feasible(std::int64_t budget);
  /// Steps in the last sample that fell outside the look-ahead guarantee.
  int relaxed_steps() const { return relaxed_steps_; }

 private:
  using State = std::vector<Symbol>;
  int intern(const State& s);
  bool viable(int state, std::int64_t remaining);
  State shift(const State& s, Symbol next) const;
  bool finishes(Symbol s, std::int64_t remaining) const;

  const MarkovModel& model_;
  std::function<std::int64_t(Symbol)> weight_;
  std::function<bool(Symbol)> accept_;
  bool exact_;
  std::map<State, int> ids_;
  std::vector<State> states_;
  std::unordered_map<std::uint64_t, std::int8_t> memo_;
  int relaxed_steps_ = 0;
};

/// `length` symbols from the model (unit weights, no final-symbol rule).
std::vector<Symbol> sample_markov(const MarkovModel& m, int length, Rng& rng);

/// Pluggable generator behind the candidate pools; the Markov implementation
/// is the default and a learned model can be slotted in behind the same calls.
class CandidateGenerator {
 public:
  virtual ~CandidateGenerator() = default;
  virtual void train(const std::vector<std::vector<Symbol>>& sequences) = 0;
  virtual std::vector<Symbol> sample(Rng& rng, const SampleConstraint& constraint) = 0;
};

class MarkovGenerator final : public CandidateGenerator {
 public:
  explicit MarkovGenerator(int order) : order_(order) {}

  void train(const std::vector<std::vector<Symbol>>& sequences) override;
  /// Look-ahead state is cached per `cache_key`; calls sharing a key must
  /// share the weight and accept functions.
  std::vector<Symbol> sample(Rng& rng, const SampleConstraint& constraint) override;
  std::vector<Symbol> sample(Rng& rng, const SampleConstraint& constraint, const std::string& cache_key);

  const MarkovModel& model() const;

 private:
  int order_;
  std::optional<MarkovModel> model_;
  std::map<std::string, std::unique_ptr<ConstrainedSampler>> samplers_;
};

inline constexpr int kPitchOrder = 3;
inline constexpr int kRhythmOrder = 5;
inline constexpr int kCandidateBars = 8;
inline constexpr corpus::Register kMelodyRegister{60, 84};

/// Training view of a corpus: each melody moved to C inside the candidate
/// register, as pitch sequences and inter-onset-interval sequences.
struct MelodyTrainingSet {
  std::vector<std::vector<Symbol>> pitches;
  std::vector<std::vector<Symbol>> rhythms;
};
MelodyTrainingSet melody_training_set(const std::vector<Melody>& corpus);

/// `count` 8-bar 4/4 melodies. Pitches come from an order-3 model, inter-onset
/// intervals from an independent order-5 model; the two are zipped and the
/// last note is cut or extended to end exactly on bar 8. Candidate i uses
/// substream ("melody", i) of `rng`.
std::vector<Melody> generate_melody_pool(const std::vector<Melody>& corpus, int count, const Rng& rng);
std::vector<Melody> generate_melody_pool(const std::vector<Melody>& corpus, int count, const Rng& rng,
                                         CandidateGenerator& pitch_model, CandidateGenerator& rhythm_model);

/// Progressions in C as (chord, half-bar position) tokens.
struct ChordVocabulary {
  std::vector<std::pair<ChordSymbol, int>> tokens;
  Symbol id(const ChordSymbol& c, int position);
  std::vector<std::vector<Symbol>> encode(const std::vector<ChordProgression>& corpus);
  ChordProgression decode(std::span<const Symbol> symbols) const;
};

inline constexpr std::array<int, 4> kChordPoolLengths = {4, 8, 12, 16};

/// `count` progressions of 4, 8, 12 or 16 bars from an order-2 model over
/// (chord, half-bar position) tokens, each ending on a C-rooted chord when the
/// corpus allows it and passed through transpose_to_c. Candidate i uses
/// substream ("progression", i) of `rng`.
std::vector<ChordProgression> generate_chord_pool(const std::vector<ChordProgression>& corpus, int count,
                                                  const Rng& rng);

struct RhythmPattern {
  int pulses = 0;
  int steps = 1;
  std::vector<bool> pattern;

  std::string str() const;
};

/// Bjorklund distribution of k onsets over n steps, step 0 an onset when k > 0.
/// Throws BadArity.
RhythmPattern euclidean_rhythm(int k, int n);

/// round(1 + movement * (n - 1)), movement clamped to [0,1].
int movement_to_pulses(double movement, int n);

/// Every pitch-class set of `size` (3 or 4) containing `root` with at least
/// one semitone (interval class 1) between members, sorted lexicographically.
std::vector<std::vector<int>> embodied_chords(PitchClass root, int size);

}  // namespace filmscore::generate
