#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "filmscore/corpus.h"
#include "filmscore/generate.h"
#include "fixtures.h"

using namespace filmscore;
using namespace filmscore::generate;

namespace {

const std::vector<Melody>& corpus_melodies() {
  static const auto m = corpus::parse_melody_corpus(fixtures::read("melodies.abc")).melodies;
  return m;
}

const std::vector<ChordProgression>& corpus_progressions() {
  static const auto p = corpus::parse_chord_sheet(fixtures::read("chords.txt"));
  return p;
}

// Every (order+1)-gram of the padded training sequences.
std::set<std::vector<Symbol>> grams(const std::vector<std::vector<Symbol>>& seqs, int order) {
  std::set<std::vector<Symbol>> out;
  for (const auto& s : seqs) {
    std::vector<Symbol> padded(static_cast<std::size_t>(order), kStart);
    padded.insert(padded.end(), s.begin(), s.end());
    for (std::size_t i = 0; i + order < padded.size(); ++i) {
      out.emplace(padded.begin() + static_cast<long>(i), padded.begin() + static_cast<long>(i + order + 1));
    }
  }
  return out;
}

int violations(const std::vector<Symbol>& seq, const std::set<std::vector<Symbol>>& known, int order) {
  int bad = 0;
  std::vector<Symbol> padded(static_cast<std::size_t>(order), kStart);
  padded.insert(padded.end(), seq.begin(), seq.end());
  for (std::size_t i = 0; i + order < padded.size(); ++i) {
    std::vector<Symbol> g(padded.begin() + static_cast<long>(i), padded.begin() + static_cast<long>(i + order + 1));
    bad += known.count(g) ? 0 : 1;
  }
  return bad;
}

std::vector<Symbol> ioi_symbols(const Melody& m) {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    const Tick ioi = i + 1 < m.events.size() ? m.events[i + 1].onset - m.events[i].onset : m.events[i].duration;
    out.push_back(static_cast<Symbol>(ioi));
  }
  return out;
}

// Sum of chord lengths between all onset pairs on the unit circle: the
// evenness measure whose maximisers are the maximally even sets.
double evenness(unsigned mask, int n) {
  std::vector<int> on;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) on.push_back(i);
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < on.size(); ++a) {
    for (std::size_t b = a + 1; b < on.size(); ++b) sum += 2.0 * std::sin(std::numbers::pi * (on[b] - on[a]) / n);
  }
  return sum;
}

int min_gap(unsigned mask, int n) {
  std::vector<int> on;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) on.push_back(i);
  }
  if (on.size() < 2) return n;
  int g = n;
  for (std::size_t i = 0; i < on.size(); ++i) {
    const int next = i + 1 < on.size() ? on[i + 1] : on[0] + n;
    g = std::min(g, next - on[i]);
  }
  return g;
}

unsigned mask_of(const RhythmPattern& r) {
  unsigned m = 0;
  for (std::size_t i = 0; i < r.pattern.size(); ++i) {
    if (r.pattern[i]) m |= 1u << i;
  }
  return m;
}

unsigned rotate(unsigned mask, int by, int n) {
  const unsigned full = (1u << n) - 1;
  return ((mask >> by) | (mask << (n - by))) & full;
}

}  // namespace

TEST(Rng, EngineAndSeedingAreTheDocumentedAlgorithms) {
  // Published reference values: the C++ standard's check value for
  // mt19937_64 and the first SplitMix64 output from state 0.
  std::mt19937_64 e;
  e.discard(9999);
  EXPECT_EQ(e(), 9981545732273789042ULL);
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);

  Rng r(42);
  std::mt19937_64 ref(mix64(42));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r.next_u64(), ref());
}

TEST(Rng, SubstreamsAreIndependentOfParentState) {
  Rng a(7);
  const Rng b(7);
  for (int i = 0; i < 50; ++i) a.next_u64();
  Rng sa = a.substream("melody", 3);
  Rng sb = b.substream("melody", 3);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sa.next_u64(), sb.next_u64());
  EXPECT_NE(b.substream("melody", 3).next_u64(), b.substream("melody", 4).next_u64());
  EXPECT_NE(b.substream("melody", 3).next_u64(), b.substream("progression", 3).next_u64());
}

TEST(Rng, DistributionsAreInRangeAndUniform) {
  Rng r(1);
  std::array<int, 6> counts{};
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.uniform_int(-2, 3);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 3);
    ++counts[static_cast<std::size_t>(v + 2)];
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  double chi = 0.0;
  for (int c : counts) chi += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  EXPECT_LT(chi, 20.52);  // chi-square, 5 dof, p = 0.001
  EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(Rng, WeightedIndexFollowsWeights) {
  Rng r(3);
  const std::vector<std::uint64_t> w = {1, 0, 3};
  std::array<int, 3> counts{};
  for (int i = 0; i < 40000; ++i) ++counts[r.weighted_index(w)];
  EXPECT_EQ(counts[1], 0);
  const double chi = std::pow(counts[0] - 10000.0, 2) / 10000.0 + std::pow(counts[2] - 30000.0, 2) / 30000.0;
  EXPECT_LT(chi, 10.83);
}

TEST(Markov, TrainedDistributionsSumToOne) {
  const MarkovModel m = train_markov({{1, 2, 3, 1, 2, 4}, {2, 3, 3}}, 2);
  for (const auto& [ctx, dist] : m.full_order_table()) {
    EXPECT_EQ(ctx.size(), 2u);
    double sum = 0.0;
    for (const auto& [_, p] : dist) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  const std::vector<Symbol> ctx = {1, 2};
  const auto d = m.distribution(ctx);
  EXPECT_DOUBLE_EQ(d.at(3), 0.5);
  EXPECT_DOUBLE_EQ(d.at(4), 0.5);
  const std::vector<Symbol> unseen = {9, 9};
  EXPECT_TRUE(m.distribution(unseen).empty());
  EXPECT_FALSE(m.backoff(unseen).empty());
  EXPECT_THROW(train_markov({{1, 2}}, 2), InsufficientData);
}

TEST(Markov, SampledTransitionFrequenciesMatchCounts) {
  // After A the corpus has B twice and C once.
  const Symbol A = 1, B = 2, C = 3;
  const MarkovModel m = train_markov({{A, B}, {A, B}, {A, C}}, 1);
  Rng r(11);
  int b = 0, c = 0;
  const int n = 6000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_markov(m, 2, r);
    ASSERT_EQ(s.size(), 2u);
    ASSERT_EQ(s[0], A);
    (s[1] == B ? b : c) += 1;
  }
  const double eb = n * 2.0 / 3.0, ec = n / 3.0;
  const double chi = (b - eb) * (b - eb) / eb + (c - ec) * (c - ec) / ec;
  EXPECT_LT(chi, 10.83);  // 1 dof, p = 0.001
}

TEST(ConstrainedSampler, HitsBudgetAndAcceptRule) {
  // Weights 1..3; budget 7; must end on symbol 3.
  const MarkovModel m = train_markov({{1, 2, 3, 1, 1, 2, 3}, {2, 2, 3, 1, 3}}, 1);
  ConstrainedSampler s(m, [](Symbol x) { return std::int64_t{x}; }, [](Symbol x) { return x == 3; });
  ASSERT_TRUE(s.feasible(7));
  Rng r(5);
  for (int i = 0; i < 200; ++i) {
    const auto seq = s.sample(r, 7);
    std::int64_t sum = 0;
    for (Symbol x : seq) sum += x;
    // Stops at the first symbol that reaches the budget.
    EXPECT_GE(sum, 7);
    EXPECT_LT(sum - seq.back(), 7);
    EXPECT_EQ(seq.back(), 3);
    EXPECT_EQ(s.relaxed_steps(), 0);
    EXPECT_EQ(violations(seq, grams({{1, 2, 3, 1, 1, 2, 3}, {2, 2, 3, 1, 3}}, 1), 1), 0);
  }
}

TEST(ConstrainedSampler, ExactBudgetLandsOnIt) {
  const MarkovModel m = train_markov({{1, 2, 3, 1, 1, 2, 3}, {2, 2, 3, 1, 3}}, 1);
  ConstrainedSampler s(m, [](Symbol x) { return std::int64_t{x}; }, [](Symbol x) { return x == 3; }, true);
  Rng r(6);
  for (int budget : {5, 7, 10, 19}) {
    ASSERT_TRUE(s.feasible(budget)) << budget;
    for (int i = 0; i < 50; ++i) {
      const auto seq = s.sample(r, budget);
      std::int64_t sum = 0;
      for (Symbol x : seq) sum += x;
      EXPECT_EQ(sum, budget);
      EXPECT_EQ(seq.back(), 3);
      EXPECT_EQ(s.relaxed_steps(), 0);
    }
  }
  // Sequences open with 1 or 2 and must close on 3, so 1 and 3 are out of reach.
  EXPECT_FALSE(s.feasible(1));
  EXPECT_FALSE(s.feasible(3));
}

TEST(MelodyPool, ShapeAndNgramContainment) {
  const Rng root(2024);
  const auto pool = generate_melody_pool(corpus_melodies(), 150, root);
  ASSERT_EQ(pool.size(), 150u);
  const MelodyTrainingSet set = melody_training_set(corpus_melodies());
  const auto pitch_grams = grams(set.pitches, kPitchOrder);
  const auto rhythm_grams = grams(set.rhythms, kRhythmOrder);
  for (const Melody& m : pool) {
    std::string why;
    ASSERT_TRUE(is_valid_melody(m, &why)) << why;
    EXPECT_EQ(m.length_bars, 8);
    EXPECT_EQ(m.events.back().end(), 8 * 1920);
    std::vector<Symbol> p;
    for (const auto& e : m.events) p.push_back(e.pitch);
    EXPECT_EQ(violations(p, pitch_grams, kPitchOrder), 0);
    EXPECT_EQ(violations(ioi_symbols(m), rhythm_grams, kRhythmOrder), 0);
  }
}

TEST(MelodyPool, DeterministicPerSeedAndIndex) {
  const auto a = generate_melody_pool(corpus_melodies(), 20, Rng(9));
  const auto b = generate_melody_pool(corpus_melodies(), 30, Rng(9));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  const auto c = generate_melody_pool(corpus_melodies(), 20, Rng(10));
  EXPECT_NE(a, c);
}

TEST(ChordPool, LengthsCadenceAndKey) {
  const auto pool = generate_chord_pool(corpus_progressions(), 300, Rng(77));
  ASSERT_EQ(pool.size(), 300u);
  std::set<std::size_t> lengths;
  for (const auto& p : pool) {
    lengths.insert(p.bars.size());
    EXPECT_TRUE(p.bars.size() == 4 || p.bars.size() == 8 || p.bars.size() == 12 || p.bars.size() == 16);
    EXPECT_EQ(corpus::detect_tonic(p), PitchClass(0));
    for (const auto& bar : p.bars) {
      EXPECT_GE(bar.size(), 1u);
      EXPECT_LE(bar.size(), 2u);
    }
  }
  EXPECT_EQ(lengths.size(), 4u);
}

TEST(ChordPool, TokensComeFromTheCorpusInC) {
  std::set<std::pair<int, int>> known;
  for (const auto& p : corpus_progressions()) {
    for (const auto& bar : corpus::transpose_to_c(p).bars) {
      for (const auto& c : bar) known.emplace(c.root.value(), static_cast<int>(c.quality));
    }
  }
  for (const auto& p : generate_chord_pool(corpus_progressions(), 100, Rng(1))) {
    for (const auto& bar : p.bars) {
      for (const auto& c : bar) EXPECT_TRUE(known.count({c.root.value(), static_cast<int>(c.quality)}));
    }
  }
}

TEST(Vocabulary, EncodeDecodeRoundTrip) {
  ChordVocabulary v;
  std::vector<ChordProgression> in_c;
  for (const auto& p : corpus_progressions()) in_c.push_back(corpus::transpose_to_c(p));
  const auto seqs = v.encode(in_c);
  for (std::size_t i = 0; i < in_c.size(); ++i) EXPECT_EQ(v.decode(seqs[i]).bars, in_c[i].bars);
}

TEST(Euclidean, FixedExamples) {
  EXPECT_EQ(euclidean_rhythm(4, 4).str(), "1111");
  EXPECT_EQ(euclidean_rhythm(1, 4).str(), "1000");
  EXPECT_EQ(euclidean_rhythm(3, 8).str(), "10010010");
  EXPECT_EQ(euclidean_rhythm(0, 5).str(), "00000");
  EXPECT_THROW(euclidean_rhythm(5, 4), BadArity);
  EXPECT_THROW(euclidean_rhythm(-1, 4), BadArity);
  EXPECT_THROW(euclidean_rhythm(0, 0), BadArity);
}

TEST(Euclidean, PublishedTable) {
  // Rotations as tabulated in the Euclidean-rhythm literature.
  const std::vector<std::tuple<int, int, std::string>> table = {
      {2, 3, "110"},          {2, 5, "10100"},         {3, 4, "1110"},
      {3, 5, "10101"},        {3, 7, "1010100"},       {3, 8, "10010010"},
      {4, 7, "1010101"},      {4, 9, "101010100"},     {4, 11, "10010010010"},
      {5, 6, "111110"},       {5, 7, "1011011"},       {5, 8, "10110110"},
      {5, 9, "101010101"},    {5, 11, "10101010100"},  {5, 12, "100101001010"},
      {5, 13, "1001010010100"}, {5, 16, "1001001001001000"}, {7, 8, "11111110"},
      {7, 12, "101101011010"}, {7, 16, "1001010100101010"}, {9, 16, "1011010101101010"},
  };
  for (const auto& [k, n, s] : table) EXPECT_EQ(euclidean_rhythm(k, n).str(), s) << k << "," << n;
}

TEST(Euclidean, MaximallyEvenAgainstBruteForce) {
  for (int n = 1; n <= 16; ++n) {
    for (int k = 0; k <= n; ++k) {
      const RhythmPattern r = euclidean_rhythm(k, n);
      ASSERT_EQ(static_cast<int>(r.pattern.size()), n);
      const unsigned got = mask_of(r);
      ASSERT_EQ(std::popcount(got), k);
      if (k > 0) ASSERT_TRUE(got & 1u) << "step 0 must be an onset";

      double best = -1.0;
      int best_gap = 0;
      std::set<unsigned> best_set;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k || (k > 0 && !(mask & 1u))) continue;
        const double e = evenness(mask, n);
        best_gap = std::max(best_gap, min_gap(mask, n));
        if (e > best + 1e-9) {
          best = e;
          best_set = {mask};
        } else if (std::abs(e - best) <= 1e-9) {
          best_set.insert(mask);
        }
      }
      EXPECT_TRUE(best_set.count(got)) << k << "," << n << " " << r.str();
      EXPECT_EQ(min_gap(got, n), best_gap) << k << "," << n;
      // The maximisers with an onset on step 0 are exactly the rotations of
      // the returned pattern.
      std::set<unsigned> rotations;
      for (int s = 0; s < n; ++s) {
        const unsigned m = rotate(got, s, n);
        if (k == 0 || (m & 1u)) rotations.insert(m);
      }
      EXPECT_EQ(rotations, best_set) << k << "," << n;
    }
  }
}

TEST(MovementToPulses, Formula) {
  EXPECT_EQ(movement_to_pulses(0.0, 16), 1);
  EXPECT_EQ(movement_to_pulses(1.0, 16), 16);
  EXPECT_EQ(movement_to_pulses(0.5, 8), 5);
  EXPECT_EQ(movement_to_pulses(-3.0, 8), 1);
  EXPECT_EQ(movement_to_pulses(7.0, 8), 8);
  for (int n = 1; n <= 16; ++n) {
    for (double m = 0.0; m <= 1.0; m += 0.01) {
      const int k = movement_to_pulses(m, n);
      EXPECT_GE(k, 1);
      EXPECT_LE(k, n);
    }
  }
}

TEST(EmbodiedChords, MatchesExhaustiveEnumeration) {
  for (int root = 0; root < 12; ++root) {
    for (int size : {3, 4}) {
      std::vector<std::vector<int>> want;
      // Completions of the root by choosing size-1 of the other 11 classes.
      std::vector<int> others;
      for (int pc = 0; pc < 12; ++pc) {
        if (pc != root) others.push_back(pc);
      }
      const auto consider = [&](std::vector<int> set) {
        std::sort(set.begin(), set.end());
        for (int a : set) {
          for (int b : set) {
            const int d = ((b - a) % 12 + 12) % 12;
            if (d == 1) {
              want.push_back(set);
              return;
            }
          }
        }
      };
      for (std::size_t i = 0; i < others.size(); ++i) {
        for (std::size_t j = i + 1; j < others.size(); ++j) {
          if (size == 3) {
            consider({root, others[i], others[j]});
            continue;
          }
          for (std::size_t l = j + 1; l < others.size(); ++l) consider({root, others[i], others[j], others[l]});
        }
      }
      std::sort(want.begin(), want.end());
      EXPECT_EQ(embodied_chords(PitchClass(root), size), want);
    }
  }
  const auto c3 = embodied_chords(PitchClass(0), 3);
  EXPECT_NE(std::find(c3.begin(), c3.end(), std::vector<int>{0, 1, 5}), c3.end());
  EXPECT_EQ(std::find(c3.begin(), c3.end(), std::vector<int>{0, 4, 7}), c3.end());
  EXPECT_THROW(embodied_chords(PitchClass(0), 5), BadArity);
}
