#include <algorithm>
#include <cstdlib>

#include "filmscore/corpus.h"
#include "filmscore/generate.h"

namespace filmscore::generate {

MelodyTrainingSet melody_training_set(const std::vector<Melody>& corpus) {
  MelodyTrainingSet set;
  for (const Melody& raw : corpus) {
    if (raw.events.empty()) continue;
    const Melody m = corpus::transpose_to_c(raw, kMelodyRegister);
    std::vector<Symbol> pitches;
    std::vector<Symbol> rhythm;
    for (std::size_t i = 0; i < m.events.size(); ++i) {
      pitches.push_back(m.events[i].pitch);
      const Tick ioi = i + 1 < m.events.size() ? m.events[i + 1].onset - m.events[i].onset : m.events[i].duration;
      rhythm.push_back(static_cast<Symbol>(ioi));
    }
    set.pitches.push_back(std::move(pitches));
    set.rhythms.push_back(std::move(rhythm));
  }
  return set;
}

std::vector<Melody> generate_melody_pool(const std::vector<Melody>& corpus, int count, const Rng& rng) {
  MarkovGenerator pitch(kPitchOrder);
  MarkovGenerator rhythm(kRhythmOrder);
  return generate_melody_pool(corpus, count, rng, pitch, rhythm);
}

std::vector<Melody> generate_melody_pool(const std::vector<Melody>& corpus, int count, const Rng& rng,
                                         CandidateGenerator& pitch_model, CandidateGenerator& rhythm_model) {
  if (corpus.empty()) throw InsufficientData("melody corpus is empty");
  std::vector<Melody> pool;
  if (count <= 0) return pool;

  const MelodyTrainingSet set = melody_training_set(corpus);
  pitch_model.train(set.pitches);
  rhythm_model.train(set.rhythms);

  const Meter meter{4, 4};
  const Tick total = kCandidateBars * meter.bar_ticks();
  auto* pitch_markov = dynamic_cast<MarkovGenerator*>(&pitch_model);
  auto* rhythm_markov = dynamic_cast<MarkovGenerator*>(&rhythm_model);

  for (int i = 0; i < count; ++i) {
    Rng r = rng.substream("melody", static_cast<std::uint64_t>(i));

    SampleConstraint rc;
    rc.weight = [](Symbol s) { return static_cast<std::int64_t>(s); };
    rc.budget = total;
    // Land on the final barline so the last inter-onset interval is one the
    // corpus actually contains.
    rc.exact = true;
    std::vector<Symbol> iois = rhythm_markov ? rhythm_markov->sample(r, rc, "ioi") : rhythm_model.sample(r, rc);

    SampleConstraint pc;
    pc.budget = static_cast<std::int64_t>(iois.size());
    std::vector<Symbol> pitches = pitch_markov ? pitch_markov->sample(r, pc, "unit") : pitch_model.sample(r, pc);

    Melody m;
    m.meter = meter;
    m.length_bars = kCandidateBars;
    m.key_tonic = PitchClass(0);
    m.title = "candidate " + std::to_string(i + 1);
    Tick onset = 0;
    for (std::size_t k = 0; k < iois.size() && k < pitches.size() && onset < total; ++k) {
      NoteEvent e;
      e.onset = onset;
      e.duration = std::max<Tick>(1, iois[k]);
      e.pitch = std::clamp(pitches[k], 0, 127);
      m.events.push_back(e);
      onset += e.duration;
    }
    // The final note ends exactly on the last barline.
    if (!m.events.empty()) m.events.back().duration = total - m.events.back().onset;
    pool.push_back(std::move(m));
  }
  return pool;
}

Symbol ChordVocabulary::id(const ChordSymbol& c, int position) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].first == c && tokens[i].second == position) return static_cast<Symbol>(i);
  }
  tokens.emplace_back(c, position);
  return static_cast<Symbol>(tokens.size() - 1);
}

std::vector<std::vector<Symbol>> ChordVocabulary::encode(const std::vector<ChordProgression>& corpus) {
  std::vector<std::vector<Symbol>> out;
  for (const ChordProgression& p : corpus) {
    std::vector<Symbol> seq;
    for (const BarChords& bar : p.bars) {
      for (std::size_t k = 0; k < bar.size(); ++k) seq.push_back(id(bar[k], k == 0 ? 0 : 1));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

ChordProgression ChordVocabulary::decode(std::span<const Symbol> symbols) const {
  ChordProgression p;
  for (Symbol s : symbols) {
    const auto& [chord, position] = tokens.at(static_cast<std::size_t>(s));
    if (position == 0 || p.bars.empty() || p.bars.back().size() >= 2) {
      p.bars.push_back({chord});
    } else {
      p.bars.back().push_back(chord);
    }
  }
  return p;
}

std::vector<ChordProgression> generate_chord_pool(const std::vector<ChordProgression>& corpus, int count,
                                                  const Rng& rng) {
  if (corpus.empty()) throw InsufficientData("chord corpus is empty");
  std::vector<ChordProgression> pool;
  if (count <= 0) return pool;

  std::vector<ChordProgression> in_c;
  for (const auto& p : corpus) {
    if (!p.bars.empty()) in_c.push_back(corpus::transpose_to_c(p));
  }
  ChordVocabulary vocab;
  const auto sequences = vocab.encode(in_c);
  const MarkovModel model = train_markov(sequences, 2);

  auto bar_weight = [&vocab](Symbol s) -> std::int64_t {
    return vocab.tokens[static_cast<std::size_t>(s)].second == 0 ? 1 : 0;
  };
  auto on_tonic = [&vocab](Symbol s) {
    return vocab.tokens[static_cast<std::size_t>(s)].first.root == PitchClass(0);
  };
  ConstrainedSampler cadential(model, bar_weight, on_tonic);
  ConstrainedSampler free(model, bar_weight);

  std::vector<int> feasible;
  for (int bars : kChordPoolLengths) {
    if (cadential.feasible(bars)) feasible.push_back(bars);
  }

  for (int i = 0; i < count; ++i) {
    Rng r = rng.substream("progression", static_cast<std::uint64_t>(i));
    const int wanted = kChordPoolLengths[r.below(kChordPoolLengths.size())];
    std::vector<Symbol> tokens;
    int bars = wanted;
    if (!feasible.empty()) {
      // Nearest reachable length, shorter first on ties.
      bars = *std::min_element(feasible.begin(), feasible.end(), [wanted](int a, int b) {
        const int da = std::abs(a - wanted);
        const int db = std::abs(b - wanted);
        return da != db ? da < db : a < b;
      });
      tokens = cadential.sample(r, bars);
    } else {
      tokens = free.sample(r, bars);
    }
    ChordProgression p = vocab.decode(tokens);
    if (p.bars.size() > static_cast<std::size_t>(bars)) p.bars.resize(static_cast<std::size_t>(bars));
    pool.push_back(corpus::transpose_to_c(p));
  }
  return pool;
}

}  // namespace filmscore::generate
