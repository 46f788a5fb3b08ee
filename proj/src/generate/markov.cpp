#include <algorithm>
#include <set>
#include <stdexcept>

#include "filmscore/generate.h"

namespace filmscore::generate {

MarkovModel::MarkovModel(int order, std::vector<Symbol> alphabet,
                         std::vector<std::map<std::vector<Symbol>, std::vector<Transition>>> tables)
    : order_(order), alphabet_(std::move(alphabet)), tables_(std::move(tables)) {}

const std::vector<Transition>* MarkovModel::continuations(std::span<const Symbol> context) const {
  if (context.size() > static_cast<std::size_t>(order_)) return nullptr;
  const auto& table = tables_[context.size()];
  const auto it = table.find(std::vector<Symbol>(context.begin(), context.end()));
  return it == table.end() ? nullptr : &it->second;
}

const std::vector<Transition>& MarkovModel::backoff(std::span<const Symbol> context) const {
  for (std::size_t drop = 0; drop <= context.size(); ++drop) {
    if (const auto* found = continuations(context.subspan(drop))) return *found;
  }
  // The empty context always exists for a trained model.
  return tables_.front().begin()->second;
}

std::map<Symbol, double> MarkovModel::distribution(std::span<const Symbol> context) const {
  std::map<Symbol, double> out;
  const auto* found = continuations(context);
  if (!found) return out;
  std::uint64_t total = 0;
  for (const auto& t : *found) total += t.count;
  for (const auto& t : *found) out[t.next] = static_cast<double>(t.count) / static_cast<double>(total);
  return out;
}

std::vector<std::pair<std::vector<Symbol>, std::map<Symbol, double>>> MarkovModel::full_order_table() const {
  std::vector<std::pair<std::vector<Symbol>, std::map<Symbol, double>>> out;
  for (const auto& [ctx, _] : tables_[static_cast<std::size_t>(order_)]) out.emplace_back(ctx, distribution(ctx));
  return out;
}

MarkovModel train_markov(const std::vector<std::vector<Symbol>>& sequences, int order) {
  if (order < 1) throw std::invalid_argument("order must be at least 1");
  const bool enough = std::any_of(sequences.begin(), sequences.end(),
                                  [order](const auto& s) { return s.size() > static_cast<std::size_t>(order); });
  if (!enough) throw InsufficientData("no training sequence is longer than the model order " + std::to_string(order));

  std::vector<std::map<std::vector<Symbol>, std::map<Symbol, std::uint64_t>>> counts(static_cast<std::size_t>(order) + 1);
  std::set<Symbol> alphabet;
  for (const auto& seq : sequences) {
    std::vector<Symbol> padded(static_cast<std::size_t>(order), kStart);
    padded.insert(padded.end(), seq.begin(), seq.end());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      alphabet.insert(seq[i]);
      for (int len = 0; len <= order; ++len) {
        const auto begin = padded.begin() + static_cast<std::ptrdiff_t>(i) + order - len;
        std::vector<Symbol> ctx(begin, padded.begin() + static_cast<std::ptrdiff_t>(i) + order);
        ++counts[static_cast<std::size_t>(len)][ctx][seq[i]];
      }
    }
  }

  std::vector<std::map<std::vector<Symbol>, std::vector<Transition>>> tables(counts.size());
  for (std::size_t len = 0; len < counts.size(); ++len) {
    for (const auto& [ctx, nexts] : counts[len]) {
      auto& row = tables[len][ctx];
      for (const auto& [sym, c] : nexts) row.push_back({sym, c});
    }
  }
  return MarkovModel(order, std::vector<Symbol>(alphabet.begin(), alphabet.end()), std::move(tables));
}

namespace {
constexpr std::int8_t kUnknown = -1;
constexpr std::int8_t kNo = 0;
constexpr std::int8_t kYes = 1;
constexpr std::int8_t kVisiting = 2;
constexpr std::size_t kMaxSymbols = 1 << 20;
}  // namespace

ConstrainedSampler::ConstrainedSampler(const MarkovModel& model, std::function<std::int64_t(Symbol)> weight,
                                       std::function<bool(Symbol)> accept, bool exact)
    : model_(model), weight_(std::move(weight)), accept_(std::move(accept)), exact_(exact) {}

int ConstrainedSampler::intern(const State& s) {
  const auto [it, inserted] = ids_.try_emplace(s, static_cast<int>(states_.size()));
  if (inserted) states_.push_back(s);
  return it->second;
}

ConstrainedSampler::State ConstrainedSampler::shift(const State& s, Symbol next) const {
  State out(s.begin() + 1, s.end());
  out.push_back(next);
  return out;
}

bool ConstrainedSampler::finishes(Symbol s, std::int64_t remaining) const {
  const std::int64_t w = weight_(s);
  return (exact_ ? w == remaining : w >= remaining) && (!accept_ || accept_(s));
}

bool ConstrainedSampler::viable(int state, std::int64_t remaining) {
  const std::uint64_t key = (static_cast<std::uint64_t>(state) << 32) | static_cast<std::uint32_t>(remaining);
  auto [slot, inserted] = memo_.try_emplace(key, kUnknown);
  if (!inserted && slot->second != kUnknown) return slot->second == kYes;
  slot->second = kVisiting;

  // Only exact (non-backed-off) continuations keep the n-gram guarantee.
  const State s = states_[static_cast<std::size_t>(state)];
  const auto* options = model_.continuations(s);
  bool ok = false;
  if (options) {
    for (const Transition& t : *options) {
      const std::int64_t w = weight_(t.next);
      if (w >= remaining) {
        ok = finishes(t.next, remaining);
      } else {
        ok = viable(intern(shift(s, t.next)), remaining - w);
      }
      if (ok) break;
    }
  }
  memo_[key] = ok ? kYes : kNo;
  return ok;
}

bool ConstrainedSampler::feasible(std::int64_t budget) {
  if (budget <= 0) return true;
  return viable(intern(State(static_cast<std::size_t>(model_.order()), kStart)), budget);
}

std::vector<Symbol> ConstrainedSampler::sample(Rng& rng, std::int64_t budget) {
  relaxed_steps_ = 0;
  std::vector<Symbol> out;
  State state(static_cast<std::size_t>(model_.order()), kStart);
  std::int64_t remaining = budget;
  std::vector<Symbol> symbols;
  std::vector<std::uint64_t> weights;
  while (remaining > 0 && out.size() < kMaxSymbols) {
    symbols.clear();
    weights.clear();
    const auto* exact = model_.continuations(state);
    if (exact) {
      for (const Transition& t : *exact) {
        const std::int64_t w = weight_(t.next);
        const bool ok = w >= remaining ? finishes(t.next, remaining) : viable(intern(shift(state, t.next)), remaining - w);
        if (ok) {
          symbols.push_back(t.next);
          weights.push_back(t.count);
        }
      }
    }
    if (symbols.empty()) {
      ++relaxed_steps_;
      for (const Transition& t : exact ? *exact : model_.backoff(state)) {
        symbols.push_back(t.next);
        weights.push_back(t.count);
      }
    }
    const Symbol next = symbols[rng.weighted_index(weights)];
    out.push_back(next);
    remaining -= weight_(next);
    state = shift(state, next);
  }
  return out;
}

std::vector<Symbol> sample_markov(const MarkovModel& m, int length, Rng& rng) {
  if (length < 1) throw std::invalid_argument("length must be at least 1");
  ConstrainedSampler sampler(m, [](Symbol) { return std::int64_t{1}; });
  return sampler.sample(rng, length);
}

void MarkovGenerator::train(const std::vector<std::vector<Symbol>>& sequences) {
  samplers_.clear();
  model_.emplace(train_markov(sequences, order_));
}

const MarkovModel& MarkovGenerator::model() const {
  if (!model_) throw std::logic_error("generator is not trained");
  return *model_;
}

std::vector<Symbol> MarkovGenerator::sample(Rng& rng, const SampleConstraint& constraint) {
  ConstrainedSampler sampler(model(), constraint.weight, constraint.accept, constraint.exact);
  return sampler.sample(rng, constraint.budget);
}

std::vector<Symbol> MarkovGenerator::sample(Rng& rng, const SampleConstraint& constraint,
                                            const std::string& cache_key) {
  auto& slot = samplers_[cache_key];
  if (!slot) slot = std::make_unique<ConstrainedSampler>(model(), constraint.weight, constraint.accept, constraint.exact);
  return slot->sample(rng, constraint.budget);
}

}  // namespace filmscore::generate
