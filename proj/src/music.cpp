#include "filmscore/music.h"

#include <algorithm>
#include <stdexcept>

namespace filmscore {

namespace {

constexpr int kMaj[] = {0, 4, 7};
constexpr int kMin[] = {0, 3, 7};
constexpr int kDim[] = {0, 3, 6};
constexpr int kAug[] = {0, 4, 8};
constexpr int kDom7[] = {0, 4, 7, 10};
constexpr int kMaj7[] = {0, 4, 7, 11};
constexpr int kMin7[] = {0, 3, 7, 10};
constexpr int kMin7b5[] = {0, 3, 6, 10};
constexpr int kDim7[] = {0, 3, 6, 9};
constexpr int kSus4[] = {0, 5, 7};
constexpr int kSus2[] = {0, 2, 7};
constexpr int kMin6[] = {0, 3, 7, 9};
constexpr int kMaj6[] = {0, 4, 7, 9};

}  // namespace

std::span<const int> quality_intervals(ChordQuality q) {
  switch (q) {
    case ChordQuality::kMaj: return kMaj;
    case ChordQuality::kMin: return kMin;
    case ChordQuality::kDim: return kDim;
    case ChordQuality::kAug: return kAug;
    case ChordQuality::kDom7: return kDom7;
    case ChordQuality::kMaj7: return kMaj7;
    case ChordQuality::kMin7: return kMin7;
    case ChordQuality::kMin7b5: return kMin7b5;
    case ChordQuality::kDim7: return kDim7;
    case ChordQuality::kSus4: return kSus4;
    case ChordQuality::kSus2: return kSus2;
    case ChordQuality::kMin6: return kMin6;
    case ChordQuality::kMaj6: return kMaj6;
  }
  return kMaj;
}

const char* quality_suffix(ChordQuality q) {
  switch (q) {
    case ChordQuality::kMaj: return "";
    case ChordQuality::kMin: return "m";
    case ChordQuality::kDim: return "dim";
    case ChordQuality::kAug: return "aug";
    case ChordQuality::kDom7: return "7";
    case ChordQuality::kMaj7: return "maj7";
    case ChordQuality::kMin7: return "m7";
    case ChordQuality::kMin7b5: return "m7b5";
    case ChordQuality::kDim7: return "dim7";
    case ChordQuality::kSus4: return "sus4";
    case ChordQuality::kSus2: return "sus2";
    case ChordQuality::kMin6: return "m6";
    case ChordQuality::kMaj6: return "6";
  }
  return "";
}

const char* quality_name(ChordQuality q) {
  switch (q) {
    case ChordQuality::kMaj: return "maj";
    case ChordQuality::kMin: return "min";
    case ChordQuality::kDim: return "dim";
    case ChordQuality::kAug: return "aug";
    case ChordQuality::kDom7: return "dom7";
    case ChordQuality::kMaj7: return "maj7";
    case ChordQuality::kMin7: return "min7";
    case ChordQuality::kMin7b5: return "min7b5";
    case ChordQuality::kDim7: return "dim7";
    case ChordQuality::kSus4: return "sus4";
    case ChordQuality::kSus2: return "sus2";
    case ChordQuality::kMin6: return "min6";
    case ChordQuality::kMaj6: return "maj6";
  }
  return "maj";
}

std::vector<int> ChordSymbol::tone_classes() const {
  std::vector<int> out;
  for (int iv : quality_intervals(quality)) out.push_back(root.transposed(iv).value());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool ChordSymbol::contains(PitchClass pc) const {
  for (int iv : quality_intervals(quality)) {
    if (root.transposed(iv) == pc) return true;
  }
  return false;
}

std::size_t ChordProgression::chord_count() const {
  std::size_t n = 0;
  for (const auto& bar : bars) n += bar.size();
  return n;
}

const ChordSymbol& ChordProgression::chord_at(Tick t) const {
  if (bars.empty()) throw std::logic_error("chord_at on empty progression");
  const Tick bar_len = meter.bar_ticks();
  const auto bar_index = static_cast<std::size_t>((t / bar_len) % static_cast<Tick>(bars.size()));
  const BarChords& bar = bars[bar_index];
  if (bar.size() == 1) return bar.front();
  return (t % bar_len) * 2 < bar_len ? bar.front() : bar.back();
}

ChordProgression tile_progression(const ChordProgression& p, int bars) {
  ChordProgression out;
  out.meter = p.meter;
  if (p.bars.empty()) return out;
  for (int i = 0; i < bars; ++i) out.bars.push_back(p.bars[static_cast<std::size_t>(i) % p.bars.size()]);
  return out;
}

int place_in_octave(PitchClass pc, int lo) {
  const int offset = ((pc.value() - lo) % 12 + 12) % 12;
  return lo + offset;
}

bool is_valid_melody(const Melody& m, std::string* why) {
  auto fail = [why](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  const Tick limit = m.length_ticks();
  Tick prev_end = 0;
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    const NoteEvent& e = m.events[i];
    if (e.onset < 0) return fail("negative onset at event " + std::to_string(i));
    if (e.duration < 1) return fail("non-positive duration at event " + std::to_string(i));
    if (e.pitch < 0 || e.pitch > 127) return fail("pitch out of range at event " + std::to_string(i));
    if (e.velocity < 1 || e.velocity > 127)
      return fail("velocity out of range at event " + std::to_string(i));
    if (e.onset >= limit) return fail("onset beyond melody length at event " + std::to_string(i));
    if (i > 0 && e.onset < prev_end) return fail("overlap at event " + std::to_string(i));
    prev_end = e.end();
  }
  return true;
}

void fit_length_to_events(Melody& m) {
  const Tick bar = m.meter.bar_ticks();
  Tick end = 0;
  for (const auto& e : m.events) end = std::max(end, e.end());
  m.length_bars = static_cast<int>((end + bar - 1) / bar);
}

}  // namespace filmscore
