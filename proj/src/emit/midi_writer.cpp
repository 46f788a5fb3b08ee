#include <algorithm>
#include <cmath>
#include <tuple>

#include "filmscore/emit.h"

namespace filmscore::emit {

namespace {

// Ticks per second at one BPM: kPpq / 60.
constexpr double kTicksPerSecondPerBpm = kPpq / 60.0;

void check_layers(const Layers& l) {
  const std::array<LayerRange, 4> all = {l.melody, l.counter, l.chords, l.bass};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].lo < 0 || all[i].hi > 127 || all[i].hi - all[i].lo < 11) {
      throw Error("layer range " + std::to_string(all[i].lo) + "-" + std::to_string(all[i].hi) +
                  " must span at least an octave inside 0-127");
    }
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i].lo <= all[j].hi && all[j].lo <= all[i].hi) throw Error("layer ranges overlap");
    }
  }
}

int octave_shift(const Melody& m, const LayerRange& r) {
  int best = 0;
  long best_in = -1;
  for (int k : {0, 12, -12, 24, -24, 36, -36, 48, -48}) {
    long in = 0;
    for (const NoteEvent& e : m.events) in += r.contains(e.pitch + k);
    if (in > best_in) {
      best_in = in;
      best = k;
    }
  }
  return best;
}

struct Window {
  Tick start;
  Tick end;
  int level;
  int previous_level;
  Tick bar;
  bool ramp;

  // Level at a tick inside the cue, ramping over the first bar from the
  // previous cue's level.
  int level_at(Tick local) const {
    if (!ramp || local >= bar) return level;
    const double f = static_cast<double>(local) / static_cast<double>(bar);
    return static_cast<int>(std::lround(previous_level + (level - previous_level) * f));
  }
};

void place(std::vector<PlacedNote>& out, const Window& w, Tick local, Tick duration, int pitch, int velocity_offset,
           Articulation art) {
  const Tick on = w.start + local;
  if (local < 0 || on >= w.end || duration <= 0) return;
  const Tick written = std::min(duration, w.end - on);
  const Tick sounding = std::max<Tick>(1, std::llround(static_cast<double>(written) * gate_ratio(art)));
  const int vel = std::clamp(w.level_at(local) + velocity_offset, 1, 127);
  out.push_back({on, on + sounding, std::clamp(pitch, 0, 127), vel});
}

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

struct Event {
  Tick tick;
  int order;  // 0 meta, 1 note-off, 2 note-on
  int pitch;
  std::vector<std::uint8_t> bytes;
};

std::vector<std::uint8_t> track_chunk(std::vector<Event> events, Tick end) {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.tick, a.order, a.pitch) < std::tie(b.tick, b.order, b.pitch);
  });
  std::vector<std::uint8_t> body;
  Tick now = 0;
  for (const Event& e : events) {
    const auto d = encode_vlq(static_cast<std::uint32_t>(e.tick - now));
    body.insert(body.end(), d.begin(), d.end());
    body.insert(body.end(), e.bytes.begin(), e.bytes.end());
    now = e.tick;
  }
  const auto d = encode_vlq(static_cast<std::uint32_t>(std::max<Tick>(0, end - now)));
  body.insert(body.end(), d.begin(), d.end());
  body.insert(body.end(), {0xff, 0x2f, 0x00});

  std::vector<std::uint8_t> chunk = {'M', 'T', 'r', 'k'};
  put_be(chunk, static_cast<std::uint32_t>(body.size()), 4);
  chunk.insert(chunk.end(), body.begin(), body.end());
  return chunk;
}

}  // namespace

double gate_ratio(Articulation a) {
  switch (a) {
    case Articulation::kStaccato:
      return 0.5;
    case Articulation::kTenuto:
      return 0.95;
    case Articulation::kNone:
      return 0.8;
  }
  return 0.8;
}

int fold_into(int pitch, const LayerRange& r) {
  while (pitch < r.lo) pitch += 12;
  while (pitch > r.hi) pitch -= 12;
  return pitch;
}

std::vector<std::uint8_t> encode_vlq(std::uint32_t value) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(value & 0x7f));
  while (value >>= 7) out.push_back(static_cast<std::uint8_t>(0x80 | (value & 0x7f)));
  std::reverse(out.begin(), out.end());
  return out;
}

Rendering render(const Score& s) {
  const auto& cues = s.plan.cues;
  if (cues.empty()) throw EmptyPlan();
  check_layers(s.layers);
  Rendering r;

  Tick tick = 0;
  r.cue_ticks.push_back(0);
  for (std::size_t i = 0; i < cues.size(); ++i) {
    const auto& seg = cues[i].segment;
    const double next = i + 1 < cues.size() ? cues[i + 1].segment.start : seg.end;
    tick += std::llround((next - seg.start) * cues[i].tempo * kTicksPerSecondPerBpm);
    r.cue_ticks.push_back(tick);
    r.tempo.push_back({r.cue_ticks[i], cues[i].tempo});
  }

  const Tick bar = s.plan.meter.bar_ticks();
  for (std::size_t i = 0; i < cues.size(); ++i) {
    const assemble::Cue& cue = cues[i];
    Window w{r.cue_ticks[i],
             std::max(r.cue_ticks[i + 1], r.cue_ticks[i] + 1),
             assemble::dynamics_velocity(cue.dynamics),
             i > 0 ? assemble::dynamics_velocity(cues[i - 1].dynamics) : assemble::dynamics_velocity(cue.dynamics),
             bar,
             i > 0};
    const int melody_shift = octave_shift(cue.melody, s.layers.melody);
    const Tick span = static_cast<Tick>(cue.measures) * bar;
    for (int rep = 0; rep < cue.repeats; ++rep) {
      const Tick base = rep * span;
      for (const NoteEvent& e : cue.melody.events) {
        place(r.layers[0], w, base + e.onset, e.duration, fold_into(e.pitch + melody_shift, s.layers.melody), 0,
              e.articulation);
      }
      if (cue.counter_melody) {
        const int level = assemble::dynamics_velocity(cue.dynamics);
        for (const NoteEvent& e : cue.counter_melody->events) {
          place(r.layers[1], w, base + e.onset, e.duration, fold_into(e.pitch, s.layers.counter), e.velocity - level,
                e.articulation);
        }
      }
      for (std::size_t b = 0; b < cue.progression.bars.size() && static_cast<Tick>(b) * bar < span; ++b) {
        const BarChords& slot = cue.progression.bars[b];
        const Tick slot_len = bar / static_cast<Tick>(slot.size());
        for (std::size_t k = 0; k < slot.size(); ++k) {
          const ChordSymbol& c = slot[k];
          const Tick at = base + static_cast<Tick>(b) * bar + static_cast<Tick>(k) * slot_len;
          const int root = place_in_octave(c.root, s.layers.chords.lo);
          std::vector<int> voicing;
          for (int iv : quality_intervals(c.quality)) voicing.push_back(fold_into(root + iv, s.layers.chords));
          std::sort(voicing.begin(), voicing.end());
          for (int p : voicing) place(r.layers[2], w, at, slot_len, p, 0, Articulation::kNone);
          const int bass = place_in_octave(c.bass.value_or(c.root), s.layers.bass.lo);
          place(r.layers[3], w, at, slot_len, bass, 0, Articulation::kNone);
        }
      }
    }
  }
  return r;
}

std::vector<std::uint8_t> write_midi(const Score& s) {
  const Rendering r = render(s);
  const Tick end = r.cue_ticks.back();
  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 1};
  put_be(out, kTrackCount, 2);
  put_be(out, kPpq, 2);

  std::vector<Event> meta;
  meta.push_back({0, 0, 0, {0xff, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08}});
  for (const TempoChange& t : r.tempo) {
    const auto us = static_cast<std::uint32_t>(std::llround(60'000'000.0 / t.bpm));
    meta.push_back({t.tick, 0, 0,
                    {0xff, 0x51, 0x03, static_cast<std::uint8_t>(us >> 16), static_cast<std::uint8_t>(us >> 8),
                     static_cast<std::uint8_t>(us)}});
  }
  const auto t0 = track_chunk(std::move(meta), end);
  out.insert(out.end(), t0.begin(), t0.end());

  for (std::size_t layer = 0; layer < r.layers.size(); ++layer) {
    const auto ch = static_cast<std::uint8_t>(layer);
    std::vector<Event> events;
    Tick last = end;
    for (const PlacedNote& n : r.layers[layer]) {
      const auto p = static_cast<std::uint8_t>(n.pitch);
      events.push_back({n.on, 2, n.pitch, {static_cast<std::uint8_t>(0x90 | ch), p, static_cast<std::uint8_t>(n.velocity)}});
      events.push_back({n.off, 1, n.pitch, {static_cast<std::uint8_t>(0x80 | ch), p, 0}});
      last = std::max(last, n.off);
    }
    const auto chunk = track_chunk(std::move(events), last);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

}  // namespace filmscore::emit
