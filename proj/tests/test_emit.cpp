#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "filmscore/corpus.h"
#include "filmscore/emit.h"
#include "filmscore/generate.h"
#include "fixtures.h"
#include "smf_reader.h"

using namespace filmscore;
using vision::Emotion;

namespace {

struct Fixture {
  annotate::PoolManifest melodies;
  annotate::PoolManifest progressions;
};

const Fixture& pools() {
  static const Fixture f = [] {
    Fixture x;
    const auto tunes = corpus::parse_melody_corpus(fixtures::read("melodies.abc")).melodies;
    const auto sheet = corpus::parse_chord_sheet(fixtures::read("chords.txt"));
    x.melodies = annotate::melody_manifest(generate::generate_melody_pool(tunes, 20, Rng(6)), 6);
    x.progressions = annotate::progression_manifest(generate::generate_chord_pool(sheet, 20, Rng(6)), 6);
    return x;
  }();
  return f;
}

vision::SegmentAnnotation seg(double s, double e, std::optional<std::string> who, Emotion emo) {
  vision::SegmentAnnotation a;
  a.start = s;
  a.end = e;
  a.dominant_character = std::move(who);
  a.dominant_emotion = emo;
  a.pacing = 0.5;
  return a;
}

emit::Score score() {
  const std::vector<vision::SegmentAnnotation> segs = {
      seg(0, 20, "a", Emotion::kHappy), seg(20, 44, "b", Emotion::kSad), seg(44, 52, std::nullopt, Emotion::kSurprise),
      seg(52, 70, "a", Emotion::kAngry), seg(70, 90, "b", Emotion::kNeutral)};
  const assemble::Assignment asg = {{"a", {"m0001", "c0001"}}, {"b", {"m0002", "c0002"}}};
  emit::Score s;
  s.plan = assemble::build_cue_plan(segs, {"a", "b"}, asg, {&pools().melodies, &pools().progressions},
                                    assemble::default_mapping(), Rng(17));
  return s;
}

std::uint32_t decode_vlq(const std::vector<std::uint8_t>& b) {
  std::uint32_t v = 0;
  for (auto x : b) v = (v << 7) | (x & 0x7f);
  return v;
}

}  // namespace

TEST(Vlq, KnownEncodings) {
  // Examples from the MIDI file format description.
  const std::vector<std::pair<std::uint32_t, std::vector<std::uint8_t>>> table = {
      {0x00, {0x00}},
      {0x40, {0x40}},
      {0x7F, {0x7F}},
      {0x80, {0x81, 0x00}},
      {0x2000, {0xC0, 0x00}},
      {0x3FFF, {0xFF, 0x7F}},
      {0x4000, {0x81, 0x80, 0x00}},
      {0x100000, {0xC0, 0x80, 0x00}},
      {0x1FFFFF, {0xFF, 0xFF, 0x7F}},
      {0x200000, {0x81, 0x80, 0x80, 0x00}},
      {0x0FFFFFFF, {0xFF, 0xFF, 0xFF, 0x7F}},
  };
  for (const auto& [v, bytes] : table) EXPECT_EQ(emit::encode_vlq(v), bytes) << v;
}

TEST(Vlq, RoundTripAndMinimal) {
  for (std::uint32_t v = 0; v < 0x0FFFFFFF; v = v * 3 + 1) {
    const auto b = emit::encode_vlq(v);
    EXPECT_EQ(decode_vlq(b), v);
    EXPECT_NE(b.front(), 0x80);  // no leading zero groups
    EXPECT_EQ(b.back() & 0x80, 0);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) EXPECT_NE(b[i] & 0x80, 0);
  }
}

TEST(Midi, IndependentReaderAcceptsFile) {
  const auto s = score();
  const auto bytes = emit::write_midi(s);
  const smf::File f = smf::read(bytes);
  EXPECT_EQ(f.format, 1);
  EXPECT_EQ(f.division, 480);
  ASSERT_EQ(f.tracks.size(), 5u);
  for (const auto& t : f.tracks) EXPECT_TRUE(t.ended);
  EXPECT_TRUE(smf::notes(f.tracks[0]).empty());

  const emit::Layers layers;
  const std::array<emit::LayerRange, 4> ranges = {layers.melody, layers.counter, layers.chords, layers.bass};
  for (int layer = 0; layer < 4; ++layer) {
    const auto notes = smf::notes(f.tracks[layer + 1]);
    if (layer != 1) EXPECT_FALSE(notes.empty()) << layer;
    for (const auto& n : notes) {
      EXPECT_TRUE(ranges[layer].contains(n.pitch)) << "layer " << layer << " pitch " << n.pitch;
      EXPECT_EQ(n.channel, layer);
      EXPECT_LT(n.on, n.off);
      EXPECT_GE(n.velocity, 1);
    }
  }
}

TEST(Midi, TempoMapFollowsCues) {
  const auto s = score();
  const auto r = emit::render(s);
  const auto t = smf::tempos(smf::read(emit::write_midi(s)).tracks[0]);
  ASSERT_EQ(t.size(), s.plan.cues.size());
  double seconds = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t[i].first, static_cast<std::uint64_t>(r.cue_ticks[i]));
    EXPECT_EQ(t[i].second, static_cast<std::uint32_t>(std::llround(60e6 / s.plan.cues[i].tempo)));
    // Tick positions reproduce wall-clock cue starts.
    EXPECT_NEAR(seconds, s.plan.cues[i].segment.start, 0.01);
    seconds += (r.cue_ticks[i + 1] - r.cue_ticks[i]) * (t[i].second / 1e6) / 480.0;
  }
  EXPECT_NEAR(seconds, s.plan.cues.back().segment.end, 0.01);
}

TEST(Midi, NotesStayInsideTheirCue) {
  const auto s = score();
  const auto r = emit::render(s);
  for (const auto& layer : r.layers) {
    for (const auto& n : layer) {
      EXPECT_LT(n.on, r.cue_ticks.back());
      std::size_t cue = 0;
      while (r.cue_ticks[cue + 1] <= n.on) ++cue;
      EXPECT_LE(n.off, r.cue_ticks[cue + 1]);
    }
  }
}

TEST(Midi, ByteDeterministic) {
  EXPECT_EQ(emit::write_midi(score()), emit::write_midi(score()));
}

TEST(Midi, ArticulationGates) {
  EXPECT_LT(emit::gate_ratio(Articulation::kStaccato), emit::gate_ratio(Articulation::kNone));
  EXPECT_LT(emit::gate_ratio(Articulation::kNone), emit::gate_ratio(Articulation::kTenuto));
  EXPECT_LE(emit::gate_ratio(Articulation::kTenuto), 1.0);
  const emit::LayerRange r{48, 59};
  for (int p = 0; p < 128; ++p) {
    const int f = emit::fold_into(p, r);
    EXPECT_TRUE(r.contains(f));
    EXPECT_EQ((f - p) % 12, 0);
  }
}

TEST(Midi, EmptyPlanAndBadLayers) {
  emit::Score empty;
  EXPECT_THROW(emit::write_midi(empty), EmptyPlan);
  auto s = score();
  s.layers.counter = {55, 71};
  EXPECT_THROW(emit::write_midi(s), Error);
  s.layers.counter = {62, 70};
  EXPECT_THROW(emit::write_midi(s), Error);
}

TEST(ChordSheet, OneLinePerCue) {
  const auto s = score();
  const std::string text = emit::write_chord_sheet(s);
  std::istringstream in(text);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const auto& c = s.plan.cues[i];
    char head[64];
    std::snprintf(head, sizeof head, "%zu %.2f %d: ", i + 1, c.segment.start, c.tempo);
    EXPECT_EQ(line.rfind(head, 0), 0u) << line;
    const auto back = corpus::parse_chord_sheet(line.substr(std::strlen(head)));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].bars, c.progression.bars);
    ++i;
  }
  EXPECT_EQ(i, s.plan.cues.size());
}

TEST(Timeline, ReflectsThePlan) {
  const auto s = score();
  const auto doc = nlohmann::json::parse(emit::write_timeline(s));
  EXPECT_EQ(doc["version"], "1");
  EXPECT_EQ(doc["duration"], 90.0);
  ASSERT_EQ(doc["cues"].size(), s.plan.cues.size());
  for (std::size_t i = 0; i < s.plan.cues.size(); ++i) {
    const auto& c = s.plan.cues[i];
    const auto& j = doc["cues"][i];
    EXPECT_EQ(j["index"], i + 1);
    EXPECT_EQ(j["start"], c.segment.start);
    EXPECT_EQ(j["tempo"], c.tempo);
    EXPECT_EQ(j["melody"], c.melody_id);
    EXPECT_EQ(j["emotion"], vision::emotion_name(c.emotion));
    EXPECT_EQ(j["reharmonized"], c.reharmonized);
    EXPECT_EQ(j["counter_melody"], c.counter_melody.has_value());
  }
  EXPECT_TRUE(doc["cues"][2]["character"].is_null());
  EXPECT_TRUE(doc["cues"][2]["variation"].get<bool>());
}
