#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "filmscore/corpus.h"
#include "filmscore/emit.h"

namespace filmscore::emit {

std::string write_chord_sheet(const Score& s) {
  std::string out;
  for (std::size_t i = 0; i < s.plan.cues.size(); ++i) {
    const assemble::Cue& cue = s.plan.cues[i];
    char head[64];
    std::snprintf(head, sizeof head, "%zu %.2f %d: ", i + 1, cue.segment.start, cue.tempo);
    out += head;
    out += corpus::format_progression(cue.progression);
    out += '\n';
  }
  return out;
}

std::string write_timeline(const Score& s) {
  using nlohmann::json;
  std::vector<const assemble::Cue*> cues;
  for (const auto& c : s.plan.cues) cues.push_back(&c);
  std::stable_sort(cues.begin(), cues.end(),
                   [](const auto* a, const auto* b) { return a->segment.start < b->segment.start; });

  json list = json::array();
  double duration = 0.0;
  for (std::size_t i = 0; i < cues.size(); ++i) {
    const assemble::Cue& c = *cues[i];
    json item;
    item["index"] = i + 1;
    item["start"] = c.segment.start;
    item["end"] = c.segment.end;
    item["character"] = c.character ? json(*c.character) : json(nullptr);
    item["theme_character"] = c.theme_character;
    item["emotion"] = vision::emotion_name(c.emotion);
    item["melody"] = c.melody_id;
    item["progression"] = c.progression_id;
    item["tempo"] = c.tempo;
    item["measures"] = c.measures;
    item["repeats"] = c.repeats;
    item["music_seconds"] = c.music_seconds();
    item["variation"] = c.variation;
    item["reharmonized"] = c.reharmonized;
    item["counter_melody"] = c.counter_melody.has_value();
    item["counter_emotion"] = c.counter_emotion ? json(vision::emotion_name(*c.counter_emotion)) : json(nullptr);
    item["dynamics"] = assemble::dynamics_name(c.dynamics);
    item["pacing"] = c.segment.pacing;
    list.push_back(std::move(item));
    duration = std::max(duration, c.segment.end);
  }
  json doc;
  doc["version"] = "1";
  doc["duration"] = duration;
  doc["cues"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace filmscore::emit
