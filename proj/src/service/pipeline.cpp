#include <set>

#include <json.hpp>

#include "filmscore/corpus.h"
#include "filmscore/generate.h"
#include "filmscore/service.h"

namespace filmscore::service {

using nlohmann::json;

namespace {

json emotions_json(const vision::EmotionVector& v) {
  json out = json::object();
  for (vision::Emotion e : vision::kAllEmotions) out[vision::emotion_name(e)] = v[e];
  return out;
}

json candidate_object(const annotate::Candidate& c) {
  json item;
  item["id"] = c.id;
  item["seed"] = c.seed;
  item["notation"] = c.notation;
  json ann = json::object();
  for (std::size_t f = 0; f < annotate::kFieldCount; ++f) {
    ann[annotate::field_name(static_cast<annotate::Field>(f))] = c.annotation.v[f];
  }
  item["annotation"] = ann;
  if (c.melody) {
    item["length_bars"] = c.melody->length_bars;
    json events = json::array();
    for (const NoteEvent& e : c.melody->events) events.push_back({e.onset, e.duration, e.pitch});
    item["events"] = events;
  }
  if (c.progression) {
    json bars = json::array();
    for (const BarChords& bar : c.progression->bars) {
      json slot = json::array();
      for (const ChordSymbol& ch : bar) slot.push_back(corpus::format_chord(ch));
      bars.push_back(slot);
    }
    item["bars"] = bars;
  }
  return item;
}

}  // namespace

Corpora load_corpora(std::string_view abc, std::string_view chord_sheet) {
  Corpora c;
  corpus::MelodyCorpus melodies = corpus::parse_melody_corpus(abc);
  c.melodies = std::move(melodies.melodies);
  c.diagnostics = std::move(melodies.diagnostics);
  c.progressions = corpus::parse_chord_sheet(chord_sheet);
  return c;
}

std::vector<std::string> Analysis::character_ids() const {
  std::vector<std::string> ids;
  for (const auto& p : characters) ids.push_back(p.id);
  return ids;
}

Analysis analyze(vision::FilmAnalysis film, const Config& config) {
  Analysis a;
  a.film = std::move(film);
  a.characters = vision::identify_main_characters(a.film, config.characters, config.arc);
  a.segments = vision::segment_film(a.film, a.characters, config.segment);
  return a;
}

PoolSet build_pools(const Corpora& corpora, const Config& config, std::uint64_t seed) {
  const Rng root(seed);
  const auto minor = config.mapping.minor_scale;
  PoolSet p;
  p.melodies = annotate::melody_manifest(generate::generate_melody_pool(corpora.melodies, config.melody_pool_size, root),
                                         seed, minor);
  p.progressions = annotate::progression_manifest(
      generate::generate_chord_pool(corpora.progressions, config.chord_pool_size, root), seed, minor);
  return p;
}

std::vector<CharacterCandidates> choose_candidates(const Analysis& a, const PoolSet& pools, const Config& config) {
  std::vector<CharacterCandidates> out;
  std::vector<std::string> offered;
  std::optional<annotate::AnnotationVector> main_target;
  const auto k = static_cast<std::size_t>(config.candidates);
  for (const vision::CharacterProfile& p : a.characters) {
    CharacterCandidates c;
    c.character = p.id;
    c.target = assemble::emotion_target(p.aggregate, config.mapping);
    c.melodies = assemble::select_candidates(pools.melodies, c.target, k, main_target, config.weights, offered);
    c.progressions = assemble::select_candidates(pools.progressions, c.target, k, main_target, config.weights);
    offered.insert(offered.end(), c.melodies.begin(), c.melodies.end());
    if (!main_target) main_target = c.target;
    out.push_back(std::move(c));
  }
  return out;
}

assemble::Assignment default_assignment(const std::vector<CharacterCandidates>& candidates) {
  assemble::Assignment a;
  for (const auto& c : candidates) {
    if (!c.melodies.empty() && !c.progressions.empty()) a[c.character] = {c.melodies.front(), c.progressions.front()};
  }
  return a;
}

void validate_assignment(const assemble::Assignment& assignment, const Analysis& a, const PoolSet& pools) {
  const auto ids = a.character_ids();
  std::set<std::string> melodies;
  for (const auto& [character, choice] : assignment) {
    if (std::find(ids.begin(), ids.end(), character) == ids.end()) {
      throw SchemaError(character, "not a main character");
    }
    const auto* m = pools.melodies.find(choice.melody);
    if (!m) throw SchemaError(character + ".melody", "unknown melody id '" + choice.melody + "'");
    if (!pools.progressions.find(choice.progression)) {
      throw SchemaError(character + ".progression", "unknown progression id '" + choice.progression + "'");
    }
    if (!melodies.insert(choice.melody).second) {
      throw SchemaError(character + ".melody", "melody '" + choice.melody + "' is already assigned");
    }
  }
}

assemble::Assignment assignment_from_json(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("", "assignment must be a JSON object");
  assemble::Assignment a;
  for (const auto& [character, choice] : doc.items()) {
    if (!choice.is_object()) throw SchemaError(character, "must be an object");
    for (const char* key : {"melody", "progression"}) {
      if (!choice.contains(key) || !choice[key].is_string()) {
        throw SchemaError(character + "." + key, "required string");
      }
    }
    a[character] = {choice["melody"].get<std::string>(), choice["progression"].get<std::string>()};
  }
  return a;
}

std::string assignment_to_json(const assemble::Assignment& a) {
  json doc = json::object();
  for (const auto& [character, choice] : a) {
    doc[character] = {{"melody", choice.melody}, {"progression", choice.progression}};
  }
  return doc.dump(2) + "\n";
}

Artifacts render_artifacts(const Analysis& a, const PoolSet& pools, const assemble::Assignment& assignment,
                           const Config& config, std::uint64_t seed) {
  emit::Score score;
  score.plan = assemble::build_cue_plan(a.segments, a.character_ids(), assignment,
                                        {&pools.melodies, &pools.progressions}, config.mapping, Rng(seed));
  Artifacts out;
  out.midi = emit::write_midi(score);
  out.chord_sheet = emit::write_chord_sheet(score);
  out.timeline = emit::write_timeline(score);
  return out;
}

std::string candidate_json(const annotate::Candidate& c) { return candidate_object(c).dump(); }

std::string characters_json(const Analysis& a) {
  json list = json::array();
  for (std::size_t i = 0; i < a.characters.size(); ++i) {
    const vision::CharacterProfile& p = a.characters[i];
    json item;
    item["id"] = p.id;
    item["rank"] = i + 1;
    item["screen_frames"] = p.screen_frames;
    item["first_seen"] = p.first_seen;
    item["aggregate"] = emotions_json(p.aggregate);
    json arc = json::array();
    for (const auto& pt : p.arc) {
      arc.push_back({{"t", pt.t}, {"emotions", pt.emotions ? emotions_json(*pt.emotions) : json(nullptr)}});
    }
    item["arc"] = arc;
    list.push_back(std::move(item));
  }
  return json{{"characters", list}}.dump();
}

}  // namespace filmscore::service
