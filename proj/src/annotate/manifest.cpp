#include <cstdio>

#include <json.hpp>

#include "filmscore/annotate.h"
#include "filmscore/corpus.h"
#include "filmscore/rng.h"

namespace filmscore::annotate {

using nlohmann::json;

const Candidate* PoolManifest::find(std::string_view id) const {
  for (const Candidate& c : candidates) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string candidate_id(PoolKind kind, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%04zu", kind == PoolKind::kMelody ? 'm' : 'c', index + 1);
  return buf;
}

PoolManifest melody_manifest(const std::vector<Melody>& pool, std::uint64_t seed, MinorScale minor) {
  PoolManifest out{PoolKind::kMelody, seed, {}};
  const Rng root(seed);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Candidate c;
    c.id = candidate_id(PoolKind::kMelody, i);
    c.seed = root.substream("melody", i).seed();
    c.notation = corpus::format_abc(pool[i], static_cast<int>(i + 1));
    c.annotation = annotate_melody(pool[i], minor);
    c.melody = pool[i];
    out.candidates.push_back(std::move(c));
  }
  return out;
}

PoolManifest progression_manifest(const std::vector<ChordProgression>& pool, std::uint64_t seed,
                                  MinorScale minor) {
  PoolManifest out{PoolKind::kProgression, seed, {}};
  const Rng root(seed);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Candidate c;
    c.id = candidate_id(PoolKind::kProgression, i);
    c.seed = root.substream("progression", i).seed();
    c.notation = corpus::format_progression(pool[i]);
    c.annotation = progression_vector(pool[i], minor);
    c.progression = pool[i];
    out.candidates.push_back(std::move(c));
  }
  return out;
}

std::string manifest_to_json(const PoolManifest& m) {
  json doc;
  doc["version"] = "1";
  doc["kind"] = m.kind == PoolKind::kMelody ? "melody" : "progression";
  doc["seed"] = m.seed;
  json list = json::array();
  for (const Candidate& c : m.candidates) {
    json item;
    item["id"] = c.id;
    item["seed"] = c.seed;
    item["notation"] = c.notation;
    json ann = json::object();
    for (std::size_t f = 0; f < kFieldCount; ++f) ann[field_name(static_cast<Field>(f))] = c.annotation.v[f];
    item["annotation"] = ann;
    if (c.melody) {
      item["length_bars"] = c.melody->length_bars;
      json events = json::array();
      for (const NoteEvent& e : c.melody->events) events.push_back({e.onset, e.duration, e.pitch});
      item["events"] = events;
    }
    list.push_back(std::move(item));
  }
  doc["candidates"] = std::move(list);
  return doc.dump(1);
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(path + key, "required");
  return obj.at(key);
}

}  // namespace

PoolManifest manifest_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("", "not valid JSON");
  PoolManifest out;
  const json& kind = require(doc, "kind", "");
  if (kind == "melody") {
    out.kind = PoolKind::kMelody;
  } else if (kind == "progression") {
    out.kind = PoolKind::kProgression;
  } else {
    throw SchemaError("kind", "must be \"melody\" or \"progression\"");
  }
  const json& seed = require(doc, "seed", "");
  if (!seed.is_number_unsigned()) throw SchemaError("seed", "must be a non-negative integer");
  out.seed = seed.get<std::uint64_t>();

  const json& list = require(doc, "candidates", "");
  if (!list.is_array()) throw SchemaError("candidates", "must be an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "candidates[" + std::to_string(i) + "].";
    const json& item = list[i];
    Candidate c;
    const json& id = require(item, "id", path);
    if (!id.is_string()) throw SchemaError(path + "id", "must be a string");
    c.id = id.get<std::string>();
    if (item.contains("seed") && item["seed"].is_number_unsigned()) c.seed = item["seed"].get<std::uint64_t>();
    const json& notation = require(item, "notation", path);
    if (!notation.is_string()) throw SchemaError(path + "notation", "must be a string");
    c.notation = notation.get<std::string>();
    const json& ann = require(item, "annotation", path);
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      const char* name = field_name(static_cast<Field>(f));
      const json& val = require(ann, name, path + "annotation.");
      if (!val.is_number()) throw SchemaError(path + "annotation." + name, "must be a number");
      c.annotation.v[f] = val.get<double>();
    }
    if (out.kind == PoolKind::kMelody) {
      Melody m;
      m.key_tonic = PitchClass(0);
      const json& bars = require(item, "length_bars", path);
      if (!bars.is_number_integer()) throw SchemaError(path + "length_bars", "must be an integer");
      m.length_bars = bars.get<int>();
      const json& events = require(item, "events", path);
      if (!events.is_array()) throw SchemaError(path + "events", "must be an array");
      for (std::size_t k = 0; k < events.size(); ++k) {
        const json& e = events[k];
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_number_integer()) {
          throw SchemaError(path + "events[" + std::to_string(k) + "]", "must be [onset, duration, pitch]");
        }
        NoteEvent ev;
        ev.onset = e[0].get<Tick>();
        ev.duration = e[1].get<Tick>();
        ev.pitch = e[2].get<int>();
        m.events.push_back(ev);
      }
      std::string why;
      if (!is_valid_melody(m, &why)) throw SchemaError(path + "events", why);
      c.melody = std::move(m);
    } else {
      try {
        auto parsed = corpus::parse_chord_sheet(c.notation);
        if (parsed.size() != 1) throw SchemaError(path + "notation", "must hold exactly one progression");
        c.progression = std::move(parsed.front());
      } catch (const MalformedChord& e) {
        throw SchemaError(path + "notation", e.what());
      } catch (const EmptyCorpus&) {
        throw SchemaError(path + "notation", "empty progression");
      }
    }
    if (out.find(c.id)) throw SchemaError(path + "id", "duplicate id");
    out.candidates.push_back(std::move(c));
  }
  return out;
}

}  // namespace filmscore::annotate
