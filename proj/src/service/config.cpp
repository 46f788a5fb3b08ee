#include <json.hpp>

#include "filmscore/service.h"

namespace filmscore::service {

using nlohmann::json;

namespace {

double number_at(const json& obj, const char* key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw SchemaError(path + key, "must be a number");
  return obj[key].get<double>();
}

int int_at(const json& obj, const char* key, int fallback, int min, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer() || obj[key].get<long long>() < min) {
    throw SchemaError(path + key, "must be an integer >= " + std::to_string(min));
  }
  return obj[key].get<int>();
}

const json& object_at(const json& obj, const char* key, const std::string& path) {
  static const json empty = json::object();
  if (!obj.contains(key)) return empty;
  if (!obj[key].is_object()) throw SchemaError(path + key, "must be an object");
  return obj[key];
}

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw SchemaError(path, "must be positive");
}

}  // namespace

Config config_from_json(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("", "config must be a JSON object");
  Config c;
  c.melody_pool_size = int_at(doc, "melody_pool_size", c.melody_pool_size, 1, "");
  c.chord_pool_size = int_at(doc, "chord_pool_size", c.chord_pool_size, 1, "");
  c.characters = int_at(doc, "characters", c.characters, 1, "");
  c.candidates = int_at(doc, "candidates", c.candidates, 1, "");

  const json& arc = object_at(doc, "arc", "");
  c.arc.window = number_at(arc, "window", c.arc.window, "arc.");
  c.arc.stride = number_at(arc, "stride", c.arc.stride, "arc.");
  positive(c.arc.window, "arc.window");
  positive(c.arc.stride, "arc.stride");

  const json& seg = object_at(doc, "segment", "");
  c.segment.stride = number_at(seg, "stride", c.segment.stride, "segment.");
  c.segment.dominance_window = number_at(seg, "dominance_window", c.segment.dominance_window, "segment.");
  c.segment.min_segment_len = number_at(seg, "min_segment_len", c.segment.min_segment_len, "segment.");
  c.segment.emotion_margin = number_at(seg, "emotion_margin", c.segment.emotion_margin, "segment.");
  positive(c.segment.stride, "segment.stride");
  positive(c.segment.dominance_window, "segment.dominance_window");
  if (c.segment.min_segment_len < 0.0) throw SchemaError("segment.min_segment_len", "must be non-negative");
  const json& pw = object_at(seg, "pacing_weights", "segment.");
  c.segment.pacing.movement = number_at(pw, "movement", c.segment.pacing.movement, "segment.pacing_weights.");
  c.segment.pacing.panning = number_at(pw, "panning", c.segment.pacing.panning, "segment.pacing_weights.");
  c.segment.pacing.zoom = number_at(pw, "zoom", c.segment.pacing.zoom, "segment.pacing_weights.");
  c.segment.pacing.cut_change = number_at(pw, "cut_change", c.segment.pacing.cut_change, "segment.pacing_weights.");

  const json& sel = object_at(doc, "selection", "");
  c.weights.w_fit = number_at(sel, "w_fit", c.weights.w_fit, "selection.");
  c.weights.w_contrast = number_at(sel, "w_contrast", c.weights.w_contrast, "selection.");
  const json& fw = object_at(sel, "field_weights", "selection.");
  for (const auto& [name, value] : fw.items()) {
    const auto f = annotate::parse_field(name);
    if (!f) throw SchemaError("selection.field_weights." + name, "unknown field");
    if (!value.is_number() || value.get<double>() < 0.0) {
      throw SchemaError("selection.field_weights." + name, "must be a non-negative number");
    }
    c.weights.field[static_cast<std::size_t>(*f)] = value.get<double>();
  }

  if (doc.contains("mapping")) {
    try {
      c.mapping = assemble::mapping_from_json(doc["mapping"].dump());
    } catch (const SchemaError& e) {
      throw SchemaError("mapping." + e.path(), e.reason());
    }
  }
  return c;
}

std::string config_to_json(const Config& c) {
  json doc;
  doc["melody_pool_size"] = c.melody_pool_size;
  doc["chord_pool_size"] = c.chord_pool_size;
  doc["characters"] = c.characters;
  doc["candidates"] = c.candidates;
  doc["arc"] = {{"window", c.arc.window}, {"stride", c.arc.stride}};
  doc["segment"] = {
      {"stride", c.segment.stride},
      {"dominance_window", c.segment.dominance_window},
      {"min_segment_len", c.segment.min_segment_len},
      {"emotion_margin", c.segment.emotion_margin},
      {"pacing_weights",
       {{"movement", c.segment.pacing.movement},
        {"panning", c.segment.pacing.panning},
        {"zoom", c.segment.pacing.zoom},
        {"cut_change", c.segment.pacing.cut_change}}},
  };
  json fw = json::object();
  for (std::size_t f = 0; f < annotate::kFieldCount; ++f) {
    fw[annotate::field_name(static_cast<annotate::Field>(f))] = c.weights.field[f];
  }
  doc["selection"] = {{"w_fit", c.weights.w_fit}, {"w_contrast", c.weights.w_contrast}, {"field_weights", fw}};
  doc["mapping"] = json::parse(assemble::mapping_to_json(c.mapping));
  return doc.dump(2) + "\n";
}

}  // namespace filmscore::service
