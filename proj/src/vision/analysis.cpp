#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "filmscore/vision.h"

namespace filmscore::vision {

using nlohmann::json;

const char* emotion_name(Emotion e) {
  switch (e) {
    case Emotion::kHappy: return "happy";
    case Emotion::kAngry: return "angry";
    case Emotion::kSad: return "sad";
    case Emotion::kNeutral: return "neutral";
    case Emotion::kFear: return "fear";
    case Emotion::kDisgust: return "disgust";
    case Emotion::kSurprise: return "surprise";
  }
  return "neutral";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  for (Emotion e : kAllEmotions) {
    if (name == emotion_name(e)) return e;
  }
  return std::nullopt;
}

Emotion EmotionVector::dominant() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kEmotionCount; ++i) {
    if (p[i] > p[best]) best = i;
  }
  return kAllEmotions[best];
}

double EmotionVector::sum() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

EmotionVector EmotionVector::normalized() const {
  const double s = sum();
  EmotionVector out = *this;
  if (s <= 0.0) return out;
  for (double& v : out.p) v /= s;
  return out;
}

EmotionVector EmotionVector::one_hot(Emotion e) {
  EmotionVector v;
  v[e] = 1.0;
  return v;
}

namespace {

double number_at(const json& obj, const char* key, const std::string& path, bool required,
                 double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw SchemaError(path.empty() ? key : path + "." + key, "required");
    return fallback;
  }
  if (!it->is_number()) throw SchemaError(path.empty() ? key : path + "." + key, "must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw SchemaError(path.empty() ? key : path + "." + key, "must be finite");
  return v;
}

double unit_number(const json& obj, const char* key, const std::string& path, double fallback) {
  const double v = number_at(obj, key, path, false, fallback);
  if (v < 0.0 || v > 1.0) throw SchemaError(path + "." + key, "must lie in [0,1]");
  return v;
}

Face parse_face(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "must be an object");
  Face face;
  const auto id = j.find("id");
  if (id == j.end()) throw SchemaError(path + ".id", "required");
  if (id->is_string()) {
    face.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    face.id = std::to_string(id->get<long long>());
  } else {
    throw SchemaError(path + ".id", "must be a string");
  }
  if (face.id.empty()) throw SchemaError(path + ".id", "must be non-empty");

  const auto bbox = j.find("bbox");
  if (bbox == j.end()) throw SchemaError(path + ".bbox", "required");
  if (!bbox->is_array() || bbox->size() != 4) throw SchemaError(path + ".bbox", "must be [x,y,w,h]");
  double comps[4];
  for (std::size_t i = 0; i < 4; ++i) {
    const json& c = (*bbox)[i];
    const std::string cpath = path + ".bbox[" + std::to_string(i) + "]";
    if (!c.is_number()) throw SchemaError(cpath, "must be a number");
    comps[i] = c.get<double>();
    if (!(comps[i] >= 0.0 && comps[i] <= 1.0)) throw SchemaError(cpath, "must lie in [0,1]");
  }
  face.bbox = {comps[0], comps[1], comps[2], comps[3]};

  const auto emotions = j.find("emotions");
  if (emotions == j.end()) throw SchemaError(path + ".emotions", "required");
  if (!emotions->is_object()) throw SchemaError(path + ".emotions", "must be an object");
  const std::string epath = path + ".emotions";
  for (Emotion e : kAllEmotions) {
    const double v = number_at(*emotions, emotion_name(e), epath, true, 0.0);
    if (v < 0.0) throw SchemaError(epath + "." + emotion_name(e), "must be non-negative");
    face.emotions[e] = v;
  }
  if (face.emotions.sum() <= 0.0) throw SchemaError(epath, "must not be all zero");
  face.emotions = face.emotions.normalized();
  return face;
}

}  // namespace

FilmAnalysis load_analysis(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "must be an object");

  FilmAnalysis a;
  a.fps = number_at(doc, "fps", "", true, 0.0);
  if (a.fps <= 0.0) throw SchemaError("fps", "must be positive");
  a.duration = number_at(doc, "duration", "", true, 0.0);
  if (a.duration < 0.0) throw SchemaError("duration", "must be non-negative");

  const auto frames = doc.find("frames");
  if (frames == doc.end()) throw SchemaError("frames", "required");
  if (!frames->is_array()) throw SchemaError("frames", "must be an array");
  if (frames->empty()) throw EmptyAnalysis();

  for (std::size_t i = 0; i < frames->size(); ++i) {
    const json& f = (*frames)[i];
    const std::string path = "frames[" + std::to_string(i) + "]";
    if (!f.is_object()) throw SchemaError(path, "must be an object");
    FrameRecord rec;
    rec.t = number_at(f, "t", path, true, 0.0);
    if (rec.t < 0.0) throw SchemaError(path + ".t", "must be non-negative");

    if (const auto faces = f.find("faces"); faces != f.end()) {
      if (!faces->is_array()) throw SchemaError(path + ".faces", "must be an array");
      for (std::size_t k = 0; k < faces->size(); ++k) {
        rec.faces.push_back(parse_face((*faces)[k], path + ".faces[" + std::to_string(k) + "]"));
      }
    }
    if (const auto aes = f.find("aesthetics"); aes != f.end()) {
      const std::string apath = path + ".aesthetics";
      if (!aes->is_object()) throw SchemaError(apath, "must be an object");
      rec.aesthetics.panning = unit_number(*aes, "panning", apath, 0.0);
      rec.aesthetics.zoom = unit_number(*aes, "zoom", apath, 0.0);
      rec.aesthetics.cut_similarity = unit_number(*aes, "cut_similarity", apath, 1.0);
      rec.aesthetics.movement = unit_number(*aes, "movement", apath, 0.0);
      rec.aesthetics.colorfulness = unit_number(*aes, "colorfulness", apath, 0.0);
    }
    a.frames.push_back(std::move(rec));
  }

  std::stable_sort(a.frames.begin(), a.frames.end(),
                   [](const FrameRecord& x, const FrameRecord& y) { return x.t < y.t; });
  for (std::size_t i = 1; i < a.frames.size(); ++i) {
    if (a.frames[i].t == a.frames[i - 1].t) {
      throw SchemaError("frames[" + std::to_string(i) + "].t", "duplicate timestamp");
    }
  }
  if (a.duration < a.frames.back().t) throw SchemaError("duration", "shorter than the last frame time");
  return a;
}

}  // namespace filmscore::vision
