#include <algorithm>

#include <json.hpp>

#include "filmscore/assemble.h"

namespace filmscore::assemble {

using nlohmann::json;

namespace {

struct DefaultRow {
  Emotion emotion;
  int tempo_lo, tempo_hi;
  Dynamics dynamics;
  Articulation articulation;
  Mode mode;
  int velocity_variation;
  double density;
  Treatment treatment;
  // Midpoints in Field order, tempo fields omitted.
  std::array<double, 13> mids;
};

constexpr Articulation kStac = Articulation::kStaccato;
constexpr Articulation kTen = Articulation::kTenuto;
constexpr Articulation kPlain = Articulation::kNone;
constexpr Treatment kCounter = Treatment::kCounterMelody;
constexpr Treatment kReharm = Treatment::kReharmonize;

//  harm_cons harm_cplx pitch_var int_size int_dir int_cons rh_reg rh_var asc desc cont_var chord_cons chord_var
constexpr std::array<DefaultRow, 7> kDefaults = {{
    {Emotion::kHappy, 100, 130, Dynamics::kMf, kStac, Mode::kMajor, 6, 0.75, kCounter,
     {0.05, 0.55, 0.30, 0.20, 0.20, 0.70, 0.60, 0.20, 0.60, 0.30, 0.40, 0.10, 0.60}},
    {Emotion::kAngry, 120, 150, Dynamics::kF, kStac, Mode::kMinor, 12, 0.90, kReharm,
     {0.30, 0.70, 0.40, 0.30, 0.00, 0.40, 0.30, 0.40, 0.45, 0.45, 0.60, 0.80, 0.70}},
    {Emotion::kSad, 60, 80, Dynamics::kP, kTen, Mode::kMinor, 6, 0.35, kCounter,
     {0.10, 0.45, 0.20, 0.12, -0.20, 0.70, 0.70, 0.10, 0.30, 0.60, 0.30, 0.20, 0.40}},
    {Emotion::kNeutral, 85, 105, Dynamics::kMf, kPlain, Mode::kMajor, 0, 0.50, kCounter,
     {0.10, 0.50, 0.25, 0.15, 0.00, 0.65, 0.60, 0.20, 0.45, 0.45, 0.40, 0.30, 0.50}},
    {Emotion::kFear, 70, 110, Dynamics::kP, kPlain, Mode::kMinor, 8, 0.50, kReharm,
     {0.30, 0.60, 0.15, 0.08, 0.00, 0.40, 0.40, 0.30, 0.40, 0.40, 0.50, 0.70, 0.50}},
    {Emotion::kDisgust, 70, 100, Dynamics::kMf, kPlain, Mode::kMinor, 6, 0.50, kReharm,
     {0.30, 0.60, 0.30, 0.20, -0.10, 0.50, 0.50, 0.30, 0.40, 0.50, 0.50, 0.75, 0.50}},
    {Emotion::kSurprise, 90, 140, Dynamics::kF, kPlain, Mode::kMajor, 12, 0.70, kCounter,
     {0.20, 0.60, 0.45, 0.35, 0.10, 0.50, 0.40, 0.40, 0.50, 0.40, 0.60, 0.40, 0.60}},
}};

constexpr std::array<Field, 13> kTargetFields = {
    Field::kHarmonyConsonance, Field::kHarmonyComplexity, Field::kPitchVariation,   Field::kIntervalSize,
    Field::kIntervalDirection, Field::kIntervalConsonance, Field::kRhythmRegularity, Field::kRhythmVariation,
    Field::kContourAscending,  Field::kContourDescending,  Field::kContourVariation, Field::kChordConsonance,
    Field::kChordVariation,
};

void sync_tempo_targets(EmotionRow& r) {
  r.targets[static_cast<std::size_t>(Field::kTempoMin)] = {double(r.tempo_lo), double(r.tempo_lo)};
  r.targets[static_cast<std::size_t>(Field::kTempoMax)] = {double(r.tempo_hi), double(r.tempo_hi)};
}

template <typename Enum, std::size_t N>
Enum parse_name(const json& v, const std::array<std::pair<const char*, Enum>, N>& names, const std::string& path) {
  if (v.is_string()) {
    for (const auto& [name, value] : names) {
      if (v.get<std::string>() == name) return value;
    }
  }
  std::string allowed;
  for (const auto& [name, _] : names) allowed += std::string(allowed.empty() ? "" : ", ") + name;
  throw SchemaError(path, "must be one of " + allowed);
}

constexpr std::array<std::pair<const char*, Dynamics>, 3> kDynamicsNames = {
    {{"p", Dynamics::kP}, {"mf", Dynamics::kMf}, {"f", Dynamics::kF}}};
constexpr std::array<std::pair<const char*, Articulation>, 3> kArticulationNames = {
    {{"none", kPlain}, {"staccato", kStac}, {"tenuto", kTen}}};
constexpr std::array<std::pair<const char*, Mode>, 2> kModeNames = {{{"major", Mode::kMajor}, {"minor", Mode::kMinor}}};
constexpr std::array<std::pair<const char*, Treatment>, 2> kTreatmentNames = {
    {{"counter_melody", kCounter}, {"reharmonize", kReharm}}};
constexpr std::array<std::pair<const char*, annotate::MinorScale>, 2> kMinorNames = {
    {{"natural", annotate::MinorScale::kNatural}, {"harmonic", annotate::MinorScale::kHarmonic}}};

template <typename Enum, std::size_t N>
const char* name_of(Enum e, const std::array<std::pair<const char*, Enum>, N>& names) {
  for (const auto& [name, value] : names) {
    if (value == e) return name;
  }
  return "";
}

Range parse_range(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw SchemaError(path, "must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

int dynamics_velocity(Dynamics d) {
  switch (d) {
    case Dynamics::kP:
      return 48;
    case Dynamics::kMf:
      return 72;
    case Dynamics::kF:
      return 96;
  }
  return 72;
}

const char* dynamics_name(Dynamics d) { return name_of(d, kDynamicsNames); }
const char* articulation_name(Articulation a) { return name_of(a, kArticulationNames); }

int EmotionRow::contour_bias() const {
  const double up = targets[static_cast<std::size_t>(Field::kContourAscending)].mid();
  const double down = targets[static_cast<std::size_t>(Field::kContourDescending)].mid();
  if (up > down) return 1;
  if (down > up) return -1;
  return 0;
}

EmotionMusicMapping default_mapping() {
  EmotionMusicMapping m;
  for (const DefaultRow& d : kDefaults) {
    EmotionRow& r = m.row(d.emotion);
    r.tempo_lo = d.tempo_lo;
    r.tempo_hi = d.tempo_hi;
    r.dynamics = d.dynamics;
    r.articulation = d.articulation;
    r.mode = d.mode;
    r.velocity_variation = d.velocity_variation;
    r.density = d.density;
    r.treatment = d.treatment;
    for (std::size_t i = 0; i < kTargetFields.size(); ++i) {
      const Field f = kTargetFields[i];
      const double half = f == Field::kChordConsonance ? 0.05 : 0.1;
      const auto [lo, hi] = annotate::field_bounds(f);
      r.targets[static_cast<std::size_t>(f)] = {std::max(lo, d.mids[i] - half), std::min(hi, d.mids[i] + half)};
    }
    sync_tempo_targets(r);
  }
  return m;
}

void validate_mapping(const EmotionMusicMapping& m) {
  for (Emotion e : vision::kAllEmotions) {
    const EmotionRow& r = m.row(e);
    const std::string path = std::string("emotions.") + vision::emotion_name(e);
    if (r.tempo_lo < 20 || r.tempo_hi > 300 || r.tempo_lo > r.tempo_hi) {
      throw SchemaError(path + ".tempo", "must satisfy 20 <= lo <= hi <= 300");
    }
    if (r.velocity_variation < 0 || r.velocity_variation > 12) {
      throw SchemaError(path + ".velocity_variation", "must be in [0, 12]");
    }
    if (!(r.density >= 0.0 && r.density <= 1.0)) throw SchemaError(path + ".density", "must be in [0, 1]");
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      const Range& rg = r.targets[f];
      const auto [lo, hi] = annotate::field_bounds(static_cast<Field>(f));
      const bool tempo = f == static_cast<std::size_t>(Field::kTempoMin) || f == static_cast<std::size_t>(Field::kTempoMax);
      if (!(rg.lo <= rg.hi) || (!tempo && (rg.lo < lo || rg.hi > hi))) {
        throw SchemaError(path + ".targets." + annotate::field_name(static_cast<Field>(f)),
                          "range must be well formed and inside the field bounds");
      }
    }
  }
}

EmotionMusicMapping mapping_from_json(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("", "mapping must be a JSON object");
  EmotionMusicMapping m = default_mapping();
  if (doc.contains("minor_scale")) m.minor_scale = parse_name(doc["minor_scale"], kMinorNames, "minor_scale");
  if (doc.contains("emotions")) {
    const json& rows = doc["emotions"];
    if (!rows.is_object()) throw SchemaError("emotions", "must be an object");
    for (const auto& [key, row] : rows.items()) {
      const auto e = vision::parse_emotion(key);
      const std::string path = "emotions." + key;
      if (!e) throw SchemaError(path, "unknown emotion");
      if (!row.is_object()) throw SchemaError(path, "must be an object");
      EmotionRow& r = m.row(*e);
      if (row.contains("tempo")) {
        const json& t = row["tempo"];
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer()) {
          throw SchemaError(path + ".tempo", "must be [lo, hi] integers");
        }
        r.tempo_lo = t[0].get<int>();
        r.tempo_hi = t[1].get<int>();
      }
      if (row.contains("dynamics")) r.dynamics = parse_name(row["dynamics"], kDynamicsNames, path + ".dynamics");
      if (row.contains("articulation")) {
        r.articulation = parse_name(row["articulation"], kArticulationNames, path + ".articulation");
      }
      if (row.contains("mode")) r.mode = parse_name(row["mode"], kModeNames, path + ".mode");
      if (row.contains("treatment")) r.treatment = parse_name(row["treatment"], kTreatmentNames, path + ".treatment");
      if (row.contains("velocity_variation")) {
        if (!row["velocity_variation"].is_number_integer()) {
          throw SchemaError(path + ".velocity_variation", "must be an integer");
        }
        r.velocity_variation = row["velocity_variation"].get<int>();
      }
      if (row.contains("density")) {
        if (!row["density"].is_number()) throw SchemaError(path + ".density", "must be a number");
        r.density = row["density"].get<double>();
      }
      if (row.contains("targets")) {
        const json& targets = row["targets"];
        if (!targets.is_object()) throw SchemaError(path + ".targets", "must be an object");
        for (const auto& [fname, range] : targets.items()) {
          const auto f = annotate::parse_field(fname);
          if (!f || *f == Field::kTempoMin || *f == Field::kTempoMax) {
            throw SchemaError(path + ".targets." + fname, "unknown target field");
          }
          r.targets[static_cast<std::size_t>(*f)] = parse_range(range, path + ".targets." + fname);
        }
      }
      sync_tempo_targets(r);
    }
  }
  validate_mapping(m);
  return m;
}

std::string mapping_to_json(const EmotionMusicMapping& m) {
  json doc;
  doc["minor_scale"] = name_of(m.minor_scale, kMinorNames);
  json rows = json::object();
  for (Emotion e : vision::kAllEmotions) {
    const EmotionRow& r = m.row(e);
    json row;
    row["tempo"] = {r.tempo_lo, r.tempo_hi};
    row["dynamics"] = dynamics_name(r.dynamics);
    row["articulation"] = articulation_name(r.articulation);
    row["mode"] = name_of(r.mode, kModeNames);
    row["treatment"] = name_of(r.treatment, kTreatmentNames);
    row["velocity_variation"] = r.velocity_variation;
    row["density"] = r.density;
    json targets = json::object();
    for (Field f : kTargetFields) {
      const Range& rg = r.targets[static_cast<std::size_t>(f)];
      targets[annotate::field_name(f)] = {rg.lo, rg.hi};
    }
    row["targets"] = targets;
    rows[vision::emotion_name(e)] = row;
  }
  doc["emotions"] = rows;
  return doc.dump(2);
}

std::array<int, 7> mode_scale(Mode mode, annotate::MinorScale minor) {
  return mode == Mode::kMajor ? annotate::c_major_scale() : annotate::c_minor_scale(minor);
}

AnnotationVector emotion_target(const vision::EmotionVector& profile, const EmotionMusicMapping& mapping) {
  AnnotationVector out;
  const double total = profile.sum();
  if (!(total > 0.0)) {
    const EmotionRow& r = mapping.row(Emotion::kNeutral);
    for (std::size_t f = 0; f < kFieldCount; ++f) out.v[f] = r.targets[f].mid();
    return out;
  }
  for (Emotion e : vision::kAllEmotions) {
    const double w = profile[e] / total;
    if (w == 0.0) continue;
    const EmotionRow& r = mapping.row(e);
    for (std::size_t f = 0; f < kFieldCount; ++f) out.v[f] += w * r.targets[f].mid();
  }
  return out;
}

}  // namespace filmscore::assemble
