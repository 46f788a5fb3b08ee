#include <algorithm>
#include <cmath>

#include "filmscore/assemble.h"

namespace filmscore::assemble {

namespace {

constexpr double kConflictFloor = 0.4;
// Characterless cues always get an ornamented variation of the main theme.
constexpr double kCharacterlessPacing = 0.85;

const Melody& melody_of(const Pools& pools, const std::string& character, const std::string& id) {
  const annotate::Candidate* c = pools.melodies ? pools.melodies->find(id) : nullptr;
  if (!c || !c->melody) throw SchemaError("assignment." + character + ".melody", "unknown melody id '" + id + "'");
  return *c->melody;
}

const ChordProgression& progression_of(const Pools& pools, const std::string& character, const std::string& id) {
  const annotate::Candidate* c = pools.progressions ? pools.progressions->find(id) : nullptr;
  if (!c || !c->progression) {
    throw SchemaError("assignment." + character + ".progression", "unknown progression id '" + id + "'");
  }
  return *c->progression;
}

}  // namespace

bool emotions_conflict(const vision::EmotionVector& a, const vision::EmotionVector& b) {
  const Emotion da = a.dominant();
  const Emotion db = b.dominant();
  return da != db && a[da] >= kConflictFloor && b[db] >= kConflictFloor;
}

CuePlan build_cue_plan(const std::vector<vision::SegmentAnnotation>& segments,
                       const std::vector<std::string>& main_characters, const Assignment& assignment,
                       const Pools& pools, const EmotionMusicMapping& mapping, const Rng& rng) {
  if (main_characters.empty()) throw InsufficientData("no main characters to score");
  for (const std::string& id : main_characters) {
    const auto it = assignment.find(id);
    if (it == assignment.end()) throw MissingAssignment(id);
    melody_of(pools, id, it->second.melody);
    progression_of(pools, id, it->second.progression);
  }
  const auto is_main = [&](const std::string& id) {
    return std::find(main_characters.begin(), main_characters.end(), id) != main_characters.end();
  };

  CuePlan plan;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const vision::SegmentAnnotation& seg = segments[i];
    Cue cue;
    cue.segment = seg;
    if (seg.dominant_character && is_main(*seg.dominant_character)) cue.character = seg.dominant_character;
    cue.theme_character = cue.character.value_or(main_characters.front());
    const LeitmotifChoice& choice = assignment.at(cue.theme_character);
    cue.melody_id = choice.melody;
    cue.progression_id = choice.progression;
    cue.emotion = seg.dominant_emotion;
    const EmotionRow& row = mapping.row(cue.emotion);

    const Melody& theme = melody_of(pools, cue.theme_character, choice.melody);
    const ChordProgression harmony =
        tile_progression(progression_of(pools, cue.theme_character, choice.progression), std::max(1, theme.length_bars));
    const Melody fitted = reconcile(theme, harmony);

    const TempoFit fit = fit_tempo(seg, cue.emotion, mapping);
    cue.tempo = fit.tempo;
    cue.measures = std::min(fit.measures, std::max(1, theme.length_bars));
    cue.variation = !cue.character.has_value();
    const double pacing = cue.variation ? std::max(seg.pacing, kCharacterlessPacing) : seg.pacing;
    Rng vrng = rng.substream("variation", i);
    cue.melody = make_variation(fitted, cue.measures, cue.emotion, pacing, vrng, mapping, harmony);
    cue.progression = tile_progression(harmony, cue.measures);

    const double base = cue_seconds(cue.measures, cue.tempo);
    cue.repeats = std::max(1, static_cast<int>(std::floor((seg.length() + cue.bar_seconds()) / base + 1e-9)));
    cue.dynamics = row.dynamics;
    cue.articulation = row.articulation;

    // Two most present main characters with clashing emotions: the counter
    // line speaks for the one that is not carrying the theme.
    std::vector<const vision::CharacterPresence*> present;
    for (const auto& cp : seg.present) {
      if (is_main(cp.id) && cp.share > 0.0) present.push_back(&cp);
    }
    std::optional<Emotion> counter;
    if (present.size() >= 2 && emotions_conflict(present[0]->emotions, present[1]->emotions)) {
      const vision::CharacterPresence* secondary = present[0]->id == cue.theme_character ? present[1] : present[0];
      counter = secondary->emotions.dominant();
    } else if (row.treatment == Treatment::kCounterMelody) {
      counter = cue.emotion;
    }

    if (counter) {
      Rng crng = rng.substream("counter", i);
      cue.counter_melody = counter_melody(cue.progression, *counter, mapping, cue.melody, crng);
      cue.counter_emotion = counter;
      cue.articulation = mapping.row(*counter).articulation;
    } else {
      cue.progression = reharmonize(cue.progression, cue.emotion, mapping);
      cue.reharmonized = true;
    }
    plan.cues.push_back(std::move(cue));
  }
  return plan;
}

}  // namespace filmscore::assemble
