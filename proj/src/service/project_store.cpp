#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "filmscore/service.h"

namespace filmscore::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;
const char* const kArtifacts[] = {"score.mid", "score.chords.txt", "timeline.json"};

bool valid_id(const std::string& id) {
  static const std::regex pattern("p[0-9]{4,}");
  return std::regex_match(id, pattern);
}

json parse_or_throw(std::string_view text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError(what, "not valid JSON");
  return doc;
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* render_state_name(RenderState s) {
  switch (s) {
    case RenderState::kIdle:
      return "idle";
    case RenderState::kRunning:
      return "running";
    case RenderState::kDone:
      return "done";
    case RenderState::kFailed:
      return "failed";
  }
  return "idle";
}

struct ProjectStore::Project {
  std::string id;
  fs::path dir;
  std::uint64_t seed = kDefaultSeed;
  Config config;
  Analysis analysis;
  PoolSet pools;
  std::vector<CharacterCandidates> candidates;

  std::mutex mu;
  assemble::Assignment assignment;
  RenderStatus status;
  // Bumped on every assignment change; a render publishes only if the
  // generation it started from is still current.
  std::uint64_t generation = 0;
  std::vector<std::thread> workers;
};

ProjectStore::ProjectStore(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  fs::create_directories(data_dir_ / "projects");
}

ProjectStore::~ProjectStore() {
  for (auto& [_, p] : open_) {
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(p->mu);
      workers.swap(p->workers);
    }
    for (auto& t : workers) t.join();
  }
}

fs::path ProjectStore::dir(const std::string& id) const { return data_dir_ / "projects" / id; }

std::string ProjectStore::create(const CreateRequest& req) {
  vision::FilmAnalysis film = vision::load_analysis(req.analysis_json);
  Config config = req.config_json ? config_from_json(*req.config_json) : Config{};
  const auto corpus_text = [&](const std::optional<std::string>& given, const char* file, const char* key) {
    if (given) return *given;
    const fs::path path = data_dir_ / "corpus" / file;
    if (!fs::exists(path)) throw SchemaError(key, "required (no default corpus in the data directory)");
    return read_file(path);
  };
  const std::string abc = corpus_text(req.melody_corpus, "melodies.abc", "melody_corpus");
  const std::string sheet = corpus_text(req.chord_corpus, "chords.txt", "chord_corpus");
  const Corpora corpora = load_corpora(abc, sheet);

  auto p = std::make_shared<Project>();
  p->seed = req.seed.value_or(kDefaultSeed);
  p->config = config;
  p->analysis = analyze(film, config);
  p->pools = build_pools(corpora, config, p->seed);
  p->candidates = choose_candidates(p->analysis, p->pools, config);

  json candidates = json::object();
  for (const auto& c : p->candidates) candidates[c.character] = {{"melodies", c.melodies}, {"progressions", c.progressions}};

  std::lock_guard lock(mutex_);
  int n = 1;
  char buf[32];
  for (;; ++n) {
    std::snprintf(buf, sizeof buf, "p%04d", n);
    if (!fs::exists(dir(buf)) && !open_.count(buf)) break;
  }
  p->id = buf;
  p->dir = dir(p->id);

  // Build the directory under a temporary name and publish it with a rename.
  const fs::path staging = data_dir_ / "projects" / (p->id + ".staging");
  fs::remove_all(staging);
  json meta{{"id", p->id}, {"seed", p->seed}, {"characters", p->analysis.character_ids()}};
  write_file_atomic(staging / "project.json", meta.dump(2) + "\n");
  write_file_atomic(staging / "analysis.json", req.analysis_json);
  write_file_atomic(staging / "config.json", config_to_json(config));
  write_file_atomic(staging / "pools" / "melodies.json", annotate::manifest_to_json(p->pools.melodies));
  write_file_atomic(staging / "pools" / "progressions.json", annotate::manifest_to_json(p->pools.progressions));
  write_file_atomic(staging / "candidates.json", candidates.dump(2) + "\n");
  write_file_atomic(staging / "assignment.json", "{}\n");
  fs::rename(staging, p->dir);
  open_[p->id] = p;
  return p->id;
}

std::shared_ptr<ProjectStore::Project> ProjectStore::open(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (const auto it = open_.find(id); it != open_.end()) return it->second;
  if (!valid_id(id) || !fs::is_directory(dir(id))) throw ProjectNotFound(id);

  auto p = std::make_shared<Project>();
  p->id = id;
  p->dir = dir(id);
  const json meta = parse_or_throw(read_file(p->dir / "project.json"), "project.json");
  p->seed = meta.at("seed").get<std::uint64_t>();
  p->config = config_from_json(read_file(p->dir / "config.json"));
  p->analysis = analyze(vision::load_analysis(read_file(p->dir / "analysis.json")), p->config);
  p->pools.melodies = annotate::manifest_from_json(read_file(p->dir / "pools" / "melodies.json"));
  p->pools.progressions = annotate::manifest_from_json(read_file(p->dir / "pools" / "progressions.json"));
  const json cands = parse_or_throw(read_file(p->dir / "candidates.json"), "candidates.json");
  for (const auto& profile : p->analysis.characters) {
    CharacterCandidates c;
    c.character = profile.id;
    c.target = assemble::emotion_target(profile.aggregate, p->config.mapping);
    if (cands.contains(profile.id)) {
      c.melodies = cands[profile.id].at("melodies").get<std::vector<std::string>>();
      c.progressions = cands[profile.id].at("progressions").get<std::vector<std::string>>();
    }
    p->candidates.push_back(std::move(c));
  }
  p->assignment = assignment_from_json(read_file(p->dir / "assignment.json"));
  if (fs::exists(p->dir / "renders" / "score.mid")) p->status.state = RenderState::kDone;
  open_[id] = p;
  return p;
}

std::string ProjectStore::summary_json(const std::string& id) {
  auto p = open(id);
  std::lock_guard lock(p->mu);
  json assigned = parse_or_throw(assignment_to_json(p->assignment), "assignment");
  bool complete = true;
  for (const auto& c : p->analysis.characters) complete = complete && p->assignment.count(c.id);
  json doc{{"id", p->id},
           {"seed", p->seed},
           {"duration", p->analysis.film.duration},
           {"characters", p->analysis.character_ids()},
           {"segments", p->analysis.segments.size()},
           {"assignment", assigned},
           {"assignment_complete", complete},
           {"render", render_state_name(p->status.state)}};
  return doc.dump();
}

std::string ProjectStore::characters_json(const std::string& id) {
  auto p = open(id);
  return service::characters_json(p->analysis);
}

std::string ProjectStore::candidates_json(const std::string& id, const std::string& character) {
  auto p = open(id);
  for (const CharacterCandidates& c : p->candidates) {
    if (c.character != character) continue;
    json melodies = json::array();
    for (const auto& mid : c.melodies) {
      if (const auto* cand = p->pools.melodies.find(mid)) melodies.push_back(json::parse(candidate_json(*cand)));
    }
    json progressions = json::array();
    for (const auto& cid : c.progressions) {
      if (const auto* cand = p->pools.progressions.find(cid)) progressions.push_back(json::parse(candidate_json(*cand)));
    }
    return json{{"character", character}, {"melodies", melodies}, {"progressions", progressions}}.dump();
  }
  throw UnknownCharacter(character);
}

std::string ProjectStore::assignment_json(const std::string& id) {
  auto p = open(id);
  std::lock_guard lock(p->mu);
  return assignment_to_json(p->assignment);
}

void ProjectStore::put_assignment(const std::string& id, std::string_view body) {
  auto p = open(id);
  const assemble::Assignment a = assignment_from_json(body);
  validate_assignment(a, p->analysis, p->pools);
  std::lock_guard lock(p->mu);
  p->assignment = a;
  ++p->generation;
  write_file_atomic(p->dir / "assignment.json", assignment_to_json(a));
  fs::remove_all(p->dir / "renders");
  p->status = {};
}

void ProjectStore::run_render(Project& p) {
  std::unique_lock lock(p.mu);
  const std::uint64_t generation = p.generation;
  const assemble::Assignment assignment = p.assignment;
  lock.unlock();

  // Analysis, pools, config and seed never change after open.
  Artifacts out;
  try {
    out = render_artifacts(p.analysis, p.pools, assignment, p.config, p.seed);
  } catch (const std::exception& e) {
    lock.lock();
    if (generation == p.generation) p.status = {RenderState::kFailed, e.what()};
    throw;
  }

  lock.lock();
  if (generation != p.generation) return;
  const fs::path renders = p.dir / "renders";
  write_file_atomic(renders / "score.mid", std::string_view(reinterpret_cast<const char*>(out.midi.data()), out.midi.size()));
  write_file_atomic(renders / "score.chords.txt", out.chord_sheet);
  write_file_atomic(renders / "timeline.json", out.timeline);
  p.status = {RenderState::kDone, ""};
}

void ProjectStore::render(const std::string& id) {
  auto p = open(id);
  {
    std::lock_guard lock(p->mu);
    for (const auto& c : p->analysis.characters) {
      if (!p->assignment.count(c.id)) throw MissingAssignment(c.id);
    }
    p->status = {RenderState::kRunning, ""};
  }
  run_render(*p);
}

void ProjectStore::start_render(const std::string& id) {
  auto p = open(id);
  std::lock_guard lock(p->mu);
  for (const auto& c : p->analysis.characters) {
    if (!p->assignment.count(c.id)) throw MissingAssignment(c.id);
  }
  if (p->status.state == RenderState::kRunning) return;
  p->status = {RenderState::kRunning, ""};
  p->workers.emplace_back([this, p] {
    try {
      run_render(*p);
    } catch (const std::exception&) {
      // Recorded in the status by run_render.
    }
  });
}

RenderStatus ProjectStore::render_status(const std::string& id) {
  auto p = open(id);
  std::lock_guard lock(p->mu);
  return p->status;
}

void ProjectStore::wait(const std::string& id) {
  auto p = open(id);
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(p->mu);
    workers.swap(p->workers);
  }
  for (auto& t : workers) t.join();
}

std::optional<std::string> ProjectStore::artifact(const std::string& id, const std::string& name) {
  auto p = open(id);
  if (std::find(std::begin(kArtifacts), std::end(kArtifacts), name) == std::end(kArtifacts)) return std::nullopt;
  const fs::path path = p->dir / "renders" / name;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace filmscore::service
