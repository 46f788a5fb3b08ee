#pragma once

// Pipeline driver, on-disk projects, the HTTP API and the command line.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "filmscore/annotate.h"
#include "filmscore/assemble.h"
#include "filmscore/emit.h"
#include "filmscore/vision.h"

namespace httplib {
class Server;
}

namespace filmscore::service {

struct Config {
  int melody_pool_size = 300;
  int chord_pool_size = 1000;
  int characters = 3;
  int candidates = 3;
  vision::ArcOptions arc;
  vision::SegmentOptions segment;
  assemble::EmotionMusicMapping mapping = assemble::default_mapping();
  assemble::SelectionWeights weights = assemble::SelectionWeights::defaults();
};

/// Keys missing from the document keep their defaults. Throws SchemaError.
Config config_from_json(std::string_view text);
std::string config_to_json(const Config& c);

// ---------------------------------------------------------------------------
// Pipeline

struct Corpora {
  std::vector<Melody> melodies;
  std::vector<ChordProgression> progressions;
  std::vector<std::string> diagnostics;
};

/// Parse both corpora. Throws InputError subclasses.
Corpora load_corpora(std::string_view abc, std::string_view chord_sheet);

struct Analysis {
  vision::FilmAnalysis film;
  std::vector<vision::CharacterProfile> characters;
  std::vector<vision::SegmentAnnotation> segments;

  std::vector<std::string> character_ids() const;
};

Analysis analyze(vision::FilmAnalysis film, const Config& config);

struct PoolSet {
  annotate::PoolManifest melodies;
  annotate::PoolManifest progressions;
};

PoolSet build_pools(const Corpora& corpora, const Config& config, std::uint64_t seed);

struct CharacterCandidates {
  std::string character;
  annotate::AnnotationVector target;
  std::vector<std::string> melodies;
  std::vector<std::string> progressions;
};

/// Per main character, in rank order: the best-fitting melodies and
/// progressions for its aggregate emotion. Characters after the first are
/// contrasted against the first one's target, and never receive a melody
/// already offered to an earlier character.
std::vector<CharacterCandidates> choose_candidates(const Analysis& a, const PoolSet& pools, const Config& config);

/// Rank-1 candidates for every character.
assemble::Assignment default_assignment(const std::vector<CharacterCandidates>& candidates);

/// Throws SchemaError for unknown characters, unknown ids or a melody used
/// by two characters. Completeness is not checked here.
void validate_assignment(const assemble::Assignment& assignment, const Analysis& a, const PoolSet& pools);

assemble::Assignment assignment_from_json(std::string_view text);
std::string assignment_to_json(const assemble::Assignment& a);

struct Artifacts {
  std::vector<std::uint8_t> midi;
  std::string chord_sheet;
  std::string timeline;
};

/// Plan and render. Throws MissingAssignment when a main character has no
/// choice.
Artifacts render_artifacts(const Analysis& a, const PoolSet& pools, const assemble::Assignment& assignment,
                           const Config& config, std::uint64_t seed);

std::string candidate_json(const annotate::Candidate& c);
std::string characters_json(const Analysis& a);

// ---------------------------------------------------------------------------
// Storage

/// Raised for project ids that do not exist.
class ProjectNotFound : public Error {
 public:
  explicit ProjectNotFound(const std::string& id) : Error("unknown project '" + id + "'") {}
};

/// Write to a temporary sibling, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

struct CreateRequest {
  std::string analysis_json;
  std::optional<std::string> melody_corpus;
  std::optional<std::string> chord_corpus;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config_json;
};

enum class RenderState { kIdle, kRunning, kDone, kFailed };
const char* render_state_name(RenderState s);

struct RenderStatus {
  RenderState state = RenderState::kIdle;
  std::string error;
};

/// Projects under `<data_dir>/projects/<id>/`:
///   project.json, analysis.json, config.json, candidates.json,
///   pools/melodies.json, pools/progressions.json, assignment.json,
///   renders/{score.mid, score.chords.txt, timeline.json}.
/// Mutations of one project are serialised; renders may run in the
/// background.
class ProjectStore {
 public:
  explicit ProjectStore(std::filesystem::path data_dir);
  ~ProjectStore();
  ProjectStore(const ProjectStore&) = delete;
  ProjectStore& operator=(const ProjectStore&) = delete;

  const std::filesystem::path& data_dir() const { return data_dir_; }

  /// Corpora missing from the request are read from <data_dir>/corpus/.
  std::string create(const CreateRequest& req);

  std::string summary_json(const std::string& id);
  std::string characters_json(const std::string& id);
  /// Throws UnknownCharacter.
  std::string candidates_json(const std::string& id, const std::string& character);
  std::string assignment_json(const std::string& id);
  /// Validates, stores, and deletes any existing render.
  void put_assignment(const std::string& id, std::string_view body);

  /// Render in the calling thread. Throws MissingAssignment.
  void render(const std::string& id);
  /// Check the assignment, then render on a background thread.
  void start_render(const std::string& id);
  RenderStatus render_status(const std::string& id);
  /// Wait for a background render, if one is running.
  void wait(const std::string& id);

  /// Contents of a rendered artifact, if present.
  std::optional<std::string> artifact(const std::string& id, const std::string& name);

 private:
  struct Project;
  std::shared_ptr<Project> open(const std::string& id);
  std::filesystem::path dir(const std::string& id) const;
  void run_render(Project& p);

  std::filesystem::path data_dir_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Project>> open_;
};

// ---------------------------------------------------------------------------
// HTTP and command line

/// Register every route on `server`.
void mount_api(httplib::Server& server, ProjectStore& store);

struct GenerateOptions {
  std::string analysis;
  std::string melody_corpus;
  std::string chord_corpus;
  std::uint64_t seed = 42;
  std::optional<std::string> config;
  std::string out_dir = ".";
  bool candidates_only = false;
};

/// Exit 0 on success, 2 on input errors, 3 on pipeline errors.
int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_serve(int port, const std::string& data_dir, std::ostream& out, std::ostream& err);
int cmd_inspect(const std::string& project, const std::string& data_dir, std::ostream& out, std::ostream& err);

/// Full command line entry point.
int run_cli(int argc, char** argv);

}  // namespace filmscore::service
