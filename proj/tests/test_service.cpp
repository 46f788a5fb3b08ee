#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "filmscore/service.h"
#include "fixtures.h"
#include "smf_reader.h"

using namespace filmscore;
using namespace filmscore::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kSmallConfig = R"({"melody_pool_size": 40, "chord_pool_size": 40})";

fs::path scratch(const std::string& name) {
  static const std::string tag = std::to_string(std::random_device{}());
  const fs::path p = fs::temp_directory_path() / ("filmscore_test_" + tag) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(FILMSCORE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

// ---------------------------------------------------------------------------
// Config

TEST(Config, RoundTrip) {
  Config c;
  c.melody_pool_size = 77;
  c.segment.min_segment_len = 6.5;
  c.weights.w_contrast = 0.25;
  c.mapping.row(vision::Emotion::kSad).tempo_lo = 55;
  const Config back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.mapping.row(vision::Emotion::kSad).tempo_lo, 55);
}

TEST(Config, ShippedFilesEqualTheDefaults) {
  const fs::path dir = FILMSCORE_CONFIG_DIR;
  EXPECT_EQ(config_to_json(config_from_json(read_file(dir / "filmscore.json"))), config_to_json(Config{}));
  EXPECT_EQ(assemble::mapping_to_json(assemble::mapping_from_json(read_file(dir / "emotion_mapping.json"))),
            assemble::mapping_to_json(assemble::default_mapping()));
}

TEST(Config, SchemaErrors) {
  const auto path_of = [](const char* doc) {
    try {
      config_from_json(doc);
    } catch (const SchemaError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(path_of(R"({"melody_pool_size": 0})"), "melody_pool_size");
  EXPECT_EQ(path_of(R"({"arc": {"window": -1}})"), "arc.window");
  EXPECT_EQ(path_of(R"({"selection": {"field_weights": {"loudness": 1}}})"), "selection.field_weights.loudness");
  EXPECT_EQ(path_of(R"({"mapping": {"emotions": {"sad": {"density": 3}}}})"), "mapping.emotions.sad.density");
  EXPECT_EQ(path_of("{}"), "<none>");
}

// ---------------------------------------------------------------------------
// Pipeline

TEST(Pipeline, CandidatesAreDistinctAcrossCharacters) {
  const Config config = config_from_json(kSmallConfig);
  const Corpora corpora = load_corpora(fixtures::read("melodies.abc"), fixtures::read("chords.txt"));
  const Analysis a = analyze(vision::load_analysis(fixtures::read("film_5min.json")), config);
  const PoolSet pools = build_pools(corpora, config, 42);
  EXPECT_EQ(pools.melodies.candidates.size(), 40u);
  EXPECT_EQ(pools.progressions.candidates.size(), 40u);
  const auto cands = choose_candidates(a, pools, config);
  ASSERT_EQ(cands.size(), 3u);
  std::set<std::string> seen;
  for (const auto& c : cands) {
    EXPECT_EQ(c.melodies.size(), 3u);
    EXPECT_EQ(c.progressions.size(), 3u);
    for (const auto& m : c.melodies) EXPECT_TRUE(seen.insert(m).second) << m;
  }
  const auto asg = default_assignment(cands);
  EXPECT_NO_THROW(validate_assignment(asg, a, pools));
  auto dup = asg;
  dup["bob"].melody = dup["alice"].melody;
  EXPECT_THROW(validate_assignment(dup, a, pools), SchemaError);
  auto stranger = asg;
  stranger["zed"] = asg.at("alice");
  EXPECT_THROW(validate_assignment(stranger, a, pools), SchemaError);

  const Artifacts x = render_artifacts(a, pools, asg, config, 42);
  const Artifacts y = render_artifacts(a, pools, asg, config, 42);
  EXPECT_EQ(x.midi, y.midi);
  EXPECT_EQ(x.timeline, y.timeline);
  EXPECT_NO_THROW(smf::read(x.midi));
  auto partial = asg;
  partial.erase("carol");
  EXPECT_THROW(render_artifacts(a, pools, partial, config, 42), MissingAssignment);
}

TEST(Pipeline, AssignmentJsonRoundTrip) {
  const assemble::Assignment a = {{"x", {"m0001", "c0002"}}, {"y", {"m0003", "c0004"}}};
  EXPECT_EQ(assignment_from_json(assignment_to_json(a)), a);
  EXPECT_THROW(assignment_from_json(R"({"x": {"melody": "m0001"}})"), SchemaError);
  EXPECT_THROW(assignment_from_json("[1]"), SchemaError);
}

// ---------------------------------------------------------------------------
// Command line

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = scratch(::testing::UnitTest::GetInstance()->current_test_info()->name());
    write_file_atomic(dir_ / "small.json", kSmallConfig);
  }
  std::string common() const {
    const fs::path f = fixtures::dir();
    return "generate --analysis " + (f / "film_5min.json").string() + " --melody-corpus " +
           (f / "melodies.abc").string() + " --chord-corpus " + (f / "chords.txt").string() + " --config " +
           (dir_ / "small.json").string();
  }
  fs::path dir_;
};

TEST_F(Cli, ExitCodes) {
  const fs::path f = fixtures::dir();
  EXPECT_EQ(run("generate --melody-corpus x --chord-corpus y --seed 1"), 2);
  EXPECT_EQ(run("generate --analysis /nonexistent.json --melody-corpus " + (f / "melodies.abc").string() +
                " --chord-corpus " + (f / "chords.txt").string() + " --seed 1 --out-dir " + dir_.string()),
            2);
  write_file_atomic(dir_ / "bad.json", R"({"fps": 24, "duration": 10, "frames": "nope"})");
  EXPECT_EQ(run("generate --analysis " + (dir_ / "bad.json").string() + " --melody-corpus " +
                (f / "melodies.abc").string() + " --chord-corpus " + (f / "chords.txt").string() +
                " --seed 1 --out-dir " + dir_.string()),
            2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, CandidatesOnlyWritesNoScore) {
  ASSERT_EQ(run(common() + " --seed 5 --candidates-only --out-dir " + dir_.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "candidates.json"));
  EXPECT_TRUE(fs::exists(dir_ / "pools" / "melodies.json"));
  EXPECT_TRUE(fs::exists(dir_ / "pools" / "progressions.json"));
  EXPECT_FALSE(fs::exists(dir_ / "score.mid"));
  const json c = json::parse(read_file(dir_ / "candidates.json"));
  EXPECT_FALSE(c.empty());
}

TEST_F(Cli, SameSeedSameBytes) {
  ASSERT_EQ(run(common() + " --seed 42 --out-dir " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run(common() + " --seed 42 --out-dir " + (dir_ / "b").string()), 0);
  for (const char* name : {"score.mid", "score.chords.txt", "timeline.json"}) {
    EXPECT_EQ(read_file(dir_ / "a" / name), read_file(dir_ / "b" / name)) << name;
  }
  EXPECT_NO_THROW(smf::read(bytes_of(read_file(dir_ / "a" / "score.mid"))));
}

// ---------------------------------------------------------------------------
// HTTP

class Http : public ::testing::Test {
 protected:
  void SetUp() override {
    data_ = scratch(std::string("http_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    store_ = std::make_unique<ProjectStore>(data_);
    mount_api(server_, *store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(120, 0);
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string create(const std::string& film = "film_5min.json") {
    json body;
    body["analysis"] = json::parse(fixtures::read(film));
    body["melody_corpus"] = fixtures::read("melodies.abc");
    body["chord_corpus"] = fixtures::read("chords.txt");
    body["seed"] = 42;
    body["config"] = json::parse(kSmallConfig);
    auto res = client_->Post("/projects", body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return "";
    EXPECT_EQ(res->status, 201) << res->body;
    return json::parse(res->body).at("id").get<std::string>();
  }

  json get_json(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res) << path;
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  json full_assignment(const std::string& id) {
    json a = json::object();
    const json chars = get_json("/projects/" + id + "/characters")["characters"];
    for (const auto& c : chars) {
      const std::string cid = c["id"];
      const json cands = get_json("/projects/" + id + "/characters/" + cid + "/candidates");
      a[cid] = {{"melody", cands["melodies"][0]["id"]}, {"progression", cands["progressions"][0]["id"]}};
    }
    return a;
  }

  fs::path data_;
  std::unique_ptr<ProjectStore> store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(Http, CreateAndListCharacters) {
  const std::string id = create();
  ASSERT_FALSE(id.empty());
  const json chars = get_json("/projects/" + id + "/characters")["characters"];
  ASSERT_EQ(chars.size(), 3u);
  EXPECT_EQ(chars[0]["id"], "alice");
  for (std::size_t i = 1; i < chars.size(); ++i) {
    EXPECT_GE(chars[i - 1]["screen_frames"].get<int>(), chars[i]["screen_frames"].get<int>());
    EXPECT_EQ(chars[i]["rank"], i + 1);
  }
  const json summary = get_json("/projects/" + id);
  EXPECT_EQ(summary["id"], id);
  EXPECT_FALSE(summary["assignment_complete"].get<bool>());
  EXPECT_EQ(summary["render"], "idle");
}

TEST_F(Http, CandidatesThreeAndThree) {
  const std::string id = create();
  for (const char* who : {"alice", "bob", "carol"}) {
    const json c = get_json("/projects/" + id + "/characters/" + who + "/candidates");
    ASSERT_EQ(c["melodies"].size(), 3u) << who;
    ASSERT_EQ(c["progressions"].size(), 3u) << who;
    for (const auto& m : c["melodies"]) {
      EXPECT_EQ(m["annotation"].size(), 15u);
      EXPECT_EQ(m["length_bars"], 8);
      EXPECT_FALSE(m["notation"].get<std::string>().empty());
    }
    for (const auto& p : c["progressions"]) EXPECT_TRUE(p.contains("bars"));
  }
}

TEST_F(Http, RenderContract) {
  const std::string id = create();
  const std::string base = "/projects/" + id;
  json a = full_assignment(id);

  // Incomplete assignment: 409, sync and async.
  json partial = a;
  partial.erase("carol");
  auto put = client_->Put(base + "/assignment", partial.dump(), "application/json");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 200);
  auto r = client_->Post(base + "/render", "", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 409);
  r = client_->Post(base + "/render?async=1", "", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(client_->Get(base + "/score.mid")->status, 404);

  put = client_->Put(base + "/assignment", a.dump(), "application/json");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 200);
  EXPECT_TRUE(json::parse(put->body)["assignment_complete"].get<bool>());
  r = client_->Post(base + "/render", "", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(json::parse(r->body)["state"], "done");

  auto mid = client_->Get(base + "/score.mid");
  ASSERT_TRUE(mid);
  EXPECT_EQ(mid->status, 200);
  EXPECT_EQ(mid->get_header_value("Content-Type"), "audio/midi");
  const smf::File f = smf::read(bytes_of(mid->body));
  EXPECT_EQ(f.tracks.size(), 5u);
  EXPECT_EQ(client_->Get(base + "/score.chords.txt")->status, 200);
  const json timeline = get_json(base + "/timeline.json");
  EXPECT_EQ(timeline["cues"].size(), get_json(base)["segments"].get<std::size_t>());

  // Re-render of the same assignment reproduces the bytes.
  ASSERT_EQ(client_->Post(base + "/render", "", "application/json")->status, 200);
  EXPECT_EQ(client_->Get(base + "/score.mid")->body, mid->body);

  // A new assignment invalidates the stored render.
  json other = a;
  const json cands = get_json(base + "/characters/alice/candidates");
  other["alice"]["progression"] = cands["progressions"][1]["id"];
  ASSERT_EQ(client_->Put(base + "/assignment", other.dump(), "application/json")->status, 200);
  EXPECT_EQ(client_->Get(base + "/score.mid")->status, 404);
  EXPECT_EQ(get_json(base)["render"], "idle");
}

TEST_F(Http, AsyncRender) {
  const std::string id = create("film_two_characters.json");
  const std::string base = "/projects/" + id;
  ASSERT_EQ(client_->Put(base + "/assignment", full_assignment(id).dump(), "application/json")->status, 200);
  auto r = client_->Post(base + "/render?async=1", "", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 202);
  std::string state;
  for (int i = 0; i < 600; ++i) {
    state = get_json(base + "/render/status")["state"];
    if (state != "running") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  EXPECT_EQ(state, "done");
  EXPECT_NO_THROW(smf::read(bytes_of(client_->Get(base + "/score.mid")->body)));
}

TEST_F(Http, Errors) {
  auto r = client_->Post("/projects", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  r = client_->Post("/projects", R"({"analysis": {"fps": 24, "duration": 5, "frames": 3}})", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_TRUE(json::parse(r->body).contains("error"));

  get_json("/projects/nope", 404);
  get_json("/projects/nope/characters", 404);
  EXPECT_EQ(client_->Post("/projects/nope/render", "", "application/json")->status, 404);

  const std::string id = create("film_two_characters.json");
  get_json("/projects/" + id + "/characters/zed/candidates", 404);
  auto put = client_->Put("/projects/" + id + "/assignment", R"({"A": {"melody": "m9999", "progression": "c0001"}})",
                          "application/json");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 400);
  put = client_->Put("/projects/" + id + "/assignment", "[]", "application/json");
  EXPECT_EQ(put->status, 400);
}

TEST_F(Http, ProjectsSurviveARestart) {
  const std::string id = create("film_two_characters.json");
  const json a = full_assignment(id);
  ASSERT_EQ(client_->Put("/projects/" + id + "/assignment", a.dump(), "application/json")->status, 200);
  ProjectStore reopened(data_);
  EXPECT_EQ(json::parse(reopened.assignment_json(id)), a);
  EXPECT_NO_THROW(reopened.render(id));
  EXPECT_TRUE(reopened.artifact(id, "score.mid"));
}
