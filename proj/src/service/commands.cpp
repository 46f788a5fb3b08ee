#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "filmscore/service.h"

namespace filmscore::service {

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;

std::string read_input(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " file not found: " + path);
  return read_file(path);
}

}  // namespace

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const std::string analysis_text = read_input(opts.analysis, "analysis");
    const std::string abc = read_input(opts.melody_corpus, "melody corpus");
    const std::string sheet = read_input(opts.chord_corpus, "chord corpus");
    const Config config = opts.config ? config_from_json(read_input(*opts.config, "config")) : Config{};

    vision::FilmAnalysis film = vision::load_analysis(analysis_text);
    const Corpora corpora = load_corpora(abc, sheet);
    for (const auto& d : corpora.diagnostics) err << "skipped tune: " << d << '\n';

    const Analysis analysis = analyze(std::move(film), config);
    const PoolSet pools = build_pools(corpora, config, opts.seed);
    const auto candidates = choose_candidates(analysis, pools, config);
    const fs::path dir(opts.out_dir);

    if (opts.candidates_only) {
      nlohmann::json doc = nlohmann::json::object();
      for (const auto& c : candidates) doc[c.character] = {{"melodies", c.melodies}, {"progressions", c.progressions}};
      write_file_atomic(dir / "pools" / "melodies.json", annotate::manifest_to_json(pools.melodies));
      write_file_atomic(dir / "pools" / "progressions.json", annotate::manifest_to_json(pools.progressions));
      write_file_atomic(dir / "candidates.json", doc.dump(2) + "\n");
      out << "wrote " << pools.melodies.candidates.size() << " melodies and " << pools.progressions.candidates.size()
          << " progressions to " << (dir / "pools").string() << '\n';
      return 0;
    }

    const Artifacts art = render_artifacts(analysis, pools, default_assignment(candidates), config, opts.seed);
    write_file_atomic(dir / "score.mid",
                      std::string_view(reinterpret_cast<const char*>(art.midi.data()), art.midi.size()));
    write_file_atomic(dir / "score.chords.txt", art.chord_sheet);
    write_file_atomic(dir / "timeline.json", art.timeline);
    out << "wrote score.mid, score.chords.txt, timeline.json to " << dir.string() << " ("
        << analysis.segments.size() << " cues)\n";
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
}

int cmd_serve(int port, const std::string& data_dir, std::ostream& out, std::ostream& err) {
  try {
    ProjectStore store(data_dir);
    httplib::Server server;
    mount_api(server, store);
    out << "serving " << data_dir << " on port " << port << std::endl;
    if (!server.listen("0.0.0.0", port)) {
      err << "error: cannot listen on port " << port << '\n';
      return kExitPipeline;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
}

int cmd_inspect(const std::string& project, const std::string& data_dir, std::ostream& out, std::ostream& err) {
  try {
    ProjectStore store(data_dir);
    auto summary = nlohmann::json::parse(store.summary_json(project));
    summary["status"] = render_state_name(store.render_status(project).state);
    out << summary.dump(2) << '\n';
    return 0;
  } catch (const ProjectNotFound& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Film-score generation engine"};
  app.require_subcommand(1);

  GenerateOptions gen;
  std::string config;
  auto* generate = app.add_subcommand("generate", "Score a film analysis end to end");
  generate->add_option("--analysis", gen.analysis, "Film analysis JSON")->required();
  generate->add_option("--melody-corpus", gen.melody_corpus, "ABC melody corpus")->required();
  generate->add_option("--chord-corpus", gen.chord_corpus, "Chord-sheet corpus")->required();
  generate->add_option("--seed", gen.seed, "Random seed")->required();
  generate->add_option("--config", config, "Config JSON");
  generate->add_option("--out-dir", gen.out_dir, "Output directory");
  generate->add_flag("--candidates-only", gen.candidates_only, "Write pools and candidates only");

  int port = 8080;
  std::string data_dir = "data";
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port")->required();
  serve->add_option("--data-dir", data_dir, "Data directory")->required();

  std::string project;
  auto* inspect = app.add_subcommand("inspect", "Print a project summary");
  inspect->add_option("--project", project, "Project id")->required();
  inspect->add_option("--data-dir", data_dir, "Data directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (generate->parsed()) {
    if (!config.empty()) gen.config = config;
    return cmd_generate(gen, std::cout, std::cerr);
  }
  if (serve->parsed()) return cmd_serve(port, data_dir, std::cout, std::cerr);
  return cmd_inspect(project, data_dir, std::cout, std::cerr);
}

}  // namespace filmscore::service
