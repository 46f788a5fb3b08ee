#include <functional>

#include <httplib.h>
#include <json.hpp>

#include "filmscore/service.h"

namespace filmscore::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}}.dump());
}

/// Run a handler, mapping engine errors onto HTTP statuses.
void guarded(httplib::Response& res, const std::function<void()>& body) {
  try {
    body();
  } catch (const ProjectNotFound& e) {
    send_error(res, 404, e.what());
  } catch (const UnknownCharacter& e) {
    send_error(res, 404, e.what());
  } catch (const MissingAssignment& e) {
    send_error(res, 409, e.what());
  } catch (const InputError& e) {
    send_error(res, 400, e.what());
  } catch (const Error& e) {
    send_error(res, 422, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

CreateRequest create_request(const std::string& body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("", "request body must be a JSON object");
  CreateRequest req;
  if (!doc.contains("analysis")) {
    req.analysis_json = body;
    return req;
  }
  const json& analysis = doc["analysis"];
  req.analysis_json = analysis.is_string() ? analysis.get<std::string>() : analysis.dump();
  for (const char* key : {"melody_corpus", "chord_corpus"}) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_string()) throw SchemaError(key, "must be a string");
    (std::string(key) == "melody_corpus" ? req.melody_corpus : req.chord_corpus) = doc[key].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw SchemaError("seed", "must be a non-negative integer");
    req.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("config")) {
    if (!doc["config"].is_object()) throw SchemaError("config", "must be an object");
    req.config_json = doc["config"].dump();
  }
  return req;
}

std::string status_json(const RenderStatus& s) {
  json doc{{"state", render_state_name(s.state)}};
  if (!s.error.empty()) doc["error"] = s.error;
  return doc.dump();
}

}  // namespace

void mount_api(httplib::Server& server, ProjectStore& store) {
  server.Post("/projects", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = store.create(create_request(req.body));
      send_json(res, 201, json{{"id", id}}.dump());
    });
  });

  server.Get(R"(/projects/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, store.summary_json(req.matches[1])); });
  });

  server.Get(R"(/projects/([^/]+)/characters)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, store.characters_json(req.matches[1])); });
  });

  server.Get(R"(/projects/([^/]+)/characters/([^/]+)/candidates)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] { send_json(res, 200, store.candidates_json(req.matches[1], req.matches[2])); });
             });

  server.Get(R"(/projects/([^/]+)/assignment)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, store.assignment_json(req.matches[1])); });
  });

  server.Put(R"(/projects/([^/]+)/assignment)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      store.put_assignment(req.matches[1], req.body);
      send_json(res, 200, store.summary_json(req.matches[1]));
    });
  });

  server.Post(R"(/projects/([^/]+)/render)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      if (req.get_param_value("async") == "1") {
        store.start_render(id);
        send_json(res, 202, status_json(store.render_status(id)));
      } else {
        store.render(id);
        send_json(res, 200, status_json(store.render_status(id)));
      }
    });
  });

  server.Get(R"(/projects/([^/]+)/render/status)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, status_json(store.render_status(req.matches[1]))); });
  });

  server.Get(R"(/projects/([^/]+)/(score\.mid|score\.chords\.txt|timeline\.json))",
             [&store](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const std::string name = req.matches[2];
                 const auto body = store.artifact(req.matches[1], name);
                 if (!body) return send_error(res, 404, "not rendered yet");
                 const char* type = name == "score.mid"          ? "audio/midi"
                                    : name == "timeline.json" ? "application/json"
                                                              : "text/plain; charset=utf-8";
                 res.status = 200;
                 res.set_content(*body, type);
               });
             });
}

}  // namespace filmscore::service
