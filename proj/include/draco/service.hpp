#pragma once

// HTTP front end. Each endpoint parses its body, makes the same library call a
// program would, and returns the result as JSON. Nothing is kept between
// requests; weight overrides apply to one request only.

#include <string>
#include <string_view>

// httplib's default backlog of 5 drops connections under a burst of clients.
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "draco/api.hpp"

namespace draco {

struct Reply {
  int status = 200;
  nlohmann::json body;
};

struct ServerLimits {
  std::size_t max_body = 8u << 20;
  // Completions can keep every worker busy for a while; queued connections
  // must outlast that.
  int timeout_seconds = 60;
};

inline void configure(httplib::Server& server, const ServerLimits& limits) {
  server.set_payload_max_length(limits.max_body);
  server.set_read_timeout(limits.timeout_seconds, 0);
  server.set_write_timeout(limits.timeout_seconds, 0);
  server.set_keep_alive_timeout(limits.timeout_seconds);
}

namespace detail {

// Thrown while reading a request body; becomes a 400.
struct BadRequest : Error {
  using Error::Error;
};

inline nlohmann::json parse_body(std::string_view body) {
  if (body.empty()) throw BadRequest("empty request body");
  try {
    auto j = nlohmann::json::parse(body);
    if (!j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON: ") + e.what());
  }
}

// "spec" as nested JSON or "facts" as text. `required` false allows neither.
inline ChartSpec request_spec(const nlohmann::json& j, bool required = true) {
  if (j.contains("spec") && j.contains("facts")) throw BadRequest("give either \"spec\" or \"facts\", not both");
  if (j.contains("spec")) return spec_from_json(j.at("spec"));
  if (j.contains("facts")) {
    if (!j.at("facts").is_string()) throw BadRequest("\"facts\" must be a string");
    try {
      return nest_facts(parse_facts(j.at("facts").get<std::string>()));
    } catch (const ParseError& e) {
      throw BadRequest(std::string("facts: ") + e.what());
    }
  }
  if (required) throw BadRequest("missing \"spec\" or \"facts\"");
  return {};
}

inline Reply error_reply(int status, const std::string& message, nlohmann::json detail = nullptr) {
  nlohmann::json body{{"error", message}};
  if (!detail.is_null()) body["detail"] = std::move(detail);
  return {status, std::move(body)};
}

// Maps library failures onto status codes.
template <class F>
Reply guarded(F&& f) {
  try {
    return f();
  } catch (const BadRequest& e) {
    return error_reply(400, e.what());
  } catch (const ParseError& e) {
    return error_reply(400, e.what());
  } catch (const DataError& e) {
    return error_reply(400, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, e.what());
  } catch (const IncompleteSpecError& e) {
    return error_reply(422, e.what(), {{"missing", e.missing()}});
  } catch (const KbError& e) {
    return error_reply(422, "invalid knowledge base or weights", {{"problems", e.problems()}});
  } catch (const Error& e) {
    return error_reply(422, e.what());
  }
}

}  // namespace detail

class Service {
 public:
  explicit Service(KnowledgeBase kb) : kb_{std::move(kb)} {}

  const KnowledgeBase& knowledge_base() const { return kb_; }

  // {spec|facts} -> {hard_violations}
  Reply validate(std::string_view body) const {
    return detail::guarded([&] {
      auto j = detail::parse_body(body);
      Facts facts = flatten_spec(detail::request_spec(j));
      return Reply{200, {{"hard_violations", draco::validate(kb_, facts)}}};
    });
  }

  // {spec|facts?, schema?, hints?, k?, weights?} -> {models}
  Reply complete(std::string_view body) const {
    return detail::guarded([&] {
      auto j = detail::parse_body(body);
      ChartSpec partial = detail::request_spec(j, false);
      if (j.contains("schema")) partial = with_schema(partial, schema_from_json(j.at("schema")));
      std::string hints;
      if (j.contains("hints")) {
        if (!j.at("hints").is_string()) throw detail::BadRequest("\"hints\" must be a string of rules");
        hints = j.at("hints").get<std::string>();
      }
      std::size_t k = 5;
      if (j.contains("k")) {
        if (!j.at("k").is_number_unsigned()) throw detail::BadRequest("\"k\" must be a positive integer");
        k = j.at("k").get<std::size_t>();
      }
      KnowledgeBase local;
      const KnowledgeBase* kb = &kb_;
      if (j.contains("weights")) {
        local = with_weights(kb_, parse_weights(j.at("weights").dump()));
        kb = &local;
      }
      Query q = make_query(partial, hints, k);
      if (j.contains("max_added")) q.caps.max_added_encodings = j.at("max_added").get<int>();
      return Reply{200, {{"models", models_to_json(complete_spec(*kb, q))}}};
    });
  }

  // CSV text -> schema
  Reply schema(std::string_view body) const {
    return detail::guarded([&] {
      if (body.empty()) throw detail::BadRequest("empty request body");
      return Reply{200, schema_to_json(infer_schema(body))};
    });
  }

  // {spec|facts, data?: CSV text} -> Vega-Lite document
  Reply render(std::string_view body) const {
    return detail::guarded([&] {
      auto j = detail::parse_body(body);
      ChartSpec spec = detail::request_spec(j);
      if (j.contains("data")) {
        if (!j.at("data").is_string()) throw detail::BadRequest("\"data\" must be CSV text");
        Table t = parse_csv(j.at("data").get<std::string>());
        return Reply{200, draco::render(spec, &t)};
      }
      return Reply{200, draco::render(spec)};
    });
  }

  // {specs: [spec | {label, spec}], size?} -> {matrix, unactivated, chart}
  Reply debug(std::string_view body) const {
    return detail::guarded([&] {
      auto j = detail::parse_body(body);
      if (!j.contains("specs") || !j.at("specs").is_array()) throw detail::BadRequest("missing \"specs\" array");
      std::vector<LabeledSpec> specs;
      for (std::size_t i = 0; i < j.at("specs").size(); ++i) {
        const auto& s = j.at("specs")[i];
        if (s.is_object() && s.contains("label") && s.contains("spec")) {
          specs.push_back({s.at("label").get<std::string>(), flatten_spec(spec_from_json(s.at("spec")))});
        } else {
          specs.push_back({"spec " + std::to_string(i), flatten_spec(spec_from_json(s))});
        }
      }
      ChartSize size = j.contains("size") ? parse_chart_size(j.at("size").get<std::string>()) : ChartSize::medium;
      return Reply{200, debug_to_json(build_matrix(kb_, specs), size)};
    });
  }

  // -> {blocks}
  Reply kb() const { return Reply{200, {{"blocks", blocks_to_json(list_blocks(kb_))}}}; }

  void mount(httplib::Server& server) const {
    auto post = [&](const char* path, Reply (Service::*handler)(std::string_view) const) {
      server.Post(path, [this, handler](const httplib::Request& req, httplib::Response& res) {
        send(res, (this->*handler)(req.body));
      });
    };
    post("/validate", &Service::validate);
    post("/complete", &Service::complete);
    post("/schema", &Service::schema);
    post("/render", &Service::render);
    post("/debug", &Service::debug);
    server.Get("/kb", [this](const httplib::Request&, httplib::Response& res) { send(res, kb()); });
  }

 private:
  static void send(httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  }

  KnowledgeBase kb_;
};

}  // namespace draco
