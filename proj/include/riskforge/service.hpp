#pragma once

// Scoring and explanation service over one loaded model artifact.
//
// Request handling is a pure function of (artifact, request); RiskService
// never mutates after construction, so one instance can serve concurrent
// requests. make_http_server() binds the handlers to cpp-httplib.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "httplib.h"

#include "riskforge/explain.hpp"

namespace riskforge {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  std::size_t background_size = 128;
  std::uint64_t seed = 0;
  double threshold = 0.5;
};

// A request that fails validation; `field` names the offending input.
class RequestError : public std::runtime_error {
 public:
  RequestError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct PatientRow {
  std::vector<double> values;
  std::vector<std::string> imputed;
};

class RiskService {
 public:
  RiskService() = default;

  explicit RiskService(ModelArtifact artifact, ServiceOptions options = {})
      : artifact_(std::move(artifact)), options_(options) {
    const std::size_t k = artifact_->schema.size();
    if (!artifact_->background.empty()) {
      Dataset refs;
      refs.schema = artifact_->schema;
      refs.values = artifact_->background;
      refs.labels.assign(refs.values.size() / k, 0);
      background_ = make_background(refs, options_.background_size, options_.seed, "artifact background");
    } else if (!artifact_->fill_values.empty()) {
      background_ = BackgroundSet::from_rows(k, artifact_->fill_values, "imputation defaults");
    }
  }

  bool loaded() const { return artifact_.has_value(); }
  const ModelArtifact& artifact() const { return *artifact_; }
  const std::optional<BackgroundSet>& background() const { return background_; }

  HttpReply handle(std::string_view method, std::string_view path, std::string_view body = {}) const {
    struct Route {
      std::string_view method, path;
      HttpReply (RiskService::*fn)(std::string_view) const;
    };
    static constexpr Route routes[] = {
        {"GET", "/v1/health", &RiskService::health},     {"GET", "/v1/model", &RiskService::model_info},
        {"POST", "/v1/score", &RiskService::score},      {"POST", "/v1/explain", &RiskService::explain_record},
        {"POST", "/v1/whatif", &RiskService::whatif},
    };
    bool path_known = false;
    for (const auto& r : routes) {
      if (r.path != path) continue;
      path_known = true;
      if (r.method == method) return (this->*r.fn)(body);
    }
    if (path_known) return error_reply(405, "MethodNotAllowed", "", std::string(method) + " not allowed");
    return error_reply(404, "NotFound", "", "no route " + std::string(path));
  }

  HttpReply health(std::string_view = {}) const {
    if (!loaded()) return HttpReply{503, json{{"status", "unavailable"}, {"loaded", false}}.dump()};
    return HttpReply{200, json{{"status", "ok"}, {"loaded", true}}.dump()};
  }

  HttpReply model_info(std::string_view = {}) const {
    if (!loaded()) return not_loaded();
    const auto& a = *artifact_;
    json j = metadata();
    j["schema"] = a.schema.to_json();
    j["output_scale"] = to_string(natural_scale(a.model));
    j["threshold"] = options_.threshold;
    j["imputation_available"] = !a.fill_values.empty();
    j["background"] = background_ ? background_->provenance() : json(nullptr);
    return HttpReply{200, j.dump()};
  }

  HttpReply score(std::string_view body) const {
    return guarded([&] {
      const auto req = parse_body(body);
      const auto row = parse_record(req);
      return risk_response(row, false);
    });
  }

  HttpReply explain_record(std::string_view body) const {
    return guarded([&] {
      require_background();
      const auto req = parse_body(body);
      const auto row = parse_record(req);
      return risk_response(row, true);
    });
  }

  // Scores and explains the record as given and with overrides applied,
  // against the same background, and reports per-feature phi deltas.
  HttpReply whatif(std::string_view body) const {
    return guarded([&] {
      require_background();
      const auto req = parse_body(body);
      const auto base_row = parse_record(req);
      auto modified = base_row;
      if (req.contains("overrides")) {
        const auto& ov = req.at("overrides");
        if (!ov.is_array()) throw RequestError("overrides", "overrides must be a list");
        for (std::size_t i = 0; i < ov.size(); ++i) {
          const std::string where = "overrides[" + std::to_string(i) + "]";
          if (!ov[i].is_object() || !ov[i].contains("feature") || !ov[i]["feature"].is_string())
            throw RequestError(where, where + " needs a feature name");
          const auto name = ov[i]["feature"].get<std::string>();
          const auto j = artifact_->schema.index_of(name);
          if (!j) throw RequestError(name, "unknown feature '" + name + "'");
          if (!ov[i].contains("value")) throw RequestError(name, "override of '" + name + "' has no value");
          modified.values[*j] = checked_value(*j, ov[i]["value"]);
          std::erase(modified.imputed, artifact_->schema.feature(*j).name);
        }
      }
      const auto base = risk_response(base_row, true);
      const auto mod = risk_response(modified, true);
      json deltas = json::array();
      const auto& fb = base.at("explanation").at("features");
      const auto& fm = mod.at("explanation").at("features");
      for (std::size_t j = 0; j < fb.size(); ++j)
        deltas.push_back({{"id", j},
                          {"feature", fb[j].at("feature")},
                          {"delta", fm[j].at("shap").get<double>() - fb[j].at("shap").get<double>()}});
      return json{{"base", base},
                  {"modified", mod},
                  {"score_delta", mod.at("score").get<double>() - base.at("score").get<double>()},
                  {"phi_deltas", deltas}};
    });
  }

  // Validates a {"record": {feature: value, ...}} body against the schema.
  // Absent or null features are filled from the artifact's training
  // statistics and listed in `imputed`.
  PatientRow parse_record(const json& req) const {
    const auto& schema = artifact_->schema;
    if (!req.contains("record") || !req["record"].is_object())
      throw RequestError("record", "body needs a 'record' object");
    const auto& rec = req["record"];
    for (const auto& [name, _] : rec.items())
      if (!schema.index_of(name)) throw RequestError(name, "unknown feature '" + name + "'");
    PatientRow row;
    row.values.resize(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const auto& name = schema.feature(j).name;
      const auto it = rec.find(name);
      if (it == rec.end() || it->is_null()) {
        if (artifact_->fill_values.empty())
          throw RequestError(name, "feature '" + name + "' is missing and the artifact has no imputation defaults");
        row.values[j] = artifact_->fill_values[j];
        row.imputed.push_back(name);
        continue;
      }
      row.values[j] = checked_value(j, *it);
    }
    return row;
  }

 private:
  double checked_value(std::size_t j, const json& v) const {
    const auto& spec = artifact_->schema.feature(j);
    if (!v.is_number()) throw RequestError(spec.name, "feature '" + spec.name + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw RequestError(spec.name, "feature '" + spec.name + "' must be finite");
    if (spec.is_categorical()) {
      if (std::floor(x) != x || !spec.has_code(static_cast<int>(x)))
        throw RequestError(spec.name, "feature '" + spec.name + "': undeclared code " + detail::format_number(x));
    } else if (spec.range && (x < spec.range->first || x > spec.range->second)) {
      throw RequestError(spec.name, "feature '" + spec.name + "' outside [" + detail::format_number(spec.range->first) +
                                        ", " + detail::format_number(spec.range->second) + "]");
    }
    return x;
  }

  json metadata() const {
    const auto& a = *artifact_;
    return json{{"family", family_id(a.family())},
                {"format_version", a.format_version},
                {"schema_fingerprint", a.fingerprint}};
  }

  json risk_response(const PatientRow& row, bool with_explanation) const {
    const auto& a = *artifact_;
    const double s = predict_score(a.model, row.values);
    json out{{"score", s},
             {"label", s >= options_.threshold ? 1 : 0},
             {"threshold", options_.threshold},
             {"imputed", row.imputed},
             {"model", metadata()}};
    if (with_explanation) out["explanation"] = to_json(explain(a.model, row.values, *background_), a.schema);
    return out;
  }

  void require_background() const {
    if (loaded() && !background_)
      throw Error(ErrorCode::MissingInput, "artifact carries no background rows for explanation");
  }

  static json parse_body(std::string_view body) {
    try {
      auto j = json::parse(body);
      if (!j.is_object()) throw RequestError("body", "request body must be a JSON object");
      return j;
    } catch (const json::parse_error& e) {
      throw RequestError("body", std::string("malformed JSON: ") + e.what());
    }
  }

  template <class Fn>
  HttpReply guarded(Fn&& fn) const {
    if (!loaded()) return not_loaded();
    try {
      return HttpReply{200, fn().dump()};
    } catch (const RequestError& e) {
      return error_reply(400, "SchemaViolation", e.field(), e.what());
    } catch (const Error& e) {
      return error_reply(e.code() == ErrorCode::MissingInput ? 503 : 500, std::string(to_string(e.code())), "",
                         e.what());
    }
  }

  static HttpReply not_loaded() { return error_reply(503, "ModelNotLoaded", "", "no model artifact loaded"); }

  static HttpReply error_reply(int status, std::string code, std::string field, std::string message) {
    json err{{"code", std::move(code)}, {"message", std::move(message)}};
    if (!field.empty()) err["field"] = std::move(field);
    return HttpReply{status, json{{"error", err}}.dump()};
  }

  std::optional<ModelArtifact> artifact_;
  ServiceOptions options_;
  std::optional<BackgroundSet> background_;
};

inline std::unique_ptr<httplib::Server> make_http_server(const RiskService& service) {
  auto server = std::make_unique<httplib::Server>();
  auto bind = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto reply = service.handle(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  for (const char* path : {"/v1/health", "/v1/model", "/v1/score", "/v1/explain", "/v1/whatif"}) {
    server->Get(path, bind);
    server->Post(path, bind);
  }
  return server;
}

}  // namespace riskforge
