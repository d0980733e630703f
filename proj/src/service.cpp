#include "afbench/service.hpp"

#include <charconv>
#include <chrono>
#include <iostream>
#include <mutex>

#include "httplib.h"

#include "afbench/cst.hpp"
#include "afbench/dat_io.hpp"
#include "afbench/error.hpp"
#include "afbench/generators.hpp"
#include "afbench/metrics.hpp"

namespace afbench {

using nlohmann::json;
using nlohmann::ordered_json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::parse_error:
    case ErrorCode::out_of_range: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::degenerate_geometry:
    case ErrorCode::rank_deficient:
    case ErrorCode::numerical: return 422;
    case ErrorCode::aero_unavailable: return 503;
  }
  return 500;
}

// Wire forms ------------------------------------------------------------------------

ordered_json airfoil_to_json(const Airfoil& a) {
  ordered_json j;
  j["name"] = a.name;
  j["provenance"] = to_string(a.provenance);
  j["points"] = points_to_json(a.points);
  return j;
}

Airfoil airfoil_from_json(const json& j, bool canonicalize) {
  if (!j.is_object() || !j.contains("points")) throw Error(ErrorCode::parse_error, "airfoil must have a points array");
  auto pts = points_from_json(j.at("points"));
  Airfoil a;
  if (canonicalize && pts.size() != kCanonicalPointCount) {
    a = resample_airfoil(pts);
  } else {
    a.points = std::move(pts);
  }
  a.name = j.value("name", "");
  a.provenance = j.contains("provenance") ? provenance_from_string(j["provenance"].get<std::string>()) : Provenance::manual;
  return a;
}

ParsecTargets parsec_targets_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "PARSEC targets must be an object");
  ParsecTargets t{};
  for (const auto& [k, v] : j.items()) {
    if (v.is_null()) continue;
    if (!v.is_number()) throw Error(ErrorCode::parse_error, "PARSEC target '" + k + "' is not a number");
    t[parsec_index(k)] = v.get<double>();
  }
  return t;
}

ordered_json cst_to_json(const CstParams& p) {
  ordered_json j;
  j["upper"] = p.upper_coeffs;
  j["lower"] = p.lower_coeffs;
  j["zeta_te_upper"] = p.zeta_te_upper;
  j["zeta_te_lower"] = p.zeta_te_lower;
  j["n1"] = p.n1;
  j["n2"] = p.n2;
  return j;
}

EditRequest edit_request_from_json(const json& payload, const Airfoil& source) {
  std::optional<std::vector<Point2>> kp;
  std::optional<ParsecTargets> parsec;
  if (payload.contains("target_keypoints") && !payload["target_keypoints"].is_null()) {
    kp = points_from_json(payload["target_keypoints"]);
  }
  if (payload.contains("target_parsec") && !payload["target_parsec"].is_null()) {
    parsec = parsec_targets_from_json(payload["target_parsec"]);
  }
  std::string mode = payload.value("mode", "auto");
  if (mode == "auto") mode = kp && !parsec ? "ek" : parsec && !kp ? "ep" : "custom";

  EditRequest req;
  if (mode == "ek") {
    if (!kp) throw Error(ErrorCode::invalid_argument, "edit: mode ek needs target_keypoints");
    req = make_ek_request(source, *kp);
  } else if (mode == "ep") {
    if (!parsec) throw Error(ErrorCode::invalid_argument, "edit: mode ep needs target_parsec");
    req = make_ep_request(source, *parsec);
  } else if (mode == "custom") {
    req.source = source;
    req.target_keypoints = kp;
    req.target_parsec = parsec;
  } else {
    throw Error(ErrorCode::invalid_argument, "edit: unknown mode '" + mode + "'");
  }
  if (payload.contains("weights")) {
    const auto& w = payload["weights"];
    req.weights.keypoint = w.value("keypoint", req.weights.keypoint);
    req.weights.param = w.value("param", req.weights.param);
    req.weights.reg = w.value("reg", req.weights.reg);
  }
  if (payload.contains("limits")) {
    const auto& l = payload["limits"];
    req.limits.max_iter = l.value("max_iter", req.limits.max_iter);
    req.limits.tol = l.value("tol", req.limits.tol);
  }
  return req;
}

ordered_json edit_result_to_json(const EditResult& r, const EditRequest& req) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["trace"] = r.trace;
  j["airfoil"] = airfoil_to_json(r.airfoil);
  j["keypoints"] = points_to_json(extract_keypoints(
      r.airfoil, req.target_keypoints ? req.target_keypoints->size() : kDefaultKeypointCount));
  j["achieved"] = to_json(r.achieved);
  ordered_json sigma = ordered_json::object();
  for (std::size_t i = 0; i < kParsecCount; ++i) {
    const bool targeted = req.target_parsec && (*req.target_parsec)[i].has_value();
    sigma[std::string(parsec_names()[i])] = targeted ? ordered_json(r.sigma.sigma[i]) : ordered_json(nullptr);
  }
  j["sigma"] = sigma;
  j["sigma_bar"] = r.sigma.sigma_bar;
  j["cst"] = cst_to_json(r.params);
  j["weights"] = {{"keypoint", req.weights.keypoint}, {"param", req.weights.param}, {"reg", req.weights.reg}};
  j["limits"] = {{"max_iter", req.limits.max_iter}, {"tol", req.limits.tol}};
  return j;
}

// Helpers ---------------------------------------------------------------------------

namespace {

struct Route {
  std::string operation;
  std::string path;
  std::map<std::string, std::string> query;
};

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

Route parse_target(std::string_view target) {
  Route r;
  const auto q = target.find('?');
  r.path = url_decode(target.substr(0, q));
  if (q != std::string_view::npos) {
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const auto part = rest.substr(0, amp);
      const auto eq = part.find('=');
      if (!part.empty()) {
        r.query[url_decode(part.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(part.substr(eq + 1));
      }
      if (amp == std::string_view::npos) break;
      rest = rest.substr(amp + 1);
    }
  }
  return r;
}

std::string request_id_for(std::string_view method, std::string_view target, std::string_view body,
                           const json* parsed, std::string_view header) {
  if (parsed && parsed->is_object() && parsed->contains("request_id") && (*parsed)["request_id"].is_string()) {
    return (*parsed)["request_id"].get<std::string>();
  }
  if (!header.empty()) return std::string(header);
  std::string key(method);
  key += ' ';
  key += target;
  key += '\n';
  key += body;
  return "req-" + sha256_hex(key).substr(0, 16);
}

std::string envelope(const std::string& rid, const std::string& op, const ordered_json& payload) {
  ordered_json j;
  j["request_id"] = rid;
  j["operation"] = op;
  j["payload"] = payload;
  return j.dump();
}

std::string error_envelope(const std::string& rid, const std::string& op, std::string_view code,
                           const std::string& message) {
  ordered_json j;
  j["request_id"] = rid;
  j["operation"] = op;
  j["error"] = {{"code", code}, {"message", message}};
  return j.dump();
}

std::size_t parse_size(const std::map<std::string, std::string>& q, const std::string& key, std::size_t fallback) {
  const auto it = q.find(key);
  if (it == q.end()) return fallback;
  std::size_t v = 0;
  const auto* b = it->second.data();
  const auto [p, ec] = std::from_chars(b, b + it->second.size(), v);
  if (ec != std::errc() || p != b + it->second.size()) {
    throw Error(ErrorCode::invalid_argument, "query parameter '" + key + "' must be a non-negative integer");
  }
  return v;
}

ordered_json sample_summary(const SampleEntry& s) {
  ordered_json j;
  j["id"] = s.id;
  j["provenance"] = to_string(s.provenance);
  j["parent"] = s.parent;
  j["split"] = to_string(s.split);
  j["aero"] = s.aero == AeroStatus::annotated ? "annotated" : "unavailable";
  j["parsec"] = to_json(s.parsec);
  return j;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::parse_error, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed JSON body: ") + e.what());
  }
}

/// Payload is either the "payload" member or the body itself.
const json& payload_of(const json& body) {
  if (body.contains("payload")) return body["payload"];
  return body;
}

}  // namespace

// Service ---------------------------------------------------------------------------

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.dataset) {
    manifest_ = read_manifest(*options_.dataset / kManifestFile);
    for (std::size_t i = 0; i < manifest_->samples.size(); ++i) index_[manifest_->samples[i].id] = i;
  }
  if (options_.solver) {
    AeroConfig cfg;
    cfg.solver = options_.solver;
    cfg.timeout = options_.solver_timeout;
    solver_ = make_solver(cfg);
  }
}

Airfoil Service::resolve_source(const json& ref) const {
  if (ref.is_object()) return airfoil_from_json(ref, true);
  if (!ref.is_string()) throw Error(ErrorCode::parse_error, "source must be an airfoil object or a name");
  const auto name = ref.get<std::string>();
  if (name.rfind("naca:", 0) == 0) return resolve_airfoil_source(name, {});
  if (name.rfind("dataset:", 0) == 0) {
    const auto id = name.substr(8);
    const auto it = index_.find(id);
    if (!manifest_ || it == index_.end()) throw Error(ErrorCode::not_found, "unknown sample id '" + id + "'");
    return load_sample(*options_.dataset, manifest_->samples[it->second]);
  }
  throw Error(ErrorCode::invalid_argument, "source names are 'naca:<digits>' or 'dataset:<id>'");
}

ordered_json Service::generate(const json& p) const {
  const auto n = p.value("n", std::size_t{8});
  if (p.contains("n") && (!p["n"].is_number_integer() || p["n"].get<long long>() < 0)) {
    throw Error(ErrorCode::invalid_argument, "generate: n must be a non-negative integer");
  }
  if (n > kMaxGenerate) throw Error(ErrorCode::invalid_argument, "generate: n exceeds 256");
  const double band = p.value("band", kDefaultPerturbBand);
  const auto seed = p.value("seed", std::uint64_t{0});
  const auto degree = p.value("degree", kDefaultCstDegree);
  ordered_json out;
  out["airfoils"] = ordered_json::array();
  if (n == 0) return out;
  if (!p.contains("source")) throw Error(ErrorCode::invalid_argument, "generate: missing source");
  const Airfoil base = resolve_source(p["source"]);
  const CstFit fit = cst_fit(base, degree);
  auto candidates = cst_perturb_generate(fit.params, n, band, seed);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& a = candidates[i];
    a.name = (base.name.empty() ? std::string("candidate") : base.name) + "-" + std::to_string(i);
    ordered_json j = airfoil_to_json(a);
    try {
      j["parsec"] = to_json(annotate_parsec(a));
    } catch (const Error& e) {
      j["parsec"] = nullptr;
      j["annotation_error"] = e.what();
    }
    j["keypoints"] = points_to_json(extract_keypoints(a));
    j["smoothness"] = smoothness(a);
    out["airfoils"].push_back(std::move(j));
  }
  out["fit"] = {{"max_residual", fit.max_residual}, {"rms_residual", fit.rms_residual}};
  return out;
}

ordered_json Service::annotate(const json& p) const {
  if (!p.contains("source")) throw Error(ErrorCode::invalid_argument, "annotate: missing source");
  const Airfoil a = resolve_source(p["source"]);
  ordered_json out;
  out["airfoil"] = airfoil_to_json(a);
  out["parsec"] = to_json(annotate_parsec(a));
  out["keypoints"] = points_to_json(extract_keypoints(a, p.value("keypoint_count", kDefaultKeypointCount)));
  out["smoothness"] = smoothness(a);
  return out;
}

ordered_json Service::metrics(const json& p) const {
  if (!p.contains("airfoils") || !p["airfoils"].is_array()) {
    throw Error(ErrorCode::invalid_argument, "metrics: missing airfoils array");
  }
  std::vector<Airfoil> pop;
  for (const auto& j : p["airfoils"]) pop.push_back(airfoil_from_json(j, false));
  for (const auto& a : pop) {
    if (a.size() != pop.front().size()) throw Error(ErrorCode::invalid_argument, "metrics: inconsistent point counts");
  }
  const json targets = p.value("targets", json::array());
  if (!targets.is_array() || (!targets.empty() && targets.size() != pop.size())) {
    throw Error(ErrorCode::invalid_argument, "metrics: targets must align with airfoils");
  }

  ordered_json out;
  out["per_airfoil"] = ordered_json::array();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    ordered_json row;
    row["smoothness"] = smoothness(pop[i]);
    if (!targets.empty() && !targets[i].is_null()) {
      const auto t = parsec_targets_from_json(targets[i]);
      const auto achieved = annotate_parsec(pop[i]);
      const auto a = achieved.to_array();
      bool full = true;
      for (const auto& v : t) full = full && v.has_value();
      ordered_json sigma = ordered_json::object();
      double sigma_bar = 0.0;
      if (full) {
        std::array<double, kParsecCount> tv{};
        for (std::size_t k = 0; k < kParsecCount; ++k) tv[k] = *t[k];
        const auto rep = label_error(achieved, ParsecParams::from_array(tv));
        for (std::size_t k = 0; k < kParsecCount; ++k) sigma[std::string(parsec_names()[k])] = rep.sigma[k];
        sigma_bar = rep.sigma_bar;
      } else {
        int count = 0;
        for (std::size_t k = 0; k < kParsecCount; ++k) {
          if (t[k]) {
            const double s = std::abs(a[k] - *t[k]);
            sigma[std::string(parsec_names()[k])] = s;
            sigma_bar += s;
            ++count;
          } else {
            sigma[std::string(parsec_names()[k])] = nullptr;
          }
        }
        if (count == 0) throw Error(ErrorCode::invalid_argument, "metrics: empty target object");
        sigma_bar /= count;
      }
      row["parsec"] = to_json(achieved);
      row["sigma"] = sigma;
      row["sigma_bar"] = sigma_bar;
    }
    out["per_airfoil"].push_back(std::move(row));
  }

  if (p.contains("diversity") && !p["diversity"].is_null() && p["diversity"] != false) {
    const json d = p["diversity"].is_object() ? p["diversity"] : json::object();
    DiversityConfig cfg;
    cfg.subset_size = d.value("subset_size", cfg.subset_size);
    cfg.n_draws = d.value("n_draws", cfg.n_draws);
    cfg.seed = d.value("seed", cfg.seed);
    cfg.jitter = d.value("jitter", cfg.jitter);
    if (d.contains("bandwidth")) {
      cfg.bandwidth_mode = BandwidthMode::fixed;
      cfg.bandwidth = d["bandwidth"].get<double>();
    }
    out["diversity"] = diversity(pop, cfg);
  } else {
    out["diversity"] = nullptr;
  }

  std::optional<std::vector<std::vector<bool>>> conv;
  if (p.contains("convergence") && !p["convergence"].is_null()) {
    conv = p["convergence"].get<std::vector<std::vector<bool>>>();
  } else if (p.value("evaluate_aero", false)) {
    if (!solver_) throw Error(ErrorCode::aero_unavailable, "metrics: no solver configured");
    PolarCache cache;
    const auto grid = condition_grid();
    const auto polars = evaluate_batch(pop, grid, solver_.get(), cache, 0);
    conv.emplace();
    for (const auto& rec : polars) conv->push_back(convergence_vector(rec));
  }
  out["success_rate"] = conv ? ordered_json(success_rate(*conv, p.value("threshold", kSuccessThreshold)))
                             : ordered_json(nullptr);
  return out;
}

ordered_json Service::sample(std::string_view id) const {
  if (!manifest_) throw Error(ErrorCode::not_found, "no dataset mounted");
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::not_found, "unknown sample id '" + std::string(id) + "'");
  const auto& s = manifest_->samples[it->second];
  ordered_json j = sample_summary(s);
  j["file"] = s.file;
  j["keypoints"] = points_to_json(s.keypoints);
  j["airfoil"] = airfoil_to_json(load_sample(*options_.dataset, s));
  return j;
}

ordered_json Service::manifest_page(const std::map<std::string, std::string>& q) const {
  if (!manifest_) throw Error(ErrorCode::not_found, "no dataset mounted");
  const std::size_t page = parse_size(q, "page", 0);
  const std::size_t size = parse_size(q, "page_size", kDefaultPageSize);
  if (size == 0 || size > kMaxPageSize) throw Error(ErrorCode::invalid_argument, "page_size must be in 1..500");
  const auto& all = manifest_->samples;
  ordered_json j;
  j["config"] = manifest_->config;
  j["created"] = manifest_->created;
  j["total"] = all.size();
  j["page"] = page;
  j["page_size"] = size;
  j["samples"] = ordered_json::array();
  const std::size_t begin = std::min(all.size(), page * size);
  const std::size_t end = std::min(all.size(), begin + size);
  for (std::size_t i = begin; i < end; ++i) j["samples"].push_back(sample_summary(all[i]));
  return j;
}

HttpResponse Service::handle(std::string_view method, std::string_view target, std::string_view body,
                             std::string_view request_id_header) const {
  const Route route = parse_target(target);
  const std::string prefix = "/v1/airfoil/";
  std::string op = "unknown";
  if (method == "POST") {
    for (const char* name : {"generate", "edit", "annotate", "metrics"}) {
      if (route.path == std::string("/v1/") + name) op = name;
    }
  } else if (method == "GET") {
    if (route.path.rfind(prefix, 0) == 0) op = "airfoil";
    if (route.path == "/v1/manifest") op = "manifest";
    if (route.path == "/v1/health") op = "health";
  }
  std::optional<json> parsed;
  std::string rid = request_id_for(method, target, body, nullptr, request_id_header);
  HttpResponse res;
  try {
    if (method == "POST") {
      parsed = parse_body(body);
      rid = request_id_for(method, target, body, &*parsed, request_id_header);
    }
    const json& p = parsed ? payload_of(*parsed) : json::object();
    ordered_json payload;
    if (route.path == "/v1/generate" && method == "POST") {
      op = "generate";
      payload = generate(p);
    } else if (route.path == "/v1/edit" && method == "POST") {
      op = "edit";
      if (p.value("progressive", false)) {
        res.content_type = "application/x-ndjson";
        res.status = stream_edit(body, request_id_header, [&](std::string_view line) {
          res.body += line;
          res.body += '\n';
        });
        return res;
      }
      if (!p.contains("source")) throw Error(ErrorCode::invalid_argument, "edit: missing source");
      const EditRequest req = edit_request_from_json(p, resolve_source(p["source"]));
      payload = edit_result_to_json(edit(req), req);
    } else if (route.path == "/v1/annotate" && method == "POST") {
      op = "annotate";
      payload = annotate(p);
    } else if (route.path == "/v1/metrics" && method == "POST") {
      op = "metrics";
      payload = metrics(p);
    } else if (route.path.rfind(prefix, 0) == 0 && method == "GET") {
      op = "airfoil";
      payload = sample(std::string_view(route.path).substr(prefix.size()));
    } else if (route.path == "/v1/manifest" && method == "GET") {
      op = "manifest";
      payload = manifest_page(route.query);
    } else if (route.path == "/v1/health" && method == "GET") {
      op = "health";
      payload = {{"status", "ok"}, {"dataset", manifest_.has_value()}, {"solver", solver_ ? solver_->name() : "none"}};
    } else {
      res.status = 404;
      res.body = error_envelope(rid, op, "not_found", "no route for " + std::string(method) + " " + route.path);
      return res;
    }
    res.body = envelope(rid, op, payload);
  } catch (const Error& e) {
    res.status = http_status(e.code());
    res.body = error_envelope(rid, op, to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    res.status = 400;
    res.body = error_envelope(rid, op, "parse_error", e.what());
  }
  return res;
}

int Service::stream_edit(std::string_view body, std::string_view request_id_header,
                         const std::function<void(std::string_view)>& emit) const {
  std::string rid = request_id_for("POST", "/v1/edit", body, nullptr, request_id_header);
  try {
    const json parsed = parse_body(body);
    rid = request_id_for("POST", "/v1/edit", body, &parsed, request_id_header);
    const json& p = payload_of(parsed);
    if (!p.contains("source")) throw Error(ErrorCode::invalid_argument, "edit: missing source");
    const EditRequest req = edit_request_from_json(p, resolve_source(p["source"]));
    const auto result = edit(req, [&](const EditProgress& ev) {
      ordered_json j;
      j["request_id"] = rid;
      j["operation"] = "edit";
      j["event"] = {{"iteration", ev.iteration}, {"objective", ev.objective}, {"points", points_to_json(ev.current.points)}};
      emit(j.dump());
    });
    emit(envelope(rid, "edit", edit_result_to_json(result, req)));
    return 200;
  } catch (const Error& e) {
    emit(error_envelope(rid, "edit", to_string(e.code()), e.what()));
    return http_status(e.code());
  } catch (const json::exception& e) {
    emit(error_envelope(rid, "edit", "parse_error", e.what()));
    return 400;
  }
}

void Service::serve(const std::string& host, int port, std::ostream& log) const {
  httplib::Server server;
  std::mutex log_mutex;
  auto access = [&](const httplib::Request& req, int status, double ms) {
    ordered_json line;
    const auto now = std::chrono::system_clock::now();
    line["ts_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    line["method"] = req.method;
    line["path"] = req.path;
    line["status"] = status;
    line["duration_ms"] = ms;
    line["bytes_in"] = req.body.size();
    std::lock_guard lock(log_mutex);
    log << line.dump() << std::endl;
  };
  auto dispatch = [&](const httplib::Request& req, httplib::Response& res) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rid = req.get_header_value("X-Request-Id");
    bool progressive = false;
    if (req.method == "POST" && req.path == "/v1/edit") {
      try {
        const auto j = json::parse(req.body);
        progressive = payload_of(j).value("progressive", false);
      } catch (const json::exception&) {
      }
    }
    if (progressive) {
      const std::string body = req.body;
      res.set_chunked_content_provider("application/x-ndjson", [this, body, rid](std::size_t, httplib::DataSink& sink) {
        stream_edit(body, rid, [&](std::string_view line) {
          std::string l(line);
          l += '\n';
          sink.write(l.data(), l.size());
        });
        sink.done();
        return true;
      });
      res.status = 200;
    } else {
      std::string target = req.path;
      if (!req.params.empty()) {
        target += '?';
        bool first = true;
        for (const auto& [k, v] : req.params) {
          if (!first) target += '&';
          first = false;
          target += httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
        }
      }
      const auto out = handle(req.method, target, req.body, rid);
      res.status = out.status;
      res.set_content(out.body, out.content_type);
    }
    res.set_header("Access-Control-Allow-Origin", "*");
    access(req, res.status, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  };
  server.Get(R"(/.*)", dispatch);
  server.Post(R"(/.*)", dispatch);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Request-Id");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  if (!server.listen(host, port)) throw Error(ErrorCode::invalid_argument, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace afbench
