#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "afbench/aero.hpp"
#include "afbench/data_engine.hpp"
#include "afbench/editor.hpp"
#include "afbench/error.hpp"

namespace afbench {

inline constexpr std::size_t kMaxGenerate = 256;
inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 500;

// JSON wire forms shared by the service and the CLI ---------------------------------

nlohmann::ordered_json airfoil_to_json(const Airfoil& a);
/// {"points": [[x, y], ...], "name"?, "provenance"?}. Non-canonical point
/// counts are resampled to 257 when `canonicalize` is set.
Airfoil airfoil_from_json(const nlohmann::json& j, bool canonicalize);
/// Partial PARSEC object keyed by field name.
ParsecTargets parsec_targets_from_json(const nlohmann::json& j);
nlohmann::ordered_json cst_to_json(const CstParams& p);

/// Builds an EditRequest. `mode` is "ek", "ep", "custom" or "auto" (the
/// default): auto uses the keypoint-editing weights when only keypoints are
/// given and the parameter-editing weights when only PARSEC targets are.
EditRequest edit_request_from_json(const nlohmann::json& payload, const Airfoil& source);
nlohmann::ordered_json edit_result_to_json(const EditResult& r, const EditRequest& req);

// Service ---------------------------------------------------------------------------

struct ServiceOptions {
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> solver;
  std::chrono::milliseconds solver_timeout{10'000};
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Stateless request handling. The mounted dataset is read once at
/// construction and never written.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  /// `target` is the request path with an optional query string.
  HttpResponse handle(std::string_view method, std::string_view target, std::string_view body,
                      std::string_view request_id_header = {}) const;

  /// Progressive edit: one NDJSON line per iteration, then the final envelope.
  /// Returns the HTTP status of the final envelope.
  int stream_edit(std::string_view body, std::string_view request_id_header,
                  const std::function<void(std::string_view line)>& emit) const;

  /// Blocks serving HTTP/1.1; writes one access-log line per request to `log`.
  void serve(const std::string& host, int port, std::ostream& log) const;

 private:
  nlohmann::ordered_json generate(const nlohmann::json& payload) const;
  nlohmann::ordered_json annotate(const nlohmann::json& payload) const;
  nlohmann::ordered_json metrics(const nlohmann::json& payload) const;
  nlohmann::ordered_json sample(std::string_view id) const;
  nlohmann::ordered_json manifest_page(const std::map<std::string, std::string>& query) const;
  Airfoil resolve_source(const nlohmann::json& ref) const;

  ServiceOptions options_;
  std::optional<DatasetManifest> manifest_;
  std::map<std::string, std::size_t> index_;
  std::unique_ptr<AeroSolver> solver_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

}  // namespace afbench
