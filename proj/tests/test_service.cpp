#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "json.hpp"

#include "afbench/data_engine.hpp"
#include "afbench/generators.hpp"
#include "afbench/metrics.hpp"
#include "afbench/service.hpp"
#include "httplib.h"

using namespace afbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json call(const Service& s, std::string_view method, std::string_view target, const json& body = nullptr,
          int* status = nullptr) {
  const auto r = s.handle(method, target, body.is_null() ? "" : body.dump());
  if (status) *status = r.status;
  return json::parse(r.body);
}

json airfoil_json(const Airfoil& a) { return json::parse(airfoil_to_json(a).dump()); }

fs::path dataset_dir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / ("afbench-svc-" + std::to_string(::getpid()));
    fs::remove_all(d);
    build_dataset(json{{"seed", 5}, {"sources", {{"naca4", {{"count", 30}}}}}}, d, d, {});
    return d;
  }();
  return dir;
}

ServiceOptions mounted(const fs::path& dir) {
  ServiceOptions o;
  o.dataset = dir;
  return o;
}

}  // namespace

TEST(Service, EnvelopeShape) {
  Service s;
  int status = 0;
  const auto ok = call(s, "POST", "/v1/annotate", {{"source", "naca:2412"}, {"request_id", "abc"}}, &status);
  EXPECT_EQ(status, 200);
  EXPECT_EQ(ok["request_id"], "abc");
  EXPECT_EQ(ok["operation"], "annotate");
  EXPECT_TRUE(ok.contains("payload"));
  EXPECT_FALSE(ok.contains("error"));
  const auto bad = call(s, "POST", "/v1/annotate", {{"source", 5}}, &status);
  EXPECT_EQ(status, 400);
  EXPECT_TRUE(bad.contains("error"));
  EXPECT_FALSE(bad.contains("payload"));
  EXPECT_EQ(bad["error"]["code"], "parse_error");
}

TEST(Service, RequestIds) {
  Service s;
  const auto a = s.handle("GET", "/v1/health", "", "hdr-1");
  EXPECT_EQ(json::parse(a.body)["request_id"], "hdr-1");
  const auto b = json::parse(s.handle("GET", "/v1/health", "").body)["request_id"].get<std::string>();
  EXPECT_EQ(b, "req-" + sha256_hex("GET /v1/health\n").substr(0, 16));
  const auto c = s.handle("POST", "/v1/annotate", R"({"source":"naca:0012","request_id":"body-id"})", "hdr-2");
  EXPECT_EQ(json::parse(c.body)["request_id"], "body-id");
}

TEST(Service, MalformedBody) {
  Service s;
  const auto r = s.handle("POST", "/v1/edit", "{not json");
  EXPECT_EQ(r.status, 400);
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["error"]["code"], "parse_error");
  EXPECT_EQ(j["operation"], "edit");
  EXPECT_EQ(s.handle("POST", "/v1/edit", "[1,2]").status, 400);
  EXPECT_EQ(s.handle("POST", "/v1/edit", R"({"target_parsec":{"r_le":0.02}})").status, 400);
}

TEST(Service, UnknownRoute) {
  Service s;
  int status = 0;
  const auto j = call(s, "GET", "/v2/nothing", nullptr, &status);
  EXPECT_EQ(status, 404);
  EXPECT_EQ(j["error"]["code"], "not_found");
  call(s, "GET", "/v1/generate", nullptr, &status);
  EXPECT_EQ(status, 404);
}

TEST(Generate, EmptyRequest) {
  Service s;
  int status = 0;
  const auto j = call(s, "POST", "/v1/generate", {{"n", 0}}, &status);
  EXPECT_EQ(status, 200);
  EXPECT_TRUE(j["payload"]["airfoils"].empty());
}

TEST(Generate, DeterministicDistinctSmooth) {
  Service s;
  const json req{{"source", "naca:2412"}, {"n", 5}, {"seed", 17}};
  const auto a = s.handle("POST", "/v1/generate", req.dump());
  const auto b = s.handle("POST", "/v1/generate", req.dump());
  EXPECT_EQ(a.body, b.body);
  const auto list = json::parse(a.body)["payload"]["airfoils"];
  ASSERT_EQ(list.size(), 5u);
  std::set<std::string> distinct;
  for (const auto& item : list) {
    const Airfoil air = airfoil_from_json(item, false);
    EXPECT_EQ(air.size(), 257u);
    EXPECT_LT(smoothness(air), 0.05);
    EXPECT_NEAR(item["smoothness"].get<double>(), smoothness(air), 1e-12);
    EXPECT_TRUE(item["parsec"].is_object());
    EXPECT_EQ(item["keypoints"].size(), kDefaultKeypointCount);
    distinct.insert(item["points"].dump());
  }
  EXPECT_EQ(distinct.size(), 5u);
}

TEST(Generate, Limits) {
  Service s;
  int status = 0;
  call(s, "POST", "/v1/generate", {{"source", "naca:2412"}, {"n", 257}}, &status);
  EXPECT_EQ(status, 400);
  call(s, "POST", "/v1/generate", {{"source", "naca:2412"}, {"n", -1}}, &status);
  EXPECT_EQ(status, 400);
  call(s, "POST", "/v1/generate", {{"n", 3}}, &status);
  EXPECT_EQ(status, 400);
}

TEST(Generate, UnfittableSeed) {
  Service s;
  int status = 0;
  const auto j = call(s, "POST", "/v1/generate", {{"source", airfoil_json(naca4("0012", 65))}, {"n", 2}, {"degree", 200}}, &status);
  EXPECT_EQ(status, 422);
  EXPECT_EQ(j["error"]["code"], "rank_deficient");
  EXPECT_NE(j["error"]["message"].get<std::string>().find("condition"), std::string::npos);
}

TEST(Edit, IdentityEchoesSource) {
  Service s;
  const Airfoil a = naca4("2412");
  const json req{{"source", airfoil_json(a)},
                 {"target_keypoints", json::parse(points_to_json(extract_keypoints(a)).dump())},
                 {"target_parsec", json::parse(to_json(annotate_parsec(a)).dump())}};
  int status = 0;
  const auto j = call(s, "POST", "/v1/edit", req, &status);
  ASSERT_EQ(status, 200);
  const Airfoil out = airfoil_from_json(j["payload"]["airfoil"], false);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(distance(out.points[i], a.points[i]), 1e-6);
}

TEST(Edit, ServiceMatchesOfflineEditorExactly) {
  Service s;
  const Airfoil src = naca4("0012");
  const auto target = annotate_parsec(naca4("2412"));
  const json req{{"source", "naca:0012"}, {"target_parsec", json::parse(to_json(target).dump())}, {"mode", "ep"}};
  const auto j = call(s, "POST", "/v1/edit", req);
  const auto offline = edit_ep(src, full_targets(target));
  const auto& p = j["payload"];
  EXPECT_EQ(p["sigma_bar"].get<double>(), offline.sigma.sigma_bar);
  for (std::size_t i = 0; i < kParsecCount; ++i) {
    EXPECT_EQ(p["sigma"][std::string(parsec_names()[i])].get<double>(), offline.sigma.sigma[i]);
  }
  EXPECT_EQ(p["trace"].get<std::vector<double>>(), offline.trace);
  EXPECT_EQ(p["status"], std::string(to_string(offline.status)));
}

TEST(Edit, PartialTargetsAndOverrides) {
  Service s;
  const json req{{"source", "naca:0012"},
                 {"target_parsec", {{"r_le", 0.02}}},
                 {"weights", {{"reg", 1e-3}}},
                 {"limits", {{"max_iter", 5}}}};
  const auto j = call(s, "POST", "/v1/edit", req);
  const auto& p = j["payload"];
  EXPECT_TRUE(p["sigma"]["y_up"].is_null());
  EXPECT_TRUE(p["sigma"]["r_le"].is_number());
  EXPECT_EQ(p["weights"]["reg"], 1e-3);
  EXPECT_EQ(p["weights"]["param"], 1.0);
  EXPECT_EQ(p["limits"]["max_iter"], 5);
  EXPECT_LE(p["iterations"].get<int>(), 5);
}

TEST(Edit, ProgressiveStream) {
  Service s;
  const json req{{"source", "naca:0012"}, {"target_parsec", {{"y_up", 0.07}}}, {"progressive", true}, {"request_id", "p1"}};
  const auto r = s.handle("POST", "/v1/edit", req.dump());
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "application/x-ndjson");
  std::istringstream is(r.body);
  std::vector<json> lines;
  for (std::string line; std::getline(is, line);) lines.push_back(json::parse(line));
  ASSERT_GE(lines.size(), 2u);
  const auto& last = lines.back();
  ASSERT_TRUE(last.contains("payload"));
  const auto trace = last["payload"]["trace"].get<std::vector<double>>();
  ASSERT_EQ(lines.size() - 1, trace.size());
  for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
    EXPECT_EQ(lines[k]["request_id"], "p1");
    EXPECT_EQ(lines[k]["event"]["iteration"], static_cast<int>(k));
    EXPECT_EQ(lines[k]["event"]["objective"].get<double>(), trace[k]);
    EXPECT_EQ(lines[k]["event"]["points"].size(), 257u);
  }
}

TEST(Metrics, MirrorsLibrary) {
  Service s;
  std::vector<Airfoil> pop;
  json airfoils = json::array();
  for (const char* d : {"0012", "2412", "4415", "0009", "6409", "2415"}) {
    pop.push_back(naca4(d));
    airfoils.push_back(airfoil_json(pop.back()));
  }
  const auto target = annotate_parsec(naca4("2412"));
  json targets = json::array();
  for (std::size_t i = 0; i < pop.size(); ++i) targets.push_back(i == 1 ? json(nullptr) : json::parse(to_json(target).dump()));
  std::vector<std::vector<bool>> conv(6, std::vector<bool>(66, false));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t k = 0; k < 10 * i + 15; ++k) conv[i][k] = true;
  }
  const json req{{"airfoils", airfoils},
                 {"targets", targets},
                 {"diversity", {{"subset_size", 3}, {"n_draws", 20}, {"seed", 2}}},
                 {"convergence", conv}};
  int status = 0;
  const auto j = call(s, "POST", "/v1/metrics", req, &status);
  ASSERT_EQ(status, 200);
  const auto& p = j["payload"];
  DiversityConfig cfg;
  cfg.subset_size = 3;
  cfg.n_draws = 20;
  cfg.seed = 2;
  EXPECT_EQ(p["diversity"].get<double>(), diversity(pop, cfg));
  EXPECT_EQ(p["success_rate"].get<double>(), success_rate(conv));
  for (std::size_t i = 0; i < pop.size(); ++i) {
    EXPECT_EQ(p["per_airfoil"][i]["smoothness"].get<double>(), smoothness(pop[i]));
    if (i == 1) {
      EXPECT_FALSE(p["per_airfoil"][i].contains("sigma_bar"));
    } else {
      EXPECT_EQ(p["per_airfoil"][i]["sigma_bar"].get<double>(), label_error(annotate_parsec(pop[i]), target).sigma_bar);
    }
  }
}

TEST(Metrics, PopulationTooSmall) {
  Service s;
  int status = 0;
  const auto j = call(s, "POST", "/v1/metrics", {{"airfoils", {airfoil_json(naca4("0012"))}}, {"diversity", true}}, &status);
  EXPECT_EQ(status, 400);
  EXPECT_NE(j["error"]["message"].get<std::string>().find("population too small"), std::string::npos);
}

TEST(Metrics, InconsistentPointCounts) {
  Service s;
  int status = 0;
  call(s, "POST", "/v1/metrics", {{"airfoils", {airfoil_json(naca4("0012")), airfoil_json(naca4("0012", 129))}}}, &status);
  EXPECT_EQ(status, 400);
}

TEST(Metrics, AeroUnavailableWithoutSolver) {
  Service s;
  int status = 0;
  const auto j = call(s, "POST", "/v1/metrics", {{"airfoils", {airfoil_json(naca4("0012"))}}, {"evaluate_aero", true}}, &status);
  EXPECT_EQ(status, 503);
  EXPECT_EQ(j["error"]["code"], "aero_unavailable");
}

TEST(Dataset, BrowseSamples) {
  const auto dir = dataset_dir();
  Service s(mounted(dir));
  const auto m = read_manifest(dir / std::string(kManifestFile));
  int status = 0;
  const auto j = call(s, "GET", "/v1/airfoil/" + m.samples[3].id, nullptr, &status);
  ASSERT_EQ(status, 200);
  EXPECT_EQ(j["payload"]["id"], m.samples[3].id);
  EXPECT_EQ(j["payload"]["airfoil"]["points"].size(), 257u);
  EXPECT_EQ(j["payload"]["keypoints"].size(), m.samples[3].keypoints.size());
  call(s, "GET", "/v1/airfoil/naca4-99999", nullptr, &status);
  EXPECT_EQ(status, 404);
  const auto g = call(s, "POST", "/v1/generate", {{"source", "dataset:" + m.samples[0].id}, {"n", 2}}, &status);
  EXPECT_EQ(status, 200);
  EXPECT_EQ(g["payload"]["airfoils"].size(), 2u);
}

TEST(Dataset, ManifestPaging) {
  Service s(mounted(dataset_dir()));
  int status = 0;
  const auto p0 = call(s, "GET", "/v1/manifest?page=0&page_size=7", nullptr, &status);
  ASSERT_EQ(status, 200);
  EXPECT_EQ(p0["payload"]["total"], 30);
  EXPECT_EQ(p0["payload"]["samples"].size(), 7u);
  const auto p4 = call(s, "GET", "/v1/manifest?page=4&page_size=7", nullptr, &status);
  EXPECT_EQ(p4["payload"]["samples"].size(), 2u);
  const auto p9 = call(s, "GET", "/v1/manifest?page=9&page_size=7", nullptr, &status);
  EXPECT_TRUE(p9["payload"]["samples"].empty());
  EXPECT_EQ(call(s, "GET", "/v1/manifest", nullptr, &status)["payload"]["samples"].size(), 30u);
  call(s, "GET", "/v1/manifest?page_size=0", nullptr, &status);
  EXPECT_EQ(status, 400);
  call(s, "GET", "/v1/manifest?page_size=501", nullptr, &status);
  EXPECT_EQ(status, 400);
  call(s, "GET", "/v1/manifest?page=x", nullptr, &status);
  EXPECT_EQ(status, 400);
}

TEST(Dataset, NoneMounted) {
  Service s;
  int status = 0;
  call(s, "GET", "/v1/manifest", nullptr, &status);
  EXPECT_EQ(status, 404);
}

TEST(Service, ReplayIsPure) {
  Service s(mounted(dataset_dir()));
  const std::vector<std::tuple<std::string, std::string, std::string>> log{
      {"POST", "/v1/generate", R"({"source":"naca:4415","n":3,"seed":9})"},
      {"POST", "/v1/annotate", R"({"source":"naca:23012"})"},
      {"GET", "/v1/manifest?page=1&page_size=4", ""},
      {"POST", "/v1/edit", R"({"source":"naca:0012","target_parsec":{"y_up":0.065},"limits":{"max_iter":10}})"},
  };
  std::vector<std::string> first;
  for (const auto& [m, t, b] : log) first.push_back(s.handle(m, t, b).body);
  Service again(mounted(dataset_dir()));
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& [m, t, b] = log[i];
    EXPECT_EQ(again.handle(m, t, b).body, first[i]);
  }
}

TEST(Service, HttpRoundTrip) {
  Service s(mounted(dataset_dir()));
  const int port = 20000 + static_cast<int>(::getpid() % 20000);
  std::ostringstream log;
  std::thread([&s, port, &log] { s.serve("127.0.0.1", port, log); }).detach();
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(2);
  httplib::Result health;
  for (int i = 0; i < 50 && !health; ++i) {
    health = cli.Get("/v1/health");
    if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");
  const auto page = cli.Get("/v1/manifest?page=1&page_size=5");
  ASSERT_TRUE(page);
  EXPECT_EQ(json::parse(page->body)["payload"]["samples"].size(), 5u);
  const auto missing = cli.Get("/v1/airfoil/none");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  const json req{{"source", "naca:0012"}, {"target_parsec", {{"y_up", 0.065}}}, {"progressive", true}};
  const auto streamed = cli.Post("/v1/edit", req.dump(), "application/json");
  ASSERT_TRUE(streamed);
  EXPECT_EQ(streamed->status, 200);
  std::istringstream is(streamed->body);
  std::string line, last;
  int events = 0;
  while (std::getline(is, line)) {
    if (json::parse(line).contains("event")) ++events;
    last = line;
  }
  EXPECT_GT(events, 1);
  EXPECT_TRUE(json::parse(last).contains("payload"));
}

TEST(StatusCodes, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::invalid_argument), 400);
  EXPECT_EQ(http_status(ErrorCode::parse_error), 400);
  EXPECT_EQ(http_status(ErrorCode::not_found), 404);
  EXPECT_EQ(http_status(ErrorCode::rank_deficient), 422);
  EXPECT_EQ(http_status(ErrorCode::degenerate_geometry), 422);
  EXPECT_EQ(http_status(ErrorCode::aero_unavailable), 503);
}
