// afbench command-line front end: dataset pipeline, metrics, editing and the
// HTTP service.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"

#include "afbench/aero.hpp"
#include "afbench/dat_io.hpp"
#include "afbench/data_engine.hpp"
#include "afbench/editor.hpp"
#include "afbench/error.hpp"
#include "afbench/metrics.hpp"
#include "afbench/service.hpp"
#include "afbench/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace afbench;

namespace {

json read_json(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw Error(ErrorCode::not_found, "cannot read " + p.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, p.string() + ": " + e.what());
  }
}

std::vector<fs::path> dat_inputs(const fs::path& in) {
  if (fs::is_regular_file(in)) return {in};
  if (!fs::is_directory(in)) throw Error(ErrorCode::not_found, "no such file or directory: " + in.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in)) {
    if (e.is_regular_file() && e.path().extension() == ".dat") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::unique_ptr<AeroSolver> solver_from(const std::string& solver, const std::string& aero_config) {
  AeroConfig cfg = load_aero_config(aero_config.empty() ? std::nullopt : std::optional<fs::path>(aero_config));
  if (!solver.empty()) cfg.solver = solver == "none" ? std::nullopt : std::optional<fs::path>(solver);
  return make_solver(cfg);
}

std::string summary(const DatasetManifest& m) {
  std::array<std::size_t, 3> n{};
  for (const auto& s : m.samples) ++n[static_cast<std::size_t>(s.split)];
  return std::to_string(m.samples.size()) + " samples (train " + std::to_string(n[0]) + ", val " +
         std::to_string(n[1]) + ", test " + std::to_string(n[2]) + "), " + std::to_string(m.skipped.size()) +
         " skipped, " + std::to_string(m.discarded.size()) + " discarded";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airfoil inverse-design workbench"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Build a dataset from a JSON config");
  std::string gen_config, gen_out, gen_solver;
  std::optional<std::uint64_t> gen_seed;
  unsigned gen_workers = 0;
  gen->add_option("--config", gen_config, "Dataset config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--seed", gen_seed, "Override the config seed");
  gen->add_option("--solver", gen_solver, "Solver executable or 'none'");
  gen->add_option("--workers", gen_workers, "Worker threads (0 = all cores)");

  // annotate
  auto* ann = app.add_subcommand("annotate", "PARSEC labels and keypoints for .dat files");
  std::string ann_in, ann_out;
  std::size_t ann_kp = kDefaultKeypointCount;
  ann->add_option("input", ann_in, ".dat file or directory")->required();
  ann->add_option("--out", ann_out, "Write JSON lines here instead of stdout");
  ann->add_option("--keypoints", ann_kp, "Keypoint count");

  // filter
  auto* flt = app.add_subcommand("filter", "Evaluate a dataset on the 66-condition grid and drop all-fail airfoils");
  std::string flt_dir, flt_solver, flt_config;
  unsigned flt_workers = 0;
  flt->add_option("--out,--dataset", flt_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  flt->add_option("--solver", flt_solver, "Solver executable or 'none' (cache only)");
  flt->add_option("--config", flt_config, "Aero config (JSON)");
  flt->add_option("--workers", flt_workers, "Worker pool size");

  // split
  auto* spl = app.add_subcommand("split", "Reassign train/val/test labels");
  std::string spl_dir;
  std::uint64_t spl_seed = 0;
  std::vector<double> spl_ratios{0.8, 0.1, 0.1};
  bool spl_flat = false;
  spl->add_option("--out,--dataset", spl_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  spl->add_option("--seed", spl_seed, "Permutation seed");
  spl->add_option("--ratios", spl_ratios, "train val test")->expected(3);
  spl->add_flag("--unstratified", spl_flat, "Ignore provenance when splitting");

  // eval
  auto* ev = app.add_subcommand("eval", "Benchmark metrics for a dataset or a directory of .dat files");
  std::string ev_in, ev_targets, ev_label, ev_split, ev_out;
  std::uint64_t ev_seed = 0;
  std::size_t ev_subset = 16, ev_draws = 100;
  bool ev_json = false;
  ev->add_option("input", ev_in, "Dataset directory or directory of .dat files")->required();
  ev->add_option("--targets", ev_targets, "JSON object mapping sample id or file stem to PARSEC targets");
  ev->add_option("--split", ev_split, "Only this split (datasets)");
  ev->add_option("--label", ev_label, "Row label");
  ev->add_option("--seed", ev_seed, "Diversity subset seed");
  ev->add_option("--subset-size", ev_subset, "Diversity subset size");
  ev->add_option("--draws", ev_draws, "Diversity subset draws");
  ev->add_option("--out", ev_out, "Write the report here instead of stdout");
  ev->add_flag("--json", ev_json, "JSON output");

  // edit
  auto* ed = app.add_subcommand("edit", "Edit an airfoil toward keypoint and/or PARSEC targets");
  std::string ed_source, ed_parsec, ed_kp, ed_mode = "auto", ed_out, ed_json;
  int ed_iter = -1;
  ed->add_option("--source", ed_source, ".dat path or naca:<digits>")->required();
  ed->add_option("--target-parsec", ed_parsec, "JSON object of PARSEC targets");
  ed->add_option("--target-keypoints", ed_kp, "JSON array of [x, y] keypoints");
  ed->add_option("--mode", ed_mode, "auto, ek, ep or custom")->check(CLI::IsMember({"auto", "ek", "ep", "custom"}));
  ed->add_option("--max-iter", ed_iter, "Iteration limit");
  ed->add_option("--out", ed_out, "Write the edited airfoil as .dat");
  ed->add_option("--json", ed_json, "Write the full result JSON here instead of stdout");

  // serve
  auto* srv = app.add_subcommand("serve", "Run the HTTP service");
  int srv_port = 8080;
  std::string srv_host = "127.0.0.1", srv_dataset, srv_solver;
  srv->add_option("--port", srv_port, "Port");
  srv->add_option("--host", srv_host, "Bind address");
  srv->add_option("--dataset", srv_dataset, "Built dataset directory (read-only)");
  srv->add_option("--solver", srv_solver, "Solver executable or 'none'");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      BuildOverrides o;
      o.seed = gen_seed;
      if (!gen_solver.empty()) o.solver = gen_solver;
      o.workers = gen_workers;
      const auto m = build_dataset(fs::path(gen_config), fs::path(gen_out), o);
      for (const auto& s : m.skipped) std::cerr << "skipped " << s.source << ": " << s.reason << '\n';
      std::cerr << summary(m) << " -> " << gen_out << '\n';
    } else if (*ann) {
      std::ofstream file;
      if (!ann_out.empty()) file.open(ann_out);
      std::ostream& os = ann_out.empty() ? std::cout : file;
      int failures = 0;
      for (const auto& f : dat_inputs(ann_in)) {
        ordered_json j;
        j["file"] = f.string();
        try {
          std::vector<std::string> warnings;
          const Airfoil a = read_dat(f, kCanonicalPointCount, &warnings);
          for (const auto& w : warnings) std::cerr << f.string() << ": " << w << '\n';
          j["name"] = a.name;
          j["parsec"] = to_json(annotate_parsec(a));
          j["keypoints"] = points_to_json(extract_keypoints(a, ann_kp));
          j["smoothness"] = smoothness(a);
        } catch (const Error& e) {
          j["error"] = e.what();
          ++failures;
        }
        os << j.dump() << '\n';
      }
      return failures ? 1 : 0;
    } else if (*flt) {
      auto solver = solver_from(flt_solver, flt_config);
      const auto m = filter_dataset(flt_dir, solver.get(), flt_workers);
      std::cerr << summary(m) << '\n';
    } else if (*spl) {
      const fs::path file = fs::path(spl_dir) / kManifestFile;
      auto m = read_manifest(file);
      SplitRatios r;
      std::copy(spl_ratios.begin(), spl_ratios.end(), r.values.begin());
      split_dataset(m, r, spl_seed, !spl_flat);
      m.config["split"] = {{"ratios", r.values}, {"stratified", !spl_flat}, {"seed", spl_seed}};
      write_manifest(m, file);
      std::cerr << summary(m) << '\n';
    } else if (*ev) {
      const fs::path in(ev_in);
      std::vector<Airfoil> pop;
      std::vector<std::string> keys;
      std::vector<std::vector<bool>> conv;
      bool have_polars = false;
      if (fs::exists(in / kManifestFile)) {
        const auto m = read_manifest(in / kManifestFile);
        std::unique_ptr<PolarCache> cache;
        if (fs::exists(in / kPolarCacheFile)) {
          cache = std::make_unique<PolarCache>(PolarCache::load(in / kPolarCacheFile));
          have_polars = true;
        }
        const auto grid = condition_grid();
        for (const auto& s : m.samples) {
          if (!ev_split.empty() && to_string(s.split) != ev_split) continue;
          pop.push_back(load_sample(in, s));
          keys.push_back(s.id);
          if (cache) {
            std::vector<PolarRecord> recs;
            for (const auto& c : grid) {
              auto r = cache->find(airfoil_hash(pop.back()), c);
              recs.push_back(r ? *r : PolarRecord{c, std::nullopt});
            }
            conv.push_back(convergence_vector(recs));
          }
        }
      } else {
        for (const auto& f : dat_inputs(in)) {
          pop.push_back(read_dat(f));
          keys.push_back(f.stem().string());
        }
      }
      if (pop.empty()) throw Error(ErrorCode::invalid_argument, "eval: no airfoils found");

      MetricsReportRow row;
      row.label = ev_label.empty() ? in.filename().string() : ev_label;
      double m_sum = 0.0;
      for (const auto& a : pop) m_sum += smoothness(a);
      row.smoothness = m_sum / static_cast<double>(pop.size());
      if (!ev_targets.empty()) {
        const json targets = read_json(ev_targets);
        std::vector<SigmaReport> reports;
        for (std::size_t i = 0; i < pop.size(); ++i) {
          if (!targets.contains(keys[i])) continue;
          const auto t = parsec_from_json(targets[keys[i]]);
          reports.push_back(label_error(annotate_parsec(pop[i]), t));
        }
        if (reports.empty()) throw Error(ErrorCode::invalid_argument, "eval: no targets match the airfoils");
        row.sigma = mean_label_error(reports);
      }
      if (pop.size() > ev_subset) {
        DiversityConfig cfg;
        cfg.subset_size = ev_subset;
        cfg.n_draws = ev_draws;
        cfg.seed = ev_seed;
        row.diversity = diversity(pop, cfg);
      } else {
        std::cerr << "eval: population too small for diversity (" << pop.size() << " <= " << ev_subset << ")\n";
      }
      if (have_polars) row.success_rate = success_rate(conv);

      std::ofstream file;
      if (!ev_out.empty()) file.open(ev_out);
      std::ostream& os = ev_out.empty() ? std::cout : file;
      if (ev_json) {
        ordered_json j;
        j["label"] = row.label;
        j["count"] = pop.size();
        j["sigma"] = row.sigma ? ordered_json(row.sigma->sigma) : ordered_json(nullptr);
        j["sigma_bar"] = row.sigma ? ordered_json(row.sigma->sigma_bar) : ordered_json(nullptr);
        j["diversity"] = row.diversity ? ordered_json(*row.diversity) : ordered_json(nullptr);
        j["smoothness"] = *row.smoothness;
        j["success_rate"] = row.success_rate ? ordered_json(*row.success_rate) : ordered_json(nullptr);
        os << j.dump(2) << '\n';
      } else {
        write_metrics_report(os, std::span<const MetricsReportRow>(&row, 1));
      }
    } else if (*ed) {
      const Airfoil source = resolve_airfoil_source(ed_source, fs::current_path());
      json payload;
      payload["mode"] = ed_mode;
      if (!ed_parsec.empty()) payload["target_parsec"] = read_json(ed_parsec);
      if (!ed_kp.empty()) payload["target_keypoints"] = read_json(ed_kp);
      if (ed_iter >= 0) payload["limits"] = {{"max_iter", ed_iter}};
      if (!payload.contains("target_parsec") && !payload.contains("target_keypoints")) {
        throw Error(ErrorCode::invalid_argument, "edit: give --target-parsec and/or --target-keypoints");
      }
      const EditRequest req = edit_request_from_json(payload, source);
      const EditResult r = edit(req);
      const auto out = edit_result_to_json(r, req);
      if (ed_json.empty()) {
        std::cout << out.dump() << '\n';
      } else {
        std::ofstream(ed_json) << out.dump() << '\n';
      }
      if (!ed_out.empty()) write_dat(r.airfoil, fs::path(ed_out));
      std::cerr << "status " << to_string(r.status) << ", " << r.iterations << " iterations, objective "
                << r.trace.back() << '\n';
    } else if (*srv) {
      ServiceOptions o;
      if (!srv_dataset.empty()) o.dataset = srv_dataset;
      if (!srv_solver.empty() && srv_solver != "none") o.solver = srv_solver;
      const Service service(std::move(o));
      std::cerr << "listening on " << srv_host << ':' << srv_port << '\n';
      service.serve(srv_host, srv_port, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "afbench: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
