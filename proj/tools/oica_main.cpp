// oica: recover overcomplete ICA mixing matrices from second and fourth
// cumulants, probe identifiability, and reproduce the synthetic experiments.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "oica/errors.hpp"
#include "oica/experiments.hpp"
#include "oica/identifiability.hpp"
#include "oica/io.hpp"
#include "oica/quadrics.hpp"
#include "oica/recovery.hpp"
#include "oica/version.hpp"

namespace {

using oica::io::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json diagnostics_json(const oica::RecoveryResult& res) {
  json d;
  d["objective"] = res.objective;
  d["subspace_rank"] = res.decomposition.diag.subspace_rank;
  d["num_sources"] = res.A_hat.cols();
  d["rank_ambiguous"] = res.decomposition.diag.rank_ambiguous;
  d["outside_uniqueness"] = res.decomposition.diag.outside_uniqueness;
  d["k4_fit_residual_rel"] = res.decomposition.diag.fit_residual_rel;
  d["power_starts_used"] = res.decomposition.diag.starts_used;
  json cr = json::array();
  for (int i = 0; i < res.decomposition.diag.column_residuals.size(); ++i)
    cr.push_back(res.decomposition.diag.column_residuals[i]);
  d["column_residuals"] = std::move(cr);
  json l = json::array();
  for (int i = 0; i < res.coefficients.size(); ++i) l.push_back(res.coefficients[i]);
  d["coefficients"] = std::move(l);
  return d;
}

std::string diag_path_for(const std::string& out) {
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv")
    return out.substr(0, out.size() - 4) + ".diag.json";
  return out + ".diag.json";
}

int run_simulate(const std::string& matrix_path, std::vector<int> random_shape,
                 const std::string& sources_path, long n, std::uint64_t seed,
                 const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd A;
  if (!matrix_path.empty()) {
    A = oica::io::read_matrix_csv(matrix_path);
  } else {
    oica::require(random_shape.size() == 2, oica::errc::usage_error,
                  "--random needs two integers I J");
    A = oica::generate_mixing(random_shape[0], random_shape[1], oica::derive_seed({seed, 11}))
            .matrix();
  }
  const oica::SourceSpec spec = oica::io::read_source_spec(sources_path);
  spec.validate(false);
  const Eigen::MatrixXd X =
      oica::sample_mixture(A, spec, n, oica::derive_seed({seed, 12}));
  oica::io::atomic_write(out, oica::io::samples_to_csv(X));
  json cfg{{"matrix", matrix_path},
           {"random", random_shape},
           {"sources", sources_path},
           {"n", n}};
  oica::io::write_manifest(out, "simulate", cfg, seed, seconds_since(t0));
  return 0;
}

int run_recover(const std::string& input_path, const std::string& cumulants_path,
                const std::string& num_sources, std::uint64_t seed, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  oica::CumulantPair cp;
  if (!cumulants_path.empty()) {
    cp = oica::io::read_cumulants(cumulants_path);
  } else {
    const Eigen::MatrixXd X = oica::io::read_samples_csv(input_path);
    cp = oica::sample_cumulants(X);
  }
  int J = 0;
  if (num_sources != "auto") {
    try {
      J = std::stoi(num_sources);
    } catch (...) {
      oica::fail(oica::errc::usage_error, "--num-sources must be an integer or 'auto'");
    }
    oica::require(J >= 1, oica::errc::usage_error, "--num-sources must be >= 1");
  }
  oica::RecoverConfig rc;
  rc.seed = seed;
  const oica::RecoveryResult res = oica::recover(cp, J, rc);
  oica::io::atomic_write(out, oica::io::matrix_to_csv(res.A_hat.matrix()));
  oica::io::atomic_write(diag_path_for(out), diagnostics_json(res).dump(2) + "\n");
  json cfg{{"input", input_path}, {"cumulants", cumulants_path}, {"num_sources", num_sources}};
  oica::io::write_manifest(out, "recover", cfg, seed, seconds_since(t0));
  return 0;
}

int run_check(const std::string& matrix_path, int starts, std::uint64_t seed,
              const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd A = oica::io::read_matrix_csv(matrix_path);
  oica::require(A.size() > 0, oica::errc::usage_error, "empty matrix: " + matrix_path);

  json report;
  report["matrix"] = json{{"rows", A.rows()}, {"cols", A.cols()}};
  json cps = json::array();
  for (const auto& [i, j] : oica::collinear_pairs(A)) cps.push_back(json::array({i + 1, j + 1}));
  report["collinear_pairs"] = std::move(cps);
  report["khatri_rao_rank"] = oica::khatri_rao_rank(A);
  if (A.cols() >= 2) {
    const oica::KernelReport kr = oica::kernel_report(A);
    report["kernel"] = json{{"rows", kr.D.rows()}, {"cols", kr.D.cols()},
                            {"kernel_dim", kr.kernel_dim}};
  }
  oica::ProbeConfig pc;
  pc.starts = starts;
  pc.seed = seed;
  const oica::Verdict v = oica::rank_one_probe(A, pc);
  report.update(oica::io::verdict_to_json(v));

  const std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    oica::io::atomic_write(out, text);
    json cfg{{"matrix", matrix_path}, {"starts", starts}};
    oica::io::write_manifest(out, "check", cfg, seed, seconds_since(t0));
  }
  return 0;
}

int run_classify(int rows, long cols) {
  const oica::Verdict v = oica::classify_generic(rows, cols);
  std::printf("%s\n", oica::verdict_name(v.kind));
  return 0;
}

oica::SweepConfig sweep_config_from_json(const json& j) {
  oica::SweepConfig cfg;
  cfg.I = j.value("I", 6);
  if (j.contains("J_range")) {
    const auto& jr = j.at("J_range");
    if (jr.is_array()) {
      for (const auto& v : jr) cfg.J_range.push_back(v);
    } else {
      const int from = jr.value("from", 2);
      const int to = jr.value("to", from);
      for (int J = from; J <= to; ++J) cfg.J_range.push_back(J);
    }
  }
  cfg.trials = j.value("trials", 100);
  const std::string mode = j.value("mode", "population");
  oica::require(mode == "population" || mode == "sample", oica::errc::usage_error,
                "mode must be population or sample");
  cfg.mode = mode == "sample" ? oica::CumulantMode::sample : oica::CumulantMode::population;
  cfg.n = j.value("n", 0L);
  if (cfg.mode == oica::CumulantMode::sample)
    oica::require(cfg.n >= 2, oica::errc::usage_error, "sample mode needs n >= 2");
  if (j.contains("non_gaussian"))
    cfg.non_gaussian = oica::io::source_spec_from_json(
                           json{{"sources", json::array({j.at("non_gaussian")})}})
                           .entries.front();
  cfg.gaussian_variance = j.value("gaussian_variance", 1.0);
  cfg.seed = j.value("seed", 0ULL);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    cfg.recover.minimize.max_iters = o.value("max_iters", 0);
    cfg.recover.minimize.ftol = o.value("ftol", 1e-10);
    cfg.recover.minimize.xtol = o.value("xtol", 1e-10);
    cfg.recover.minimize.restarts = o.value("restarts", 10);
  }
  return cfg;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const json j = json::parse(oica::io::read_file(config_path));
  const oica::SweepConfig cfg = sweep_config_from_json(j);
  oica::require(!cfg.J_range.empty(), oica::errc::usage_error, "J_range is empty");
  const auto rows = oica::run_sweep(cfg);
  oica::io::atomic_write(out, oica::io::sweep_rows_to_csv(rows));
  oica::io::write_manifest(out, "sweep", j, cfg.seed, seconds_since(t0));
  return 0;
}

int run_quadrics(const std::string& matrix_path, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd A = oica::io::read_matrix_csv(matrix_path);
  oica::require(A.size() > 0, oica::errc::usage_error, "empty matrix: " + matrix_path);
  const oica::QuadricSystem sys = oica::quadric_system(A);
  oica::io::atomic_write(out, oica::io::quadric_system_to_json(sys).dump(2) + "\n");
  json cfg{{"matrix", matrix_path}};
  oica::io::write_manifest(out, "quadrics", cfg, 0, seconds_since(t0));
  return 0;
}

int run_realcount(int dim, int real, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const oica::TrackedSystem ts = oica::build_real_count_system(dim, real);
  oica::io::atomic_write(out, oica::io::tracked_system_to_json(ts).dump(2) + "\n");
  json cfg{{"dim", dim}, {"real", real}};
  oica::io::write_manifest(out, "realcount", cfg, 0, seconds_since(t0));
  return 0;
}

bool is_usage_error(oica::errc c) {
  return c == oica::errc::usage_error || c == oica::errc::io_error ||
         c == oica::errc::invalid_count || c == oica::errc::spec_mismatch ||
         c == oica::errc::insufficient_data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overcomplete ICA: cumulant-based recovery and identifiability probes"};
  app.set_version_flag("--version", oica::kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw samples of A*s");
  std::string sim_matrix, sim_sources, sim_out;
  std::vector<int> sim_random;
  long sim_n = 1000;
  std::uint64_t sim_seed = 0;
  auto* mopt = sim->add_option("--matrix", sim_matrix, "mixing matrix csv");
  sim->add_option("--random", sim_random, "random unit-column matrix: I J")->expected(2)->excludes(mopt);
  sim->add_option("--sources", sim_sources, "source spec json")->required();
  sim->add_option("--n", sim_n, "number of samples")->required();
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "output csv")->required();

  // recover
  auto* rec = app.add_subcommand("recover", "recover the mixing matrix from data or cumulants");
  std::string rec_input, rec_cumulants, rec_sources = "auto", rec_out;
  std::uint64_t rec_seed = 0;
  auto* iopt = rec->add_option("--input", rec_input, "sample data csv");
  rec->add_option("--cumulants", rec_cumulants, "cumulants json")->excludes(iopt);
  rec->add_option("--num-sources", rec_sources, "source count J or 'auto'");
  rec->add_option("--seed", rec_seed, "rng seed");
  rec->add_option("--out", rec_out, "output matrix csv")->required();

  // check
  auto* chk = app.add_subcommand("check", "probe identifiability of a mixing matrix");
  std::string chk_matrix, chk_out;
  int chk_starts = 200;
  std::uint64_t chk_seed = 0;
  chk->add_option("--matrix", chk_matrix, "mixing matrix csv")->required();
  chk->add_option("--starts", chk_starts, "probe start count");
  chk->add_option("--seed", chk_seed, "rng seed");
  chk->add_option("--out", chk_out, "verdict json (default stdout)");

  // classify
  auto* cls = app.add_subcommand("classify", "generic identifiability by shape");
  int cls_rows = 0;
  long cls_cols = 0;
  cls->add_option("--rows", cls_rows, "observations I")->required();
  cls->add_option("--cols", cls_cols, "sources J")->required();

  // sweep
  auto* swp = app.add_subcommand("sweep", "run the synthetic experiment protocol");
  std::string swp_config, swp_out;
  swp->add_option("--config", swp_config, "sweep config json")->required();
  swp->add_option("--out", swp_out, "results csv")->required();

  // quadrics
  auto* qdr = app.add_subcommand("quadrics", "quadric system attached to a mixing matrix");
  std::string qdr_matrix, qdr_out;
  qdr->add_option("--matrix", qdr_matrix, "mixing matrix csv")->required();
  qdr->add_option("--out", qdr_out, "output json")->required();

  // realcount
  auto* rcn = app.add_subcommand("realcount", "quadric system with a prescribed real-root count");
  int rcn_dim = 0, rcn_real = -1;
  std::string rcn_out;
  rcn->add_option("--dim", rcn_dim, "number of homogeneous variables I")->required();
  rcn->add_option("--real", rcn_real, "even real-solution count in [0, 2^(I-1)]")->required();
  rcn->add_option("--out", rcn_out, "output json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      if (sim_matrix.empty() && sim_random.empty())
        oica::fail(oica::errc::usage_error, "need --matrix or --random");
      return run_simulate(sim_matrix, sim_random, sim_sources, sim_n, sim_seed, sim_out);
    }
    if (rec->parsed()) {
      if (rec_input.empty() && rec_cumulants.empty())
        oica::fail(oica::errc::usage_error, "need --input or --cumulants");
      return run_recover(rec_input, rec_cumulants, rec_sources, rec_seed, rec_out);
    }
    if (chk->parsed()) return run_check(chk_matrix, chk_starts, chk_seed, chk_out);
    if (cls->parsed()) return run_classify(cls_rows, cls_cols);
    if (swp->parsed()) return run_sweep_cmd(swp_config, swp_out);
    if (qdr->parsed()) return run_quadrics(qdr_matrix, qdr_out);
    if (rcn->parsed()) return run_realcount(rcn_dim, rcn_real, rcn_out);
  } catch (const oica::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", oica::errc_name(e.code()), e.what());
    return is_usage_error(e.code()) ? 2 : 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error (bad_json): %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
