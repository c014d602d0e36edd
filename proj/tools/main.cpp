#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagpath/commands.hpp"
#include "lagpath/config.hpp"
#include "lagpath/errors.hpp"
#include "lagpath/parallel.hpp"
#include "lagpath/verify.hpp"

using namespace lagpath;

namespace {

void emit(const nlohmann::json& j, const std::string& report_path) {
  std::cout << j.dump(2) << '\n';
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw config_error("cannot write report " + report_path);
    out << j.dump(2) << '\n';
  }
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const numerical_failure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian trajectory analyticity toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: LAGPATH_THREADS or hardware)")->check(CLI::NonNegativeNumber);

  int max_n = kIdentityMaxN;
  std::vector<int> dims{1, 2, 3};
  std::string report;
  auto* vi = app.add_subcommand("verify-identities", "exact combinatorial identity suite");
  vi->add_option("--max-n", max_n, "largest order checked");
  vi->add_option("--dims", dims, "dimensions for the signed partition sums")->delimiter(',');
  vi->add_option("--report", report, "also write the JSON report here");

  double ck = 32.0;
  int max_order = 5;
  long long samples = 1000;
  long long seed = 0;
  auto* vk = app.add_subcommand("verify-kernels", "kernel derivative bounds and circle means");
  vk->add_option("--ck", ck, "kernel constant");
  vk->add_option("--max-order", max_order, "largest derivative order (0..6)");
  vk->add_option("--samples", samples, "random sample points");
  vk->add_option("--seed", seed, "sample seed");
  vk->add_option("--report", report, "also write the JSON report here");

  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "particle simulation with diagnostics");
  sim->add_option("--config", config_path, "JSON run configuration")->required();
  auto* tay = app.add_subcommand("taylor", "time-Taylor jets, radius estimates and Cauchy fits");
  tay->add_option("--config", config_path, "JSON run configuration")->required();
  auto* rb = app.add_subcommand("radius-bound", "Holder statistics and the explicit radius bound");
  rb->add_option("--config", config_path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (threads > 0) set_thread_count(threads);

  if (*vi)
    return guarded([&] {
      const auto r = verify_identities(max_n, dims);
      emit(r.to_json(), report);
      return r.all_pass() ? kExitOk : kExitVerification;
    });
  if (*vk)
    return guarded([&] {
      if (samples <= 0) throw config_error("samples must be positive");
      if (seed < 0) throw config_error("seed must be nonnegative");
      const auto r = verify_kernels(ck, max_order, static_cast<std::size_t>(samples), static_cast<std::uint64_t>(seed));
      emit(r.to_json(), report);
      return r.all_pass() ? kExitOk : kExitVerification;
    });
  return guarded([&] {
    const RunConfig cfg = load_config(config_path);
    CommandResult res;
    if (*sim) res = run_simulate(cfg);
    else if (*tay) res = run_taylor(cfg);
    else res = run_radius_bound(cfg);
    std::cout << res.summary.dump(2) << '\n';
    return kExitOk;
  });
}
