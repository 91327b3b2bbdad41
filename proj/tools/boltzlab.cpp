// boltzlab command line: run, decompose, verify, oracle, kernel-info.
#include "boltzlab/harness.hpp"
#include "boltzlab/parallel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace boltzlab;

namespace {

enum Exit { ok = 0, check_failed = 1, usage = 2, numerical = 3 };

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  long long seed = -1;
};

void add_common(CLI::App *sub, Common &c) {
  sub->add_option("--config", c.config, "key = value configuration file");
  sub->add_option("--out", c.out, "output directory (overrides the config)");
  sub->add_option("--threads", c.threads, "worker threads (0: hardware)")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "seed for randomized suites")->check(CLI::NonNegativeNumber);
}

RunConfig load(const Common &c) {
  std::string text;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw ConfigError("cannot read config file '" + c.config + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  RunConfig rc = parse_config(text, environment_overrides());
  if (!c.out.empty()) rc.out = c.out;
  if (c.seed >= 0) rc.seed = static_cast<std::uint64_t>(c.seed);
  if (c.threads > 0) set_num_threads(c.threads);
  return rc;
}

void write_file(const fs::path &p, const std::string &s) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream(p) << s;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"boltzlab: spatially homogeneous Boltzmann equation on a velocity grid"};
  app.require_subcommand(1);

  Common run_o, dec_o, ver_o, kin_o;
  CLI::App *run = app.add_subcommand("run", "integrate the configured problem");
  add_common(run, run_o);
  CLI::App *dec = app.add_subcommand("decompose", "smooth/remainder decomposition with the fR decay fit");
  add_common(dec, dec_o);
  CLI::App *ver = app.add_subcommand("verify", "run a verification suite");
  add_common(ver, ver_o);
  std::string suite;
  ver->add_option("suite", suite, "operators | conservation | lp | smoothing | decomposition | equilibrium | appendix")
      ->required();
  CLI::App *orc = app.add_subcommand("oracle", "tabulate the BKW similarity solution");
  int oracle_N = 2;
  std::vector<double> oracle_times{0, 0.25, 0.5, 1, 2, 4};
  orc->add_option("--dim", oracle_N, "velocity dimension")->check(CLI::IsMember({2, 3}));
  orc->add_option("--times", oracle_times, "times to tabulate");
  CLI::App *kin = app.add_subcommand("kernel-info", "angular mass, Holder estimate, gain exponents");
  add_common(kin, kin_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  std::string out_dir = "out";
  try {
    if (*run) {
      const RunConfig c = load(run_o);
      out_dir = c.out;
      const RunSummary s = cmd_run(c, c.out);
      std::cout << "steps " << s.steps << ", dt halvings " << s.halvings << ", t = " << format_double(s.t_final) << "\n";
      if (s.bkw_error >= 0) std::cout << "bkw max error " << format_double(s.bkw_error) << "\n";
      return ok;
    }
    if (*dec) {
      const RunConfig c = load(dec_o);
      out_dir = c.out;
      const DecomposeSummary s = cmd_decompose(c, c.out);
      std::cout << "mu " << format_double(s.plan.mu) << ", fR fit lambda " << format_double(s.fR_fit.lambda)
                << " R^2 " << format_double(s.fR_fit.r2) << (s.warning ? "  [warning: mu condition]" : "") << "\n";
      return ok;
    }
    if (*ver) {
      const RunConfig c = load(ver_o);
      out_dir = c.out;
      const auto names = verify_suites();
      if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return usage;
      }
      const VerifyReport r = cmd_verify(suite, c);
      write_file(fs::path(c.out) / ("verify_" + suite + ".json"), r.json());
      std::cout << r.text();
      return r.pass() ? ok : check_failed;
    }
    if (*orc) {
      std::cout << bkw_table(oracle_N, oracle_times);
      return ok;
    }
    if (*kin) {
      std::cout << kernel_info(load(kin_o));
      return ok;
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return usage;
  } catch (const NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    try {
      write_file(fs::path(out_dir) / "error.txt", std::string(e.what()) + "\n");
    } catch (...) {
    }
    return numerical;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
