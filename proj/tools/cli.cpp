#include "cli.hpp"

#include "manifest.hpp"

#include "lrcast/dp.hpp"
#include "lrcast/format.hpp"
#include "lrcast/model.hpp"
#include "lrcast/policies.hpp"
#include "lrcast/rlnc.hpp"
#include "lrcast/sim.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

namespace lrcast::cli {

namespace {

std::string format_double(double x) { return format_real(x); }

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s << ',';
    if constexpr (std::is_floating_point_v<T>)
      s << format_double(items[i]);
    else
      s << items[i];
  }
  return s.str();
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Writes `body` to `path` and the manifest next to it.
void write_output(const std::string& path, const RunManifest& manifest,
                  const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  body(file);
  std::ofstream mf(manifest_path_for(path), std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open " + manifest_path_for(path) + " for writing");
  manifest.write(mf);
}

std::vector<policies::PolicyKind> parse_policies(const std::vector<std::string>& names) {
  std::vector<policies::PolicyKind> out;
  for (const auto& n : names) {
    const auto kind = policies::parse_policy(n);
    if (!kind) throw ConfigError("unknown policy '" + n + "' (expected lr, rrnc or rs)");
    out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("no policy given");
  return out;
}

sim::Mode parse_mode_or_throw(const std::string& name) {
  const auto mode = sim::parse_mode(name);
  if (!mode) throw ConfigError("unknown mode '" + name + "' (expected ideal or codec)");
  return *mode;
}

struct SolveOptions {
  int file_size = 12;
  int window = 4;
  double p = 0.5;
  double tolerance = 1e-9;
  std::string out;
};

struct CheckOptions {
  std::vector<int> file_sizes{8, 12, 24};
  std::vector<int> windows{2, 4};
  std::vector<double> ps{0.1, 0.5, 0.9};
  double tolerance = 1e-9;
  std::string out;
};

struct OracleOptions {
  int file_size = 4;
  int window = 2;
  double p = 0.5;
  std::uint64_t cap = dp::kDefaultPolicyCap;
  double tolerance = 1e-9;
};

struct SimulateOptions {
  std::vector<std::string> policies{"lr"};
  int receivers = 2;
  int file_size = 12;
  int window = 4;
  double p = 0.5;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::string mode = "ideal";
  std::size_t payload = 16;
  unsigned threads = default_threads();
  std::string out;
};

struct SweepOptions {
  std::vector<std::string> policies{"lr", "rrnc", "rs"};
  int receivers = 5;
  int file_size = 500;
  std::vector<int> windows{5, 10, 25, 50, 100, 250, 500};
  double p = 0.6;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string mode = "ideal";
  std::size_t payload = 16;
  unsigned threads = default_threads();
  std::string out;
};

struct CodecOptions {
  int window = 16;
  std::size_t payload = 64;
  std::uint64_t batches = 100000;
  std::uint64_t seed = 1;
  unsigned threads = default_threads();
};

struct ReplayOptions {
  std::string manifest;
  std::string out;
};

int cmd_solve(const SolveOptions& o, std::ostream& out) {
  const auto config = validate_config(o.file_size, o.window, 2, o.p);
  const auto sol = dp::solve_optimal(config, o.tolerance);

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", sol.values.at(0, 0));
  out << "V(0,0) = " << buf << '\n';

  if (!o.out.empty()) {
    RunManifest m{"solve", kToolVersion,
                  {{"file-size", std::to_string(o.file_size)},
                   {"window", std::to_string(o.window)},
                   {"p", format_double(o.p)},
                   {"tolerance", format_double(o.tolerance)},
                   {"out", o.out}}};
    write_output(o.out, m, [&](std::ostream& f) { dp::write_csv(f, sol.values, sol.policy); });
  }
  return kOk;
}

int cmd_check_lr(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << "F,K,p,check,examined,violations,worst_margin,status\n";
  bool any_failed = false;
  bool any_invalid = false;

  for (int f : o.file_sizes)
    for (int k : o.windows)
      for (double p : o.ps) {
        const std::string cell = std::to_string(f) + "," + std::to_string(k) + "," + format_double(p);
        std::optional<SystemConfig> config;
        try {
          config = validate_config(f, k, 2, p);
        } catch (const ConfigError& e) {
          err << "F=" << f << " K=" << k << " p=" << p << ": skipped, " << e.what() << '\n';
          csv << cell << ",config,0,0,0,error\n";
          any_invalid = true;
          continue;
        }

        const auto lr = dp::check_lr_optimality(*config, o.tolerance);
        const auto audit = dp::audit_inequalities(*config, o.tolerance);
        const bool ok = lr.optimal && audit.passed();
        any_failed |= !ok;

        csv << cell << ",lr-optimality," << lr.decision_states << ',' << lr.violations.size()
            << ",0," << (lr.optimal ? "pass" : "fail") << '\n';
        for (const auto& c : audit.checks)
          csv << cell << ',' << c.name << ',' << c.examined << ',' << c.violations << ','
              << format_double(c.worst_margin) << ',' << (c.passed() ? "pass" : "fail") << '\n';

        out << "F=" << f << " K=" << k << " p=" << p << ": " << (ok ? "PASS" : "FAIL");
        if (lr.decision_states == 0) out << " (no decision states)";
        out << ", " << lr.decision_states << " decision states, " << lr.violations.size()
            << " LR violations";
        for (const auto& c : audit.checks)
          if (!c.passed()) out << ", " << c.name << " violated " << c.violations << "x";
        out << '\n';
      }

  if (!o.out.empty()) {
    RunManifest m{"check-lr", kToolVersion,
                  {{"file-size", join(o.file_sizes)},
                   {"window", join(o.windows)},
                   {"p", join(o.ps)},
                   {"tolerance", format_double(o.tolerance)},
                   {"out", o.out}}};
    write_output(o.out, m, [&](std::ostream& f) { f << csv.str(); });
  }
  if (any_failed) return kVerificationFailed;
  return any_invalid ? kUsageError : kOk;
}

int cmd_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  const auto config = validate_config(o.file_size, o.window, 2, o.p);
  try {
    const auto r = dp::enumerate_policies_oracle(config, o.cap, o.tolerance);
    char buf[128];
    std::snprintf(buf, sizeof buf, "best V(0,0) = %.12g\nLR V(0,0) = %.12g\n", r.best_value, r.lr_value);
    out << "decision states: " << r.decision_states << '\n' << buf;
    out << r.policy_count << " policies; " << (r.lr_optimal ? "LR optimal" : "LR NOT optimal") << '\n';
    return r.lr_optimal ? kOk : kVerificationFailed;
  } catch (const dp::OracleTooLarge& e) {
    err << "refusing to enumerate: " << e.decision_states() << " decision states give 2^"
        << e.decision_states() << " policies, cap is " << e.cap() << '\n';
    return kUsageError;
  }
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto config = validate_config(o.file_size, o.window, o.receivers, o.p);
  const auto kinds = parse_policies(o.policies);
  const auto mode = parse_mode_or_throw(o.mode);
  const sim::SimOptions sim_opts{o.payload, sim::SimOptions{}.slot_limit, o.threads};

  std::ostringstream csv;
  sim::write_csv_header(csv);
  for (auto kind : kinds) {
    const auto stats = sim::run_experiment(config, kind, o.trials, RngSpec{o.seed}, mode, sim_opts);
    sim::write_csv_row(csv, kind, config, stats);
  }
  out << csv.str();

  if (!o.out.empty()) {
    RunManifest m{"simulate", kToolVersion,
                  {{"policy", join(o.policies)},
                   {"receivers", std::to_string(o.receivers)},
                   {"file-size", std::to_string(o.file_size)},
                   {"window", std::to_string(o.window)},
                   {"p", format_double(o.p)},
                   {"trials", std::to_string(o.trials)},
                   {"seed", std::to_string(o.seed)},
                   {"mode", o.mode},
                   {"payload", std::to_string(o.payload)},
                   {"out", o.out}}};
    write_output(o.out, m, [&](std::ostream& f) { f << csv.str(); });
  }
  return kOk;
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const auto base = validate_config(o.file_size, o.file_size, o.receivers, o.p);
  const auto kinds = parse_policies(o.policies);
  const auto mode = parse_mode_or_throw(o.mode);
  const sim::SimOptions sim_opts{o.payload, sim::SimOptions{}.slot_limit, o.threads};

  std::vector<int> valid;
  bool any_invalid = false;
  for (int k : o.windows) {
    try {
      (void)with_window(base, k);
      valid.push_back(k);
    } catch (const ConfigError& e) {
      err << "K=" << k << ": skipped, " << e.what() << '\n';
      any_invalid = true;
    }
  }

  std::ostringstream csv;
  sim::write_csv_header(csv);
  for (const auto& row :
       sim::sweep_coding_window(base, kinds, valid, o.trials, RngSpec{o.seed}, mode, sim_opts))
    sim::write_csv_row(csv, row.policy, row.config, row.stats);
  out << csv.str();

  if (!o.out.empty()) {
    RunManifest m{"sweep", kToolVersion,
                  {{"policies", join(o.policies)},
                   {"receivers", std::to_string(o.receivers)},
                   {"file-size", std::to_string(o.file_size)},
                   {"windows", join(o.windows)},
                   {"p", format_double(o.p)},
                   {"trials", std::to_string(o.trials)},
                   {"seed", std::to_string(o.seed)},
                   {"mode", o.mode},
                   {"payload", std::to_string(o.payload)},
                   {"out", o.out}}};
    write_output(o.out, m, [&](std::ostream& f) { f << csv.str(); });
  }
  return any_invalid ? kUsageError : kOk;
}

// Expected non-innovative receptions before full rank when all-zero
// coefficient vectors are never sent.
double expected_extra_packets(int window) {
  const double total = std::pow(256.0, window) - 1.0;
  double extra = 0.0;
  for (int r = 0; r < window; ++r) {
    const double fail = (std::pow(256.0, r) - 1.0) / total;
    extra += fail / (1.0 - fail);
  }
  return extra;
}

int cmd_codec_validate(const CodecOptions& o, std::ostream& out) {
  if (o.window < 1) throw ConfigError("window must be at least 1");
  if (o.payload < 1) throw ConfigError("payload length must be at least 1");
  const auto v = rlnc::validate_codec(o.window, o.payload, o.batches, o.seed, o.threads);

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "window=%d payload=%zu batches=%llu\nround_trip_success=%.6f\n"
                "mean_extra_packets=%.6f\nexpected_extra_packets=%.6f\n",
                o.window, o.payload, static_cast<unsigned long long>(v.batches), v.success_rate(),
                v.mean_extra_packets, expected_extra_packets(o.window));
  out << buf;
  return v.round_trips_ok == v.batches ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least Received scheduling for batched RLNC broadcast"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SolveOptions solve_o;
  auto* solve = app.add_subcommand("solve", "Exact value and policy tables for 2 receivers");
  solve->add_option("--file-size", solve_o.file_size, "File size F in packets")->capture_default_str();
  solve->add_option("--window", solve_o.window, "Coding window K")->capture_default_str();
  solve->add_option("--p", solve_o.p, "Channel ON probability")->capture_default_str();
  solve->add_option("--tolerance", solve_o.tolerance, "Tie tolerance")->capture_default_str();
  solve->add_option("--out", solve_o.out, "CSV output path");

  CheckOptions check_o;
  auto* check = app.add_subcommand("check-lr", "Verify LR optimality and the value-table audit over a grid");
  check->add_option("--file-size", check_o.file_sizes, "File sizes")->delimiter(',')->capture_default_str();
  check->add_option("--window", check_o.windows, "Coding windows")->delimiter(',')->capture_default_str();
  check->add_option("--p", check_o.ps, "ON probabilities")->delimiter(',')->capture_default_str();
  check->add_option("--tolerance", check_o.tolerance)->capture_default_str();
  check->add_option("--out", check_o.out, "CSV report path");

  OracleOptions oracle_o;
  auto* oracle = app.add_subcommand("oracle", "Brute-force every deterministic policy");
  oracle->add_option("--file-size", oracle_o.file_size)->capture_default_str();
  oracle->add_option("--window", oracle_o.window)->capture_default_str();
  oracle->add_option("--p", oracle_o.p)->capture_default_str();
  oracle->add_option("--cap", oracle_o.cap, "Maximum number of policies")->capture_default_str();
  oracle->add_option("--tolerance", oracle_o.tolerance)->capture_default_str();

  SimulateOptions sim_o;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo completion time");
  simulate->add_option("--policy,--policies", sim_o.policies, "lr, rrnc, rs")->delimiter(',')->capture_default_str();
  simulate->add_option("--receivers,--N", sim_o.receivers)->capture_default_str();
  simulate->add_option("--file-size", sim_o.file_size)->capture_default_str();
  simulate->add_option("--window", sim_o.window)->capture_default_str();
  simulate->add_option("--p", sim_o.p)->capture_default_str();
  simulate->add_option("--trials", sim_o.trials)->capture_default_str();
  simulate->add_option("--seed", sim_o.seed)->capture_default_str();
  simulate->add_option("--mode", sim_o.mode, "ideal or codec")->capture_default_str();
  simulate->add_option("--payload", sim_o.payload, "Packet length in bytes (codec mode)")->capture_default_str();
  simulate->add_option("--threads", sim_o.threads)->capture_default_str();
  simulate->add_option("--out", sim_o.out, "CSV output path");

  SweepOptions sweep_o;
  auto* sweep = app.add_subcommand("sweep", "Completion time against coding window");
  sweep->add_option("--policies,--policy", sweep_o.policies)->delimiter(',')->capture_default_str();
  sweep->add_option("--receivers,--N", sweep_o.receivers)->capture_default_str();
  sweep->add_option("--file-size", sweep_o.file_size)->capture_default_str();
  sweep->add_option("--windows", sweep_o.windows)->delimiter(',')->capture_default_str();
  sweep->add_option("--p", sweep_o.p)->capture_default_str();
  sweep->add_option("--trials", sweep_o.trials)->capture_default_str();
  sweep->add_option("--seed", sweep_o.seed)->capture_default_str();
  sweep->add_option("--mode", sweep_o.mode)->capture_default_str();
  sweep->add_option("--payload", sweep_o.payload)->capture_default_str();
  sweep->add_option("--threads", sweep_o.threads)->capture_default_str();
  sweep->add_option("--out", sweep_o.out);

  CodecOptions codec_o;
  auto* codec = app.add_subcommand("codec-validate", "GF(256) RLNC round trips and rank statistics");
  codec->add_option("--window", codec_o.window)->capture_default_str();
  codec->add_option("--payload", codec_o.payload)->capture_default_str();
  codec->add_option("--batches", codec_o.batches)->capture_default_str();
  codec->add_option("--seed", codec_o.seed)->capture_default_str();
  codec->add_option("--threads", codec_o.threads)->capture_default_str();

  ReplayOptions replay_o;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("--manifest", replay_o.manifest)->required();
  replay->add_option("--out", replay_o.out, "Override the recorded output path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kUsageError;
  }

  try {
    if (*solve) return cmd_solve(solve_o, out);
    if (*check) return cmd_check_lr(check_o, out, err);
    if (*oracle) return cmd_oracle(oracle_o, out, err);
    if (*simulate) return cmd_simulate(sim_o, out);
    if (*sweep) return cmd_sweep(sweep_o, out, err);
    if (*codec) return cmd_codec_validate(codec_o, out);
    if (*replay) {
      std::ifstream in(replay_o.manifest);
      if (!in) throw std::runtime_error("cannot read manifest " + replay_o.manifest);
      auto manifest = RunManifest::read(in);
      if (manifest.tool_version != kToolVersion)
        err << "warning: manifest written by version " << manifest.tool_version << ", running "
            << kToolVersion << '\n';
      if (!replay_o.out.empty()) manifest.params["out"] = replay_o.out;
      if (manifest.command == "replay") throw std::runtime_error("manifest cannot replay itself");
      return run(manifest.to_args(), out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace lrcast::cli
