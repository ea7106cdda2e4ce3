#include "lrcast/sim.hpp"

#include "lrcast/format.hpp"
#include "lrcast/rlnc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace lrcast::sim {

namespace {

enum StreamId : std::uint64_t { kChannel = 0, kPolicy = 1, kCoefficients = 2, kFileData = 3 };

// Source packets of a file, one byte vector per packet.
std::vector<rlnc::Bytes> make_file(const SystemConfig& config, std::size_t payload_len,
                                   std::uint64_t seed) {
  Engine engine(seed);
  std::vector<rlnc::Bytes> file(static_cast<std::size_t>(config.file_size()),
                                rlnc::Bytes(payload_len));
  for (auto& pkt : file)
    for (auto& b : pkt) b = static_cast<rlnc::Symbol>(engine() >> 56);
  return file;
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::Ideal ? "ideal" : "codec";
}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "ideal") return Mode::Ideal;
  if (name == "codec") return Mode::Codec;
  return std::nullopt;
}

TrialResult run_trial(const SystemConfig& config, PolicyKind policy, std::uint64_t seed, Mode mode,
                      const SimOptions& options) {
  const int n = config.receivers();
  const int f = config.file_size();
  const int k = config.window();

  Engine channel(derive_seed(seed, kChannel));
  policies::Scheduler scheduler(policy, derive_seed(seed, kPolicy));

  std::vector<int> received(static_cast<std::size_t>(n), 0);
  std::vector<bool> on(static_cast<std::size_t>(n), false);
  int finished = 0;

  // Codec mode only.
  Engine coefficients(derive_seed(seed, kCoefficients));
  std::vector<rlnc::Bytes> file;
  std::vector<rlnc::Decoder> decoders;
  if (mode == Mode::Codec) {
    file = make_file(config, options.payload_len, derive_seed(seed, kFileData));
    for (int i = 0; i < n; ++i) decoders.emplace_back(0, k, options.payload_len);
  }

  TrialResult result;
  policies::SchedulerInput input;
  input.eligible.reserve(static_cast<std::size_t>(n));

  auto deliver = [&](std::optional<int> batch) {
    if (!batch) return;
    if (mode == Mode::Ideal) {
      for (const auto& e : input.eligible) {
        if (e.batch != *batch) continue;
        if (++received[e.receiver] == f) ++finished;
      }
      return;
    }

    const std::span<const rlnc::Bytes> sources(file.data() + static_cast<std::ptrdiff_t>(*batch) * k,
                                               static_cast<std::size_t>(k));
    const auto packet = rlnc::encode(*batch, sources, coefficients);
    for (const auto& e : input.eligible) {
      if (e.batch != *batch) continue;
      auto& decoder = decoders[e.receiver];
      if (!decoder.ingest(packet)) continue;
      ++received[e.receiver];
      if (!decoder.decodable()) continue;
      if (!std::equal(sources.begin(), sources.end(), decoder.recover().begin()))
        throw std::logic_error("decoded batch differs from the source data");
      if (received[e.receiver] == f)
        ++finished;
      else
        decoder = rlnc::Decoder(e.batch + 1, k, options.payload_len);
    }
  };

  while (finished < n) {
    if (result.completion_slots >= options.slot_limit)
      throw std::runtime_error("trial exceeded " + std::to_string(options.slot_limit) + " slots");
    input.slot = result.completion_slots++;

    input.eligible.clear();
    for (int i = 0; i < n; ++i) {
      on[i] = bernoulli(channel, config.p());
      if (on[i] && received[i] < f) input.eligible.push_back({i, received[i] / k});
    }
    const bool conflict = policies::is_conflict_slot(input);
    if (conflict) ++result.conflict_slots;

    deliver(scheduler.select(input));
    if (options.observer) options.observer(input.slot, conflict, received);
  }
  return result;
}

std::vector<TrialResult> run_trials(const SystemConfig& config, PolicyKind policy,
                                    std::uint64_t n_trials, const RngSpec& rng, Mode mode,
                                    const SimOptions& options) {
  std::vector<TrialResult> out(n_trials);
  SimOptions per_trial = options;
  per_trial.observer = nullptr;
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(options.threads, 1, std::max<std::uint64_t>(1, n_trials)));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n_trials; ++i)
      out[i] = run_trial(config, policy, rng.trial_seed(i), mode, per_trial);
    return out;
  }

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = w; i < n_trials; i += workers)
            out[i] = run_trial(config, policy, rng.trial_seed(i), mode, per_trial);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ExperimentStats summarize(std::span<const TrialResult> trials) {
  if (trials.size() < 2) throw std::invalid_argument("need at least 2 trials for a standard deviation");
  ExperimentStats s;
  s.n_trials = trials.size();
  std::uint64_t total = 0;
  for (const auto& t : trials) total += t.completion_slots;
  s.mean = static_cast<double>(total) / static_cast<double>(s.n_trials);
  double sq = 0.0;
  for (const auto& t : trials) {
    const double d = static_cast<double>(t.completion_slots) - s.mean;
    sq += d * d;
  }
  s.stddev = std::sqrt(sq / static_cast<double>(s.n_trials - 1));
  s.ci95_half_width = 1.96 * s.stddev / std::sqrt(static_cast<double>(s.n_trials));
  return s;
}

ExperimentStats run_experiment(const SystemConfig& config, PolicyKind policy,
                               std::uint64_t n_trials, const RngSpec& rng, Mode mode,
                               const SimOptions& options) {
  if (n_trials < 2) throw std::invalid_argument("need at least 2 trials for a standard deviation");
  const auto trials = run_trials(config, policy, n_trials, rng, mode, options);
  return summarize(trials);
}

std::vector<SweepRow> sweep_coding_window(const SystemConfig& base,
                                          std::span<const PolicyKind> policy_kinds,
                                          std::span<const int> windows, std::uint64_t n_trials,
                                          const RngSpec& rng, Mode mode,
                                          const SimOptions& options) {
  std::vector<SystemConfig> configs;
  for (int k : windows) configs.push_back(with_window(base, k));

  std::vector<SweepRow> rows;
  for (auto policy : policy_kinds)
    for (const auto& cfg : configs)
      rows.push_back({policy, cfg, run_experiment(cfg, policy, n_trials, rng, mode, options)});
  return rows;
}

void write_csv_header(std::ostream& out) {
  out << "policy,N,F,K,p,n_trials,mean_slots,stddev,ci95_half_width\n";
}

void write_csv_row(std::ostream& out, PolicyKind policy, const SystemConfig& config,
                   const ExperimentStats& stats) {
  out << policies::to_string(policy) << ',' << config.receivers() << ',' << config.file_size()
      << ',' << config.window() << ',' << format_real(config.p()) << ',' << stats.n_trials << ','
      << format_real(stats.mean) << ',' << format_real(stats.stddev) << ','
      << format_real(stats.ci95_half_width) << '\n';
}

}  // namespace lrcast::sim
