#pragma once

#include "lrcast/model.hpp"
#include "lrcast/policies.hpp"
#include "lrcast/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lrcast::sim {

using policies::PolicyKind;

enum class Mode {
  Ideal,  // every reception is innovative
  Codec,  // real GF(256) coding; dependent packets are wasted
};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

/// Called after every slot with the slot index, whether it was a conflict
/// slot, and each receiver's progress.
using SlotObserver = std::function<void(std::uint64_t slot, bool conflict, std::span<const int> received)>;

struct SimOptions {
  std::size_t payload_len = 16;                 // codec mode only
  std::uint64_t slot_limit = 1'000'000'000ULL;  // runaway guard
  unsigned threads = 1;
  SlotObserver observer;  // run_trial only; ignored by the multi-trial helpers
};

struct TrialResult {
  std::uint64_t completion_slots = 0;
  std::uint64_t conflict_slots = 0;
};

struct ExperimentStats {
  std::uint64_t n_trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci95_half_width = 0.0;
};

/// One broadcast of the whole file. Channel flags, policy randomness and
/// coding coefficients come from three streams derived from `seed`, so the
/// channel realisation is shared across policies and modes for equal seeds.
/// Throws std::runtime_error when the slot limit is hit.
TrialResult run_trial(const SystemConfig& config, PolicyKind policy, std::uint64_t seed, Mode mode,
                      const SimOptions& options = {});

/// Trial i uses rng.trial_seed(i). Output order is trial order regardless of
/// the thread count.
std::vector<TrialResult> run_trials(const SystemConfig& config, PolicyKind policy,
                                    std::uint64_t n_trials, const RngSpec& rng, Mode mode,
                                    const SimOptions& options = {});

/// Mean, sample stddev and normal-approximation 95% half width. Needs >= 2 trials.
ExperimentStats summarize(std::span<const TrialResult> trials);

ExperimentStats run_experiment(const SystemConfig& config, PolicyKind policy,
                               std::uint64_t n_trials, const RngSpec& rng, Mode mode,
                               const SimOptions& options = {});

struct SweepRow {
  PolicyKind policy;
  SystemConfig config;
  ExperimentStats stats;
};

/// One experiment per (policy, window), policies outermost. Every window is
/// validated against the file size before any trial runs.
std::vector<SweepRow> sweep_coding_window(const SystemConfig& base,
                                          std::span<const PolicyKind> policy_kinds,
                                          std::span<const int> windows, std::uint64_t n_trials,
                                          const RngSpec& rng, Mode mode,
                                          const SimOptions& options = {});

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, PolicyKind policy, const SystemConfig& config,
                   const ExperimentStats& stats);

}  // namespace lrcast::sim
