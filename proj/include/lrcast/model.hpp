#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lrcast {

/// Raised for parameter sets that violate the broadcast system's assumptions.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Parameters of one broadcast experiment: a file of F packets, split into
/// batches of K packets, sent to N receivers over i.i.d. ON/OFF channels with
/// ON probability p.
///
/// Instances are only produced by validate_config() and are immutable.
class SystemConfig {
public:
  int file_size() const { return file_size_; }
  int window() const { return window_; }
  int receivers() const { return receivers_; }
  double p() const { return p_; }
  double q() const { return q_; }

  /// Index of the last batch (number of batches minus one).
  int last_batch() const { return last_batch_; }
  int batch_count() const { return last_batch_ + 1; }

  bool operator==(const SystemConfig&) const = default;

private:
  friend SystemConfig validate_config(int, int, int, double);
  SystemConfig(int f, int k, int n, double p)
      : file_size_(f), window_(k), receivers_(n), p_(p), q_(1.0 - p),
        last_batch_(f / k - 1) {}

  int file_size_;
  int window_;
  int receivers_;
  double p_;
  double q_;
  int last_batch_;
};

/// Checks F, K, N > 0, F divisible by K and 0 < p <= 1.
SystemConfig validate_config(int file_size, int window, int receivers, double p);

/// Same parameters with a different receiver count or window.
SystemConfig with_receivers(const SystemConfig& config, int receivers);
SystemConfig with_window(const SystemConfig& config, int window);

/// Batch a receiver holding `received` packets expects. Returns F/K (one past
/// the last batch) once the whole file is held.
int batch_id(int received, const SystemConfig& config);

/// Inclusive packet index range covered by batch `batch`.
std::pair<int, int> batch_packet_range(int batch, const SystemConfig& config);

}  // namespace lrcast
