#include "lrcast/model.hpp"

#include <cmath>

namespace lrcast {

SystemConfig validate_config(int file_size, int window, int receivers, double p) {
  if (file_size <= 0)
    throw ConfigError("file size must be positive, got " + std::to_string(file_size));
  if (window <= 0)
    throw ConfigError("coding window must be positive, got " + std::to_string(window));
  if (receivers <= 0)
    throw ConfigError("receiver count must be positive, got " + std::to_string(receivers));
  if (file_size % window != 0)
    throw ConfigError("coding window " + std::to_string(window) +
                      " does not divide file size " + std::to_string(file_size));
  if (!std::isfinite(p) || p <= 0.0 || p > 1.0)
    throw ConfigError("ON probability must lie in (0, 1], got " + std::to_string(p));
  return SystemConfig(file_size, window, receivers, p);
}

SystemConfig with_receivers(const SystemConfig& config, int receivers) {
  return validate_config(config.file_size(), config.window(), receivers, config.p());
}

SystemConfig with_window(const SystemConfig& config, int window) {
  return validate_config(config.file_size(), window, config.receivers(), config.p());
}

int batch_id(int received, const SystemConfig& config) {
  if (received < 0 || received > config.file_size())
    throw std::out_of_range("received count " + std::to_string(received) +
                            " outside [0, " + std::to_string(config.file_size()) + "]");
  return received / config.window();
}

std::pair<int, int> batch_packet_range(int batch, const SystemConfig& config) {
  if (batch < 0 || batch > config.last_batch())
    throw std::out_of_range("batch " + std::to_string(batch) + " outside [0, " +
                            std::to_string(config.last_batch()) + "]");
  const int k = config.window();
  return {batch * k, (batch + 1) * k - 1};
}

}  // namespace lrcast
