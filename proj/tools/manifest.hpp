#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lrcast::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to re-run a command: its name, resolved parameters and
/// the tool version. Serialized as `key=value` lines next to each output file.
struct RunManifest {
  std::string command;
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> params;  // flag name without dashes -> value

  void write(std::ostream& out) const;
  static RunManifest read(std::istream& in);

  /// Command line equivalent to this manifest (without the program name).
  std::vector<std::string> to_args() const;
};

std::string manifest_path_for(const std::string& output_path);

}  // namespace lrcast::cli
