#include "manifest.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace lrcast::cli {

void RunManifest::write(std::ostream& out) const {
  out << "# lrcast run manifest\n";
  out << "command=" << command << '\n';
  out << "tool_version=" << tool_version << '\n';
  for (const auto& [key, value] : params) out << key << '=' << value << '\n';
}

RunManifest RunManifest::read(std::istream& in) {
  RunManifest m;
  m.tool_version.clear();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("manifest line " + std::to_string(line_no) + " is not key=value");
    const std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "command")
      m.command = std::move(value);
    else if (key == "tool_version")
      m.tool_version = std::move(value);
    else
      m.params[key] = std::move(value);
  }
  if (m.command.empty()) throw std::runtime_error("manifest has no command");
  return m;
}

std::vector<std::string> RunManifest::to_args() const {
  std::vector<std::string> args{command};
  for (const auto& [key, value] : params) {
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest";
}

}  // namespace lrcast::cli
