#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rendezvous::cli {

enum ExitCode : int {
  kOk = 0,
  kSchemaError = 1,
  kGraphError = 2,
  kNonFiniteState = 3,
  kCertificateFailed = 4,
};

struct Options {
  bool json = false;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<double> k1;
  std::optional<int> trials;
};

int cmd_run(const std::filesystem::path& scenario, const Options& opts, std::ostream& out,
            std::ostream& err);
int cmd_analyze_graph(const std::filesystem::path& scenario, const Options& opts,
                      std::ostream& out, std::ostream& err);
int cmd_certify(const std::filesystem::path& scenario, const Options& opts, std::ostream& out,
                std::ostream& err);
int cmd_sweep(const std::filesystem::path& scenario, const Options& opts, std::ostream& out,
              std::ostream& err);

}  // namespace rendezvous::cli
