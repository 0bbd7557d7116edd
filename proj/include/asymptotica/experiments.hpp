#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "asymptotica/asymptotics.hpp"
#include "asymptotica/backward.hpp"
#include "asymptotica/operators.hpp"

namespace asymptotica {

/// Malformed configuration; path() names the offending location, e.g.
/// "$.operator.terms[1].dim".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ExperimentKind {
  orbit,
  classify,
  gram,
  decompose,
  kerchy,
  backward,
  mt_membership,
  inverse_growth,
  verify,
};

std::string_view to_string(ExperimentKind k);

struct VectorSpec {
  enum class Kind { basis, random, entries };
  Kind kind = Kind::random;
  std::size_t index = 1;   // one-based, for basis
  std::uint64_t seed = 0;  // for random
  std::vector<Complex> entries;
  std::string id;

  Vec materialize(std::size_t dim) const;
};

struct Tolerances {
  VerdictThresholds verdict;
  ChainOptions chain;
  double gram_split_tol = 1e-8;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::orbit;
  std::optional<Operator> op;
  std::string operator_echo;  // compact JSON of the operator expression
  std::string verify_case;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> horizon;
  std::vector<VectorSpec> vectors;
  std::string direction = "both";  // forward | adjoint | both
  std::string mode = "both";       // stepwise | joint | both
  Tolerances tol;
  std::uint64_t seed = 0;
  std::string output = "out";
};

/// Strict parser: unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Builds an operator from an expression (JSON text, a bare name such as
/// "example2", or a call such as "identity(4)"). default_dim fills in
/// constructors that omit their size.
Operator parse_operator(std::string_view expression,
                        std::optional<std::size_t> default_dim = std::nullopt);

/// One CSV line. Unset optionals render as empty fields.
struct CsvRow {
  std::string section;
  std::string origin_id;
  std::string mode;
  std::optional<std::size_t> m;
  std::optional<double> residual;
  std::optional<double> norm;
  std::optional<double> value;
  std::string verdict;
  std::optional<std::size_t> horizon;
  std::optional<double> tolerance;
};

inline constexpr const char* kCsvHeader =
    "section,origin_id,mode,m,residual,norm,value,verdict,horizon,tolerance";

struct Check {
  std::string group;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
  bool informational = false;  // reported, never fails the case
};

struct Report {
  std::string experiment;
  std::string echo;
  std::uint64_t seed = 0;
  std::vector<CsvRow> rows;
  std::vector<std::pair<std::string, std::string>> diagnostics;
  std::vector<Check> checks;
  double wall_seconds = 0.0;

  bool passed() const;
  /// First check that failed, if any.
  const Check* first_failure() const;
  std::vector<const Check*> group(std::string_view name) const;
};

Report run(const ExperimentConfig& config);

struct VerifyOptions {
  std::optional<std::size_t> dim;
  std::optional<std::size_t> horizon;
  std::uint64_t seed = 0;
  /// Run only the named check group of a case (e.g. "decay" of example1).
  std::optional<std::string> only_group;
};

const std::vector<std::string>& verify_cases();
Report verify(std::string_view case_name, const VerifyOptions& options = {});

/// Reals use 17 significant digits.
std::string format_real(double v);
std::string render_csv(const Report& report);
std::string render_summary(const Report& report);

/// Writes <dir>/report.csv and <dir>/summary.txt, each through a temporary
/// file and a rename.
void write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace asymptotica
