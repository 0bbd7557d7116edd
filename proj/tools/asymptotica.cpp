#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "asymptotica/experiments.hpp"
#include "asymptotica/version.hpp"

namespace {

int finish(const asymptotica::Report& report, const std::string& out) {
  asymptotica::write_report(report, out);
  if (const auto* f = report.first_failure()) {
    std::cerr << "verify failed: " << f->group << '/' << f->name << " value=" << asymptotica::format_real(f->value)
              << " bound=" << asymptotica::format_real(f->bound);
    if (!f->detail.empty()) std::cerr << " (" << f->detail << ')';
    std::cerr << '\n';
    return 2;
  }
  std::cout << report.experiment << ": ok, wrote " << out << "/report.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for power-bounded operators"};
  app.set_version_flag("--version", std::string(asymptotica::kVersion));
  app.require_subcommand(1);

  std::string config_file;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("config", config_file, "Config file")->required()->check(CLI::ExistingFile);

  std::string case_name;
  std::optional<std::size_t> dim, horizon;
  std::string out = "out";
  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "Run a canned check");
  verify->add_option("case", case_name, "Case name")
      ->required()
      ->check(CLI::IsMember(asymptotica::verify_cases()));
  verify->add_option("--dim", dim, "Dimension or grid size override");
  verify->add_option("--horizon", horizon, "Horizon override");
  verify->add_option("--out", out, "Output directory");
  verify->add_option("--seed", seed, "Seed offset");

  auto* zoo = app.add_subcommand("zoo", "Operator catalog");
  auto* zoo_list = zoo->add_subcommand("list", "List constructors and combinators");
  zoo->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const auto cfg = asymptotica::load_config(config_file);
      return finish(asymptotica::run(cfg), cfg.output);
    }
    if (*verify) {
      asymptotica::VerifyOptions vo;
      vo.dim = dim;
      vo.horizon = horizon;
      vo.seed = seed;
      return finish(asymptotica::verify(case_name, vo), out);
    }
    if (*zoo_list) {
      for (const auto& e : asymptotica::zoo_catalog()) {
        std::cout << e.signature << "\n    " << e.summary << '\n';
      }
      return 0;
    }
  } catch (const asymptotica::ConfigError& e) {
    std::cerr << "config error at " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
