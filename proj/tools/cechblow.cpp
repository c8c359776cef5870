// cechblow: command-line front end. One subcommand per pipeline; see
// `cechblow --help`.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "cechblow/cli.hpp"

namespace cli = cechblow::cli;

namespace {

int emit(const cli::Outcome& out, const std::string& path) {
  const std::string text = cli::dump(out.report);
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    cli::write_atomically(path, text);
  }
  return out.exit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact blowup towers, blown-up Cech cocycles, Cousin problems and line-bundle experiments."};
  app.require_subcommand(1);

  std::vector<std::string> instances;
  std::string out_path;
  cli::Options opts;
  std::optional<unsigned> max_depth, deg, power;

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"solve-cousin", "solve a first Cousin problem (kind: cousin)"},
      {"solve-cocycle", "make a 1-cocycle a coboundary after blowing up (kind: cech_solve)"},
      {"resolve-snc", "transform a polynomial to simple normal crossings (kind: snc)"},
      {"order-division", "order functions by division after blowing up (kind: order_by_division)"},
      {"xi", "line-bundle experiments on the xi_{k,l} family (kind: xi_experiment)"},
      {"limit-eq", "compare two sections over the tower limit (kind: limit_eq)"},
      {"verify", "replay every certificate embedded in a report"},
      {"selftest", "run the seeded algebraic property suites"}};
  for (const auto& name : cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    if (name != "selftest") sub->add_option("--instance", instances, "instance (or report, for verify) JSON file")->required();
    sub->add_option("--out", out_path, "report path; a directory when several instances are given (default: stdout)");
    sub->add_option("--seed", opts.seed, "seed for randomized suites");
    sub->add_option("--max-depth", max_depth, "maximum tower depth");
    sub->add_option("--deg", deg, "degree bound for bounded searches");
    sub->add_option("--power", power, "bound on the power of Q");
    sub->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--timing", opts.timing, "include wall-clock timing (reports are then not byte-reproducible)");
    subs[name] = sub;
  }
  CLI11_PARSE(app, argc, argv);
  opts.max_depth = max_depth;
  opts.deg = deg;
  opts.power = power;

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    if (command == "selftest") return emit(cli::run_json(command, cechblow::Json(), opts), out_path);
    if (instances.size() == 1) return emit(cli::run_file(command, instances[0], opts), out_path);

    // Several instances: one report per instance under the --out directory.
    if (out_path.empty()) {
      std::cerr << "--out DIR is required with several instances\n";
      return cli::kInvalid;
    }
    std::vector<int> codes(instances.size());
    cli::Options inner = opts;
    inner.jobs = 1;
    cli::parallel_for(instances.size(), opts.jobs, [&](std::size_t i) {
      const std::filesystem::path in(instances[i]);
      const std::string target = (std::filesystem::path(out_path) / (in.stem().string() + ".report.json")).string();
      codes[i] = emit(cli::run_file(command, instances[i], inner), target);
    });
    int worst = cli::kOk;
    for (int c : codes) {
      if (c == cli::kInvalid) worst = cli::kInvalid;
      else if (c == cli::kNegative && worst == cli::kOk) worst = cli::kNegative;
    }
    return worst;
  } catch (const std::exception& e) {
    std::cerr << "cechblow: " << e.what() << "\n";
    return cli::kNegative;
  }
}
