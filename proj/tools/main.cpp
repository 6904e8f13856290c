#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "basketbounds/cli/commands.hpp"

using namespace basketbounds;

int main(int argc, char** argv) {
  CLI::App app{"Static-arbitrage bounds on basket call prices"};
  app.require_subcommand(1);

  std::string input, output, json_path;
  bool pin_forward = false;

  auto* validate = app.add_subcommand("validate", "check quotes for static arbitrage");
  validate->add_option("input", input, "market file (JSON or chain CSV)")->required();

  auto* clean = app.add_subcommand("clean", "replace each chain by its closest arbitrage-free chain in l1");
  clean->add_option("input", input, "market file")->required();
  clean->add_option("-o,--output", output, "output file (.csv for chain CSV, else JSON; - for stdout)")->required();
  clean->add_flag("--pin-forward", pin_forward, "pin each chain to its forward at strike 0");

  cli::BoundRequest request;
  const std::map<std::string, cli::MethodChoice> methods{{"closed", cli::MethodChoice::Closed},
                                                         {"lp", cli::MethodChoice::Lp},
                                                         {"relax", cli::MethodChoice::Relax},
                                                         {"oracle", cli::MethodChoice::Oracle},
                                                         {"all", cli::MethodChoice::All}};
  const std::map<std::string, cli::SenseChoice> senses{
      {"upper", cli::SenseChoice::Upper}, {"lower", cli::SenseChoice::Lower}, {"both", cli::SenseChoice::Both}};
  auto* bound = app.add_subcommand("bound", "bound the price of a basket call");
  bound->add_option("input", input, "market file")->required();
  bound->add_option("-w,--target-weights", request.weights, "basket weights, comma separated")
      ->required()
      ->delimiter(',');
  bound->add_option("-k,--strikes", request.strikes, "strikes, comma separated")->required()->delimiter(',');
  bound->add_option("-m,--method", request.method, "closed | lp | relax | oracle | all")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
  bound->add_option("-s,--sense", request.sense, "upper | lower | both")
      ->transform(CLI::CheckedTransformer(senses, CLI::ignore_case));
  bound->add_option("--json", json_path, "also write the report as JSON (- for stdout)");

  cli::Figure2Config fig;
  double tol_vol = 0.02;
  bool check = false;
  auto* figure2 = app.add_subcommand("figure2", "implied-vol bounds for the lognormal basket experiment");
  figure2->add_option("-o,--output", output, "CSV output (default stdout)");
  figure2->add_option("--paths", fig.paths, "Monte Carlo paths")->capture_default_str();
  figure2->add_option("--seed", fig.seed, "random seed")->capture_default_str();
  figure2->add_option("--maturity", fig.maturity, "maturity in years")->capture_default_str();
  figure2->add_option("--width", fig.width, "relative strike half-width around the money")->capture_default_str();
  figure2->add_option("--points", fig.points, "number of strikes")->capture_default_str();
  figure2->add_option("--tol-vol", tol_vol, "implied-vol tolerance for --check")->capture_default_str();
  figure2->add_flag("--unit-forward-anchors", fig.unit_forward_anchors, "anchor every single-asset forward");
  figure2->add_flag("--check", check, "compare market vol with the bounds and set the exit code");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kParseError;
  }

  try {
    if (*validate) return cli::cmd_validate(input, std::cout, std::cerr);
    if (*clean) return cli::cmd_clean(input, output, pin_forward, std::cout, std::cerr);
    if (*bound) return cli::cmd_bound(input, request, json_path, std::cout, std::cerr);
    return cli::cmd_figure2(fig, output, tol_vol, check, std::cout, std::cerr);
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return cli::kParseError;
  } catch (const InfeasibleMarket& e) {
    std::cerr << "arbitrage: " << e.what() << "\n";
    return cli::kViolation;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return cli::kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kParseError;
  }
}
