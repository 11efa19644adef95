// qod: knapsack solvers, optical-device simulation and cost estimates.
//
//   qod solve --instance inst.txt [--method dp|exhaustive|truncated --epsilon E]
//   qod simulate --instance inst.txt [--device dev.txt] [--seed S]
//   qod feasibility [--instance inst.txt] [--device dev.txt]
//   qod cost --instance inst.txt [--device dev.txt] [--epsilon E] [--inputs M]
//   qod compare --instance inst.txt [--device dev.txt] [--epsilon E]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qod/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optical dynamic-programming knapsack toolkit"};
  app.set_version_flag("--version", std::string(qod::kToolVersion));

  std::string command;
  std::string method;
  std::string format = "text";
  qod::RunConfig config;
  double epsilon = 0;
  std::string device;
  std::string dump;

  app.add_option("command", command, "solve | simulate | feasibility | cost | compare")
      ->required();
  app.add_option("--instance", config.instance_paths,
                 "instance file (repeat for a batch)");
  app.add_option("--device", device, "device parameter file (auto-sized when absent)");
  app.add_option("--method", method, "dp | exhaustive | truncated | qod");
  auto* eps_opt = app.add_option("--epsilon", epsilon, "relative precision in (0, 1)");
  app.add_option("--seed", config.seed, "random seed (default 0)");
  app.add_option("--format", format, "text | structured")
      ->check(CLI::IsMember({"text", "structured"}));
  app.add_flag("--strict", config.strict, "exit 1 when the run produced warnings");
  app.add_option("--dump-stages", dump, "write every stage's beams to this file");
  app.add_option("--inputs", config.inputs, "number of repeated inputs M (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return qod::kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << qod::kToolVersion << '\n';
    return qod::kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qod::kExitError;
  }

  const auto cmd = qod::parse_command(command);
  if (!cmd) {
    std::cerr << "error: unknown command '" << command << "'\n";
    return qod::kExitError;
  }
  config.command = *cmd;
  if (!method.empty()) {
    config.method = qod::parse_method(method);
    if (!config.method) {
      std::cerr << "error: unknown method '" << method << "'\n";
      return qod::kExitError;
    }
  }
  if (eps_opt->count() > 0) config.epsilon = epsilon;
  if (!device.empty()) config.device_path = device;
  if (!dump.empty()) config.dump_stages = dump;
  config.format = format == "structured" ? qod::OutputFormat::Structured
                                         : qod::OutputFormat::Text;
  return qod::run(config, std::cout, std::cerr);
}
