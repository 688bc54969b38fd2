#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "propsim/experiment.hpp"
#include "propsim/parallel.hpp"

namespace {

// Turns leftover "--a.b value" / "--a.b=value" arguments into overrides.
bool collect_overrides(const std::vector<std::string>& extras, propsim::Overrides& out,
                       std::string& problem) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      problem = "unexpected argument '" + arg + "'";
      return false;
    }
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      problem = "override '" + arg + "' has no value";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propagation-process simulator and Poisson-approximation diagnostics"};
  app.set_version_flag("--version", std::string(propsim::version()));
  app.require_subcommand(1);

  std::string config_path;
  unsigned threads = 0;
  for (const auto& name : propsim::subcommand_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "JSON experiment configuration")->required();
    sub->add_option("--threads", threads, "worker threads (default: available parallelism)");
    sub->allow_extras();
    sub->footer("Any other --dotted.path VALUE overrides the matching config field.");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  propsim::Overrides overrides;
  std::string problem;
  if (!collect_overrides(sub->remaining(), overrides, problem)) {
    std::cerr << "config error: " << problem << '\n';
    return 2;
  }
  if (threads > 0) propsim::set_thread_count(threads);
  return propsim::run_cli(sub->get_name(), config_path, overrides, std::cout, std::cerr);
}
