// hardbody: run experiment pipelines and write JSON reports and CSV tables.
//
// Exit codes: 0 all checks pass, 2 soft warnings only, 1 hard failure or
// runtime error, 64 bad arguments or configuration.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hardbody/experiments.hpp"

namespace {

constexpr int kExitConfig = 64;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode, output, eta, candidate, methods;
  std::optional<std::int64_t> samples, directions;
  std::optional<double> tol, c_config, kappa;
  std::optional<int> n, m, threads, polytopes;
  std::vector<int> sizes;
};

void add_global(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config file");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--mode", f.mode, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("--output", f.output, "directory for reports");
  app->add_option("--samples", f.samples, "default Monte-Carlo sample budget");
  app->add_option("--tol", f.tol, "membership tolerance band");
  app->add_option("--threads", f.threads, "worker cap (sets HARDBODY_THREADS)");
}

void add_system(CLI::App* app, Flags& f) {
  app->add_option("--n", f.n, "dimension");
  app->add_option("--m", f.m, "number of design vectors");
  app->add_option("--c-config", f.c_config, "design constant c in Delta = c sqrt(log m)");
}

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw hardbody::ConfigError("cannot read config file " + path);
  try {
    auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw hardbody::ConfigError("config must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw hardbody::ConfigError(std::string("config parse error: ") + e.what());
  }
}

/// Command-line values override the config file.
nlohmann::json merge_flags(nlohmann::json doc, const std::string& cmd, const Flags& f) {
  if (f.seed) doc["seed"] = *f.seed;
  if (f.mode) doc["mode"] = *f.mode;
  if (f.output) doc["output"] = *f.output;
  if (f.samples) doc["samples"] = *f.samples;
  if (f.tol) doc["tol"] = *f.tol;
  if (cmd == "all") return doc;
  auto& s = doc[cmd];
  if (s.is_null()) s = nlohmann::json::object();
  if (f.n) s["n"] = *f.n;
  if (f.m) s["m"] = *f.m;
  if (f.c_config) s["c_config"] = *f.c_config;
  if (f.eta) {
    if (*f.eta == "auto") {
      s["eta"] = "auto";
    } else {
      try {
        std::size_t used = 0;
        s["eta"] = std::stod(*f.eta, &used);
        if (used != f.eta->size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw hardbody::ConfigError("--eta needs a number or auto");
      }
    }
  }
  if (f.kappa) s["kappa"] = *f.kappa;
  if (f.candidate) s["candidate"] = *f.candidate;
  if (f.directions) s["directions"] = *f.directions;
  if (f.polytopes) s["polytopes"] = *f.polytopes;
  if (!f.sizes.empty()) s["N"] = f.sizes;
  if (f.methods) {
    nlohmann::json list = nlohmann::json::array();
    std::stringstream ss(*f.methods);
    for (std::string item; std::getline(ss, item, ',');) list.push_back(item);
    s["methods"] = list;
  }
  return doc;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

hardbody::Status emit(const hardbody::Report& r, const std::filesystem::path& dir) {
  write_file(dir / (r.command + ".json"), hardbody::dump_json(hardbody::to_json(r)));
  write_file(dir / (r.command + ".csv"), hardbody::to_csv(r));
  for (const auto& row : r.rows)
    std::cout << r.command << "  " << hardbody::to_string(row.status) << "  " << row.quantity << " = "
              << hardbody::format_number(row.value) << "\n";
  const auto s = r.overall();
  std::cout << r.command << ": " << hardbody::to_string(s) << "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard convex bodies: construction, verification and baselines"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::string> names = hardbody::command_names();
  names.push_back("all");
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    add_global(sub, f);
    if (name == "all") continue;
    if (name != "dual") add_system(sub, f);
    if (name == "hardness" || name == "approx") sub->add_option("--eta", f.eta, "eta value or auto");
    if (name == "hardness") {
      sub->add_option("--kappa", f.kappa, "kappa");
      sub->add_option("--candidate", f.candidate, "random:N=8 or greedy:N=8[,budget=512]");
    }
    if (name == "hardness" || name == "approx") sub->add_option("--directions", f.directions, "random direction budget");
    if (name == "approx") {
      sub->add_option("--N", f.sizes, "vertex counts");
      sub->add_option("--methods", f.methods, "comma separated: random,greedy");
    }
    if (name == "dual") {
      sub->add_option("--polytopes", f.polytopes, "random polytopes to check");
      add_system(sub, f);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    if (f.threads) {
      if (*f.threads < 1) throw hardbody::ConfigError("--threads must be >= 1");
      setenv("HARDBODY_THREADS", std::to_string(*f.threads).c_str(), 1);
    }
    const auto cfg = hardbody::parse_config(merge_flags(load_config(f.config_path), cmd, f));
    const std::filesystem::path dir = cfg.global.output;
    std::filesystem::create_directories(dir);
    hardbody::Status worst = hardbody::Status::Pass;
    const std::vector<std::string> run = cmd == "all" ? hardbody::command_names() : std::vector<std::string>{cmd};
    for (const auto& name : run) {
      const auto s = emit(hardbody::run_command(name, cfg), dir);
      if (s == hardbody::Status::Fail || (s == hardbody::Status::Warn && worst != hardbody::Status::Fail)) worst = s;
    }
    return hardbody::exit_code(worst);
  } catch (const hardbody::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hardbody::Error& e) {
    std::cerr << "error [" << hardbody::to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == hardbody::ErrorCode::InvalidConfig ? kExitConfig : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
