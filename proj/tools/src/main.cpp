// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

// nelsonfk: batch runner for the Nelson-model experiments.
//
//   nelsonfk <variant> --config run.json [--seed N] [--workers W] [--out DIR]
//   nelsonfk describe <variant>
//
// Exit status: 0 pass, 2 numerical check failed, 1 usage or schema error.

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace {

using namespace nfk;
using namespace nfk::cli;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out = "nfk-out";
};

json versions() {
  return {{"nelsonfk", NFK_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION},
          {"compiler", __VERSION__}};
}

json read_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

int run(const std::string& variant, const Flags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  const json cfg = read_config(flags.config);
  Params top(cfg, "config");
  if (const json* v = top.raw("variant")) {
    if (!v->is_string() || v->get<std::string>() != variant) {
      throw ConfigError("config.variant: does not match subcommand " + variant);
    }
  }
  const json* model_json = top.raw("model");
  if (!model_json) throw ConfigError("config.model: missing");
  const json* params_json = top.raw("params");
  std::uint64_t seed = 1;
  if (const json* s = top.raw("seed")) {
    if (!s->is_number_unsigned()) throw ConfigError("config.seed: expected a non-negative integer");
    seed = s->get<std::uint64_t>();
  }
  top.finish();
  if (flags.seed) seed = *flags.seed;

  ModelSpec spec;
  try {
    spec = model_from_json(*model_json);
    resolve(spec);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Params params(params_json ? *params_json : json::object(), "params");
  RunOutput out = run_experiment(variant, spec, params, {seed, flags.workers});

  const std::filesystem::path dir(flags.out);
  std::filesystem::create_directories(dir);
  json result = {{"variant", variant},
                 {"pass", out.pass},
                 {"seed", seed},
                 {"model", model_to_json(spec)},
                 {"result", out.result}};
  write_json(dir / "result.json", result);
  for (const Table& t : out.tables) write_table(dir, t);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(dir / "manifest.json", {{"variant", variant},
                                      {"config", cfg},
                                      {"seed", seed},
                                      {"workers", flags.workers},
                                      {"versions", versions()},
                                      {"files", [&] {
                                         json f = json::array({"result.json"});
                                         for (const Table& t : out.tables) f.push_back(t.name + ".csv");
                                         return f;
                                       }()},
                                      {"wall_time_s", wall}});
  std::cout << variant << ": " << (out.pass ? "pass" : "FAIL") << " (" << dir.string() << ")\n";
  return out.pass ? kExitPass : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nelsonfk: Feynman-Kac and oracle experiments for the Nelson model"};
  app.set_version_flag("--version", NFK_VERSION);
  app.require_subcommand(1);

  Flags flags;
  std::string selected;
  for (const std::string& v : variants()) {
    CLI::App* sub = app.add_subcommand(v, describe(v).substr(v.size() + 1));
    sub->add_option("--config,-c", flags.config, "JSON run configuration")->required();
    sub->add_option("--seed", flags.seed, "override the configuration seed");
    sub->add_option("--workers,-j", flags.workers, "worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out,-o", flags.out, "output directory")->capture_default_str();
    sub->callback([&selected, v] { selected = v; });
  }
  std::string target;
  CLI::App* desc = app.add_subcommand("describe", "print a variant's parameters and purpose");
  desc->add_option("variant", target, "variant name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (desc->parsed()) {
      std::cout << describe(target);
      return kExitPass;
    }
    return run(selected, flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}
