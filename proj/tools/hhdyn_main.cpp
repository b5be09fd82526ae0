// hhdyn command line: relax | run | presets | validate

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hhdyn/errors.hpp"
#include "hhdyn/fft.hpp"
#include "hhdyn/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  int threads = 0;
  bool frozen_r = false;
  std::optional<double> duration_fs;
};

hhdyn::ScenarioConfig resolve(const Options& o) {
  hhdyn::ScenarioConfig c;
  if (!o.config.empty()) {
    c = hhdyn::load_config(o.config);
    if (!o.preset.empty() && o.preset != c.preset) {
      throw hhdyn::ConfigError("--preset " + o.preset + " conflicts with preset = " + c.preset + " in " + o.config);
    }
  } else if (!o.preset.empty()) {
    c = hhdyn::preset_config(o.preset);
  }
  if (!o.out.empty()) c.output.dir = o.out;
  if (o.frozen_r) c.grid.frozen_r = true;
  if (o.duration_fs) c.propagation.duration = hhdyn::fs_to_au(*o.duration_fs);
  c.validate();
  return c;
}

void write_error_file(const std::string& dir, const std::string& record) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(std::filesystem::path(dir) / "error.json");
  if (out) out << record << '\n';
}

int fail(const std::string& kind, const std::string& message, int code, const std::string& dir) {
  const std::string record = hhdyn::error_record(kind, message, code);
  std::cout << record << std::endl;
  std::cerr << "error: " << message << std::endl;
  write_error_file(dir, record);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid simulator for two laser-driven 1D hydrogen atoms"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "scenario file (INI)");
    sub->add_option("--preset", o.preset, "preset name (see 'presets')");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--threads", o.threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--frozen-r", o.frozen_r, "clamp R at initial.r0");
    sub->add_option("--duration-fs", o.duration_fs, "total propagation time in fs")->check(CLI::NonNegativeNumber);
  };
  auto* relax = app.add_subcommand("relax", "compute and store the initial state");
  auto* run = app.add_subcommand("run", "run a full scenario");
  auto* presets = app.add_subcommand("presets", "list presets");
  auto* validate = app.add_subcommand("validate", "parse a config and print its expansion");
  for (auto* sub : {relax, run, validate}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (presets->parsed()) {
    for (const auto& name : hhdyn::preset_names()) std::cout << name << '\n';
    return 0;
  }

  if (o.threads > 0) {
    omp_set_num_threads(o.threads);
    hhdyn::set_fft_threads(o.threads);
  }

  std::string dir = o.out;
  try {
    const auto config = resolve(o);
    dir = config.output.dir;
    if (validate->parsed()) {
      std::cout << hhdyn::dump_config(config);
      return 0;
    }
    if (relax->parsed()) {
      const auto init = hhdyn::relax_scenario(config);
      std::cout << "{\"status\":\"ok\",\"energy\":" << init.energy << ",\"steps\":" << init.relax_steps << "}"
                << std::endl;
      return 0;
    }
    const auto result = hhdyn::run_scenario(config);
    std::cout << "{\"status\":\"ok\",\"samples\":" << result.record.samples.size() << ",\"dir\":\"" << dir << "\"}"
              << std::endl;
    return 0;
  } catch (const hhdyn::ConfigError& e) {
    return fail("config", e.what(), 2, validate->parsed() ? "" : dir);
  } catch (const hhdyn::NumericalError& e) {
    return fail("numerical", e.what(), 1, dir);
  } catch (const std::bad_alloc&) {
    return fail("memory", "out of memory", 1, dir);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1, dir);
  }
}
