// finslerkit: command-line front end for the verification suites.
//
//   finslerkit [--config PATH] [--seed N] [--out PATH] [--format json|csv]
//              [--c VALUE] [--sv-threshold VALUE] [--timings] SUITE [EXAMPLE]
//
// Exit status: 0 when every check passes, 1 when a check fails or the
// computation errors out, 2 for usage errors.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "finsler/config.hpp"
#include "finsler/gallery.hpp"
#include "finsler/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "json";
  std::optional<double> c;
  std::optional<double> sv_threshold;
  bool timings = false;
  bool no_details = false;
  std::string example;
};

int write_output(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) {
    std::cerr << "finslerkit: cannot write '" << opt.out_path << "'\n";
    return kExitUsage;
  }
  out << text;
  return 0;
}

finsler::RunConfig build_config(const Options& opt) {
  finsler::RunConfig cfg = opt.config_path.empty() ? finsler::RunConfig{} : finsler::load_config(opt.config_path);
  if (!opt.example.empty()) {
    cfg.example = opt.example;
    cfg.entry.reset();
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.c) cfg.c = *opt.c;
  if (opt.sv_threshold) cfg.sv_threshold = *opt.sv_threshold;
  if (opt.timings) cfg.timings = true;
  return cfg;
}

int run_suite(const std::string& suite, const Options& opt) {
  const finsler::RunConfig cfg = build_config(opt);
  const finsler::VerificationReport report = finsler::run_suite(suite, cfg);
  const std::string text = opt.format == "csv" ? report.to_csv() : report.to_json(!opt.no_details);
  if (const int rc = write_output(opt, text); rc != 0) return rc;
  return report.pass() ? kExitPass : kExitFail;
}

int list_examples(const Options& opt) {
  std::string text;
  for (const std::string& name : finsler::gallery_names()) {
    const finsler::GallerySpec s = finsler::gallery_spec(name);
    text += name + "\t" + s.family + "\t" + s.kind + "\tc=" + std::to_string(s.c) + "\n";
  }
  return write_output(opt, text);
}

int export_config(const Options& opt) {
  finsler::RunConfig cfg = build_config(opt);
  // Pin the entry so the file reproduces the run without the gallery name.
  const finsler::GalleryEntry entry = finsler::build_entry(finsler::resolve_spec(cfg));
  cfg.entry = entry.spec;
  cfg.example.clear();
  cfg.c.reset();
  return write_output(opt, finsler::config_to_json(cfg).dump(2) + "\n");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification toolkit for Randers-type Finsler metrics", "finslerkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_option("--seed", opt.seed, "seed for every sampled quantity");
  app.add_option("--out", opt.out_path, "write the report to this file instead of stdout");
  app.add_option("--format", opt.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--c", opt.c, "override the entry's d(tau) = c * omega constant");
  app.add_option("--sv-threshold", opt.sv_threshold, "relative singular-value cutoff for the nullspace");
  app.add_flag("--timings", opt.timings, "record per-check runtimes (reports are then not reproducible)");
  app.add_flag("--no-details", opt.no_details, "omit per-check detail arrays from JSON output");

  std::string selected;
  for (const std::string& suite : finsler::suite_names()) {
    CLI::App* sub = app.add_subcommand(suite, "run the " + suite + " suite");
    sub->add_option("example", opt.example, "gallery example name (see 'list')");
    sub->callback([&selected, suite] { selected = suite; });
  }
  app.add_subcommand("list", "list gallery examples")->callback([&selected] { selected = "list"; });
  CLI::App* exp = app.add_subcommand("export-config", "print a configuration pinning an example");
  exp->add_option("example", opt.example, "gallery example name");
  exp->callback([&selected] { selected = "export-config"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (selected == "list") return list_examples(opt);
    if (selected == "export-config") return export_config(opt);
    return run_suite(selected, opt);
  } catch (const finsler::Error& e) {
    std::cerr << "finslerkit: " << finsler::to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == finsler::ErrorKind::Usage ? kExitUsage : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "finslerkit: " << e.what() << "\n";
    return kExitFail;
  }
}
