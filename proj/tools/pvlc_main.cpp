// Command-line surface: load a distribution, build and audit a codec,
// evaluate the bound report, reproduce the bundled examples, or run the
// invariant selftest. Exit codes: 0 pass, 1 usage or I/O error, 2 length
// bound violated, 3 leakage violated, 4 losslessness violated.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "pvlc/harness.hpp"

namespace {

void render(const pvlc::ExperimentReport& rep, const std::string& format) {
  if (format == "csv" && !rep.csv_header.empty()) {
    std::cout << rep.csv_header << '\n' << rep.csv_row << '\n';
    return;
  }
  std::cout << rep.doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leakage-controlled variable-length codecs: build, audit, bound"};
  app.require_subcommand(1);
  app.fallthrough();  // --format and --omit-timing may follow the subcommand

  std::string format = "json";
  bool omit_timing = false;
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_flag("--omit-timing", omit_timing, "leave wall-clock time out of the report");

  // bounds
  auto* cb = app.add_subcommand("bounds", "evaluate every applicable bound");
  std::string b_dist;
  double b_eps = 0.0;
  std::string b_sep;
  cb->add_option("--dist", b_dist, "distribution JSON file")->required();
  cb->add_option("--eps", b_eps, "leakage budget in bits")->capture_default_str();
  cb->add_option("--sep", b_sep, "separation JSON file (optional)");

  // codec
  auto* cc = app.add_subcommand("codec", "build a scheme, audit it exhaustively");
  std::string c_dist, c_scheme = "eps", c_sep = "auto", c_umode = "huffman";
  double c_eps = 0.0;
  std::uint64_t c_seed = 1;
  std::size_t c_mc = 0;
  cc->add_option("--dist", c_dist, "distribution JSON file")->required();
  cc->add_option("--scheme", c_scheme, "scheme kind")
      ->check(CLI::IsMember({"eps", "split", "functional"}))
      ->capture_default_str();
  cc->add_option("--sep", c_sep, "separation JSON file or 'auto'")->capture_default_str();
  cc->add_option("--eps", c_eps, "leakage budget in bits")->capture_default_str();
  cc->add_option("--seed", c_seed, "seed for the encoder rng streams")->capture_default_str();
  cc->add_option("--umode", c_umode, "auxiliary coding mode")
      ->check(CLI::IsMember({"huffman", "fixed"}))
      ->capture_default_str();
  cc->add_option("--mc", c_mc, "extra sampled cross-check with this many samples");

  // example1
  auto* ce1 = app.add_subcommand("example1", "uniform n-bit strings, bit count private");
  unsigned e1_n = 10;
  double e1_eps = 0.5;
  ce1->add_option("--n", e1_n, "number of source bits (1..16)")->capture_default_str();
  ce1->add_option("--eps", e1_eps, "leakage budget in bits")->capture_default_str();

  // example2
  app.add_subcommand("example2", "twelve-symbol skewed source through a useless channel");

  // selftest
  auto* cst = app.add_subcommand("selftest", "run the invariant suites");
  std::uint64_t st_seed = 1;
  std::size_t st_trials = 200;
  cst->add_option("--seed", st_seed, "suite seed")->capture_default_str();
  cst->add_option("--trials", st_trials, "instances per suite")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    pvlc::CmdOptions opt;
    opt.omit_timing = omit_timing;
    opt.atom_budget = pvlc::atom_budget_from_env();

    pvlc::ExperimentReport rep;
    if (app.got_subcommand("bounds")) {
      pvlc::JointDistribution j = pvlc::load_joint(b_dist);
      std::optional<pvlc::Separation> sep;
      if (!b_sep.empty())
        sep = pvlc::separation_from_json(pvlc::load_json_file(b_sep), j.x_labels);
      rep = pvlc::cmd_bounds(j, b_eps, sep ? &*sep : nullptr, opt);
    } else if (app.got_subcommand("codec")) {
      opt.mc_samples = c_mc;
      pvlc::JointDistribution j = pvlc::load_joint(c_dist);
      pvlc::SchemeKind kind = c_scheme == "eps"     ? pvlc::SchemeKind::EpsPrivate
                              : c_scheme == "split" ? pvlc::SchemeKind::BoundedSplit
                                                    : pvlc::SchemeKind::PerfectFunctional;
      pvlc::UCodingMode mode =
          c_umode == "fixed" ? pvlc::UCodingMode::FixedLength : pvlc::UCodingMode::Huffman;
      std::optional<pvlc::Separation> sep;
      if (c_sep != "auto")
        sep = pvlc::separation_from_json(pvlc::load_json_file(c_sep), j.x_labels);
      rep = pvlc::cmd_codec(j, kind, c_eps, c_seed, mode, sep ? &*sep : nullptr, opt);
    } else if (app.got_subcommand("example1")) {
      rep = pvlc::cmd_example1(e1_n, e1_eps, opt);
    } else if (app.got_subcommand("example2")) {
      rep = pvlc::cmd_example2(opt);
    } else {
      rep = pvlc::cmd_selftest(st_seed, st_trials, opt);
    }
    render(rep, format);
    return rep.exit_code;
  } catch (const pvlc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
