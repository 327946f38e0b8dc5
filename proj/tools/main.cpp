// ratcert: certificates for rationality of moduli of plane curves.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ratcert/cli.hpp"
#include "ratcert/parallel.hpp"

namespace {

std::vector<int> parse_components(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ratcert::cli;

  CLI::App app{"Exact certificates for rationality of moduli of plane curves"};
  app.require_subcommand(1);
  app.fallthrough();

  unsigned threads = ratcert::hardware_threads();
  std::string output;
  std::string log_level = "info";
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", output, "Also write the JSON report to this file");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  SearchArgs search;
  auto* s = app.add_subcommand("search", "List double-bundle candidates for degree d");
  s->add_option("--d", search.d, "Curve degree")->required();
  s->add_option("--kappa", search.kappa, "Stable rationality level bound");
  s->add_option("--e-min", search.e_min);
  s->add_option("--e-max", search.e_max);

  CheckDbArgs db;
  std::string db_components;
  auto* c = app.add_subcommand("check-db", "Run the double-bundle genericity certificate");
  c->add_option("--d", db.d, "Curve degree")->required();
  c->add_option("--e", db.e, "Degree of U = V(e,0); default: first candidate");
  c->add_option("--components", db_components, "Comma-separated summand indices of W (needs --e)");
  c->add_option("--kappa", db.kappa);
  c->add_option("--prime", db.prime);
  c->add_option("--seed", db.seed);
  c->add_option("--n-points", db.n_points);
  c->add_option("--t-terms", db.t_terms);
  c->add_option("--max-retries", db.max_retries);

  CheckCovArgs cv;
  auto* v = app.add_subcommand("check-cov", "Run the covariant spanning certificate");
  v->add_option("--d", cv.d, "Curve degree")->required();
  v->add_option("--prime", cv.prime);
  v->add_option("--seed", cv.seed);
  v->add_option("--samples", cv.samples);
  v->add_option("--g-terms", cv.g_terms);

  TableArgs tb;
  bool table_json = false;
  std::string report_dir;
  auto* t = app.add_subcommand("table", "Known rationality results by degree");
  t->add_option("--from", tb.from);
  t->add_option("--to", tb.to);
  t->add_flag("--verify", tb.verify, "Re-run the certificate for live-verifiable rows");
  t->add_option("--seed", tb.seed);
  t->add_option("--report-dir", report_dir, "Directory for verified reports");
  t->add_flag("--json", table_json, "Print JSON instead of the text table");

  ChiArgs chi;
  std::string chi_components;
  std::string chi_cache;
  auto* x = app.add_subcommand("chi", "Print the chi polynomial; optionally cache its table mod p");
  x->add_option("--e", chi.e)->required();
  x->add_option("--f", chi.f)->required();
  x->add_option("--components", chi_components)->required();
  x->add_option("--prime", chi.prime);
  x->add_option("--cache", chi_cache);

  RankArgs rk;
  std::string ckpt_dir;
  if (const char* env = std::getenv("RATCERT_CHECKPOINT_DIR")) ckpt_dir = env;
  auto* r = app.add_subcommand("rank", "Rank of a seeded random matrix (benchmark, checkpoint/resume)");
  r->add_option("--n", rk.n);
  r->add_option("--prime", rk.prime);
  r->add_option("--seed", rk.seed);
  r->add_option("--panel", rk.panel_width);
  r->add_option("--checkpoint-dir", ckpt_dir, "Defaults to $RATCERT_CHECKPOINT_DIR");
  r->add_option("--stop-after", rk.stop_after, "Checkpoint and stop after this many panels");
  r->add_option("--checkpoint-every", rk.checkpoint_every, "Write a checkpoint every this many panels");
  r->add_flag("--resume", rk.resume);

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("ratcert");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  CommandResult result;
  try {
    if (*s) {
      result = cmd_search(search);
    } else if (*c) {
      if (!db_components.empty()) db.components = parse_components(db_components);
      db.threads = threads;
      result = cmd_check_db(db);
    } else if (*v) {
      cv.threads = threads;
      result = cmd_check_cov(cv);
    } else if (*t) {
      tb.threads = threads;
      if (!report_dir.empty()) tb.report_dir = report_dir;
      result = cmd_table(tb);
      if (table_json) result.text.clear();
    } else if (*x) {
      chi.components = parse_components(chi_components);
      if (!chi_cache.empty()) chi.cache = chi_cache;
      result = cmd_chi(chi);
    } else if (*r) {
      rk.threads = threads;
      if (!ckpt_dir.empty()) rk.checkpoint_dir = ckpt_dir;
      result = cmd_rank(rk);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e);
  }

  if (!output.empty()) {
    std::ofstream os(output);
    if (!os) {
      spdlog::error("cannot write {}", output);
      return kExitInvalidInput;
    }
    os << result.report.dump(2) << '\n';
  }
  if (result.text.empty()) {
    std::cout << result.report.dump(2) << '\n';
  } else {
    std::cout << result.text;
  }
  return result.exit_code;
}
