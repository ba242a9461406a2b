#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "powlmine/conformance.hpp"
#include "powlmine/discovery.hpp"
#include "powlmine/error.hpp"
#include "powlmine/event_log.hpp"
#include "powlmine/interval_log.hpp"
#include "powlmine/model.hpp"
#include "powlmine/petri.hpp"
#include "powlmine/pot.hpp"

namespace powlmine::cli {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string input;
  std::string format;  // xes, csv; empty = by extension
  std::string granularity = "none";
  bool strict = false;
  CsvMapping csv;
  std::string start_column;
  std::string lifecycle_column;
  std::string delimiter = ",";
  std::string timestamp_format;
  std::string model;
  std::string out_model;
  std::string out_dot;
  std::string out_pnml;
  std::string out_dir;
  std::string out_report;
  std::size_t lin_cap = 1000;
  std::size_t accept_budget = kDefaultAcceptBudget;
  std::size_t soundness_budget = kDefaultSoundnessBudget;
  bool verbose = false;
};

/// Collects output files and writes them all at the end; if any write fails
/// the files already written are removed again.
class Outputs {
 public:
  void add(const std::string& path, std::string content) {
    if (!path.empty()) pending_.emplace_back(path, std::move(content));
  }

  void commit() {
    std::vector<std::string> written;
    for (const auto& [path, content] : pending_) {
      std::ofstream file(path, std::ios::binary | std::ios::trunc);
      if (file) file << content;
      if (!file) {
        std::error_code ec;
        for (const auto& w : written) fs::remove(w, ec);
        fs::remove(path, ec);
        throw InputError("cannot write " + path);
      }
      written.push_back(path);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> pending_;
};

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

Model load_model(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  return model_from_json(read_file(path));
}

std::string detect_format(const RunConfig& cfg) {
  if (!cfg.format.empty()) return cfg.format;
  std::string ext = fs::path(cfg.input).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".xes") return "xes";
  if (ext == ".csv") return "csv";
  throw ConfigError("cannot infer the log format of " + cfg.input + "; pass --format");
}

EventLog load_log(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  const auto g = parse_granularity(cfg.granularity);
  if (!g) throw ConfigError("unknown granularity '" + cfg.granularity + "'");
  EventLog log;
  if (detect_format(cfg) == "xes") {
    log = parse_xes_file(cfg.input, cfg.strict);
  } else {
    CsvMapping mapping = cfg.csv;
    if (!cfg.start_column.empty()) mapping.start_timestamp_column = cfg.start_column;
    if (!cfg.lifecycle_column.empty()) mapping.lifecycle_column = cfg.lifecycle_column;
    if (cfg.delimiter == "\\t" || cfg.delimiter == "tab") {
      mapping.delimiter = '\t';
    } else if (cfg.delimiter.size() == 1) {
      mapping.delimiter = cfg.delimiter.front();
    } else {
      throw ConfigError("delimiter must be a single character");
    }
    log = parse_csv_file(cfg.input, mapping, cfg.timestamp_format);
  }
  return abstract_timestamps(log, *g);
}

PotMultiset load_pots(const RunConfig& cfg, std::ostream& err) {
  const EventLog log = load_log(cfg);
  const IntervalLog intervals = build_interval_log(log);
  if (cfg.verbose) {
    const auto& meta = log.source_meta();
    const auto& st = intervals.stats();
    err << "records_read=" << meta.records_read << " records_skipped=" << meta.records_skipped
        << " matched=" << st.matched << " atomic=" << st.atomic
        << " unmatched_starts=" << st.unmatched_starts << "\n";
  }
  return build_pot_multiset(intervals);
}

void require_positive(const RunConfig& cfg) {
  if (cfg.lin_cap == 0 || cfg.accept_budget == 0 || cfg.soundness_budget == 0)
    throw ConfigError("caps and budgets must be positive");
}

int cmd_discover(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out_model.empty() && cfg.out_dot.empty() && cfg.out_pnml.empty())
    throw ConfigError("discover needs at least one of --out-model, --out-dot, --out-pnml");
  const auto t0 = std::chrono::steady_clock::now();
  const PotMultiset pots = load_pots(cfg, err);
  const Model model = discover(pots);
  Outputs outputs;
  outputs.add(cfg.out_model, to_json(model) + "\n");
  outputs.add(cfg.out_dot, to_dot(model));
  if (!cfg.out_pnml.empty()) outputs.add(cfg.out_pnml, export_pnml(to_workflow_net(model)));
  outputs.commit();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  out << "cases=" << pots.total_count() << " variants=" << pots.variants().size()
      << " labels=" << labels(model).size() << " model_nodes=" << model.node_count()
      << " model_leaves=" << model.leaf_count() << " wall_ms=" << ms.count() << "\n";
  return kOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_positive(cfg);
  const Model model = load_model(cfg.model);
  const PotMultiset pots = load_pots(cfg, err);
  const FitnessReport report = verify_perfect_fitness(model, pots, cfg.lin_cap, cfg.accept_budget);
  const std::string json = to_json(report);
  if (cfg.out_report.empty()) {
    out << json;
  } else {
    Outputs outputs;
    outputs.add(cfg.out_report, json);
    outputs.commit();
  }
  out << "variants=" << report.variants_checked
      << " linearizations=" << report.linearizations_checked
      << " failures=" << report.failures.size() << " inconclusive=" << report.inconclusive
      << " capped=" << (report.capped ? "true" : "false") << "\n";
  if (!report.failures.empty()) return kVerificationFailed;
  return report.inconclusive > 0 ? kBudget : kOk;
}

int cmd_pots(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const PotMultiset pots = load_pots(cfg, err);
  std::vector<std::size_t> order(pots.variants().size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> keys(order.size());
  for (auto i : order) keys[i] = pots.variant_key(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = pots.variants()[a].count;
    const auto cb = pots.variants()[b].count;
    return ca != cb ? ca > cb : keys[a] < keys[b];
  });
  std::ostringstream table;
  table << "rank\tcount\tnodes\tedges\tvariant\n";
  Outputs outputs;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Pot p = pots.pot(order[k]);
    table << k + 1 << '\t' << pots.variants()[order[k]].count << '\t' << p.nodes.size() << '\t'
          << p.edges.size() << '\t' << keys[order[k]] << '\n';
    if (!cfg.out_dir.empty())
      outputs.add((fs::path(cfg.out_dir) / ("variant_" + std::to_string(k + 1) + ".dot")).string(),
                  export_pot_dot(p));
  }
  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw InputError("cannot create directory " + cfg.out_dir);
    outputs.add((fs::path(cfg.out_dir) / "variants.tsv").string(), table.str());
    outputs.commit();
  }
  out << table.str();
  return kOk;
}

int cmd_convert(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out_dot.empty() && cfg.out_pnml.empty())
    throw ConfigError("convert needs --out-pnml or --out-dot");
  const Model model = load_model(cfg.model);
  const WorkflowNet net = to_workflow_net(model);
  Outputs outputs;
  outputs.add(cfg.out_pnml, export_pnml(net));
  outputs.add(cfg.out_dot, export_net_dot(net));
  outputs.commit();
  out << "places=" << net.places().size() << " transitions=" << net.transitions().size()
      << " arcs=" << net.arc_count() << "\n";
  return kOk;
}

int cmd_soundness(const RunConfig& cfg, std::ostream& out) {
  require_positive(cfg);
  const Model model = load_model(cfg.model);
  const SoundnessReport report = check_soundness(to_workflow_net(model), cfg.soundness_budget);
  out << "verdict=" << to_string(report.verdict) << " explored_states=" << report.explored_states
      << " witnesses=" << report.witnesses.size() << "\n";
  for (const auto& w : report.witnesses) out << "witness: " << w << "\n";
  switch (report.verdict) {
    case Verdict::sound:
      return kOk;
    case Verdict::unsound:
      return kVerificationFailed;
    case Verdict::inconclusive:
      return kBudget;
  }
  return kBudget;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discovers POWL process models from partially ordered event logs."};
  app.name("powlmine");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file with option defaults; flags win");

  RunConfig cfg;
  app.add_option("--input", cfg.input, "event log (XES or CSV)");
  app.add_option("--format", cfg.format, "log format; default from the file extension")
      ->check(CLI::IsMember({"xes", "csv"}));
  app.add_option("--granularity", cfg.granularity, "timestamp abstraction")
      ->check(CLI::IsMember({"none", "second", "minute", "hour", "day"}));
  app.add_flag("--strict", cfg.strict, "abort on XES events missing mandatory attributes");
  app.add_option("--case-column", cfg.csv.case_column, "CSV case id column");
  app.add_option("--activity-column", cfg.csv.activity_column, "CSV activity column");
  app.add_option("--timestamp-column", cfg.csv.timestamp_column, "CSV (completion) time column");
  app.add_option("--start-column", cfg.start_column, "CSV start time column");
  app.add_option("--lifecycle-column", cfg.lifecycle_column, "CSV lifecycle column");
  app.add_option("--delimiter", cfg.delimiter, "CSV delimiter (single character or 'tab')");
  app.add_option("--timestamp-format", cfg.timestamp_format,
                 "pattern with %Y %m %d %H %M %S %f %z; default ISO-8601");
  app.add_option("--model", cfg.model, "model JSON produced by discover");
  app.add_option("--out-model", cfg.out_model, "write the model JSON here");
  app.add_option("--out-dot", cfg.out_dot, "write a Graphviz rendering here");
  app.add_option("--out-pnml", cfg.out_pnml, "write the workflow net as PNML here");
  app.add_option("--out-dir", cfg.out_dir, "directory for variant tables and DOT files");
  app.add_option("--out-report", cfg.out_report, "write the fitness report JSON here");
  app.add_option("--lin-cap", cfg.lin_cap, "linearizations per variant")->capture_default_str();
  app.add_option("--accept-budget", cfg.accept_budget, "states per acceptance check")
      ->capture_default_str();
  app.add_option("--soundness-budget", cfg.soundness_budget, "markings per soundness check")
      ->capture_default_str();
  app.add_flag("-v,--verbose", cfg.verbose, "print parse statistics to stderr");

  auto* discover_cmd = app.add_subcommand("discover", "discover a model from an event log");
  auto* check_cmd = app.add_subcommand("check", "verify perfect fitness of a model on a log");
  auto* pots_cmd = app.add_subcommand("pots", "list the partially ordered trace variants");
  auto* convert_cmd = app.add_subcommand("convert", "translate a model into a workflow net");
  auto* soundness_cmd = app.add_subcommand("soundness", "check the soundness of a model's net");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (discover_cmd->parsed()) return cmd_discover(cfg, out, err);
    if (check_cmd->parsed()) return cmd_check(cfg, out, err);
    if (pots_cmd->parsed()) return cmd_pots(cfg, out, err);
    if (convert_cmd->parsed()) return cmd_convert(cfg, out);
    if (soundness_cmd->parsed()) return cmd_soundness(cfg, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kFormatError;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const SizeLimitExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace powlmine::cli
