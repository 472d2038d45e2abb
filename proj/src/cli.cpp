#include "dfdse/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dfdse/caps_hms.hpp"
#include "dfdse/dse.hpp"
#include "dfdse/io.hpp"
#include "dfdse/transform.hpp"

namespace dfdse {

namespace fs = std::filesystem;

namespace {

class ValidationFailure : public std::runtime_error {
 public:
  explicit ValidationFailure(json record) : std::runtime_error("validation failed"), record_(std::move(record)) {}
  const json& record() const { return record_; }

 private:
  json record_;
};

struct CommonArgs {
  std::string app;
  std::string arch;
  std::string strategy = "mrb-explore";
  std::string decoder = "heuristic";
  bool add_initial_tokens = false;
  double timeout = 3.0;
  double tick = 0;
};

void add_spec_options(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--app", a.app, "application JSON")->required();
  cmd->add_option("--arch", a.arch, "architecture JSON")->required();
}

void add_decode_options(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--strategy", a.strategy, "reference | mrb-always | mrb-explore");
  cmd->add_option("--decoder", a.decoder, "heuristic | ilp");
  cmd->add_flag("--add-initial-tokens", a.add_initial_tokens, "give every channel at least one initial token");
  cmd->add_option("--timeout", a.timeout, "per-solve time limit in seconds");
  cmd->add_option("--tick", a.tick, "tick length in seconds (overrides the architecture file)");
}

SpecificationGraph load_checked(const CommonArgs& a) {
  SpecificationGraph spec = load_spec(a.app, a.arch);
  if (a.tick > 0) spec.arch.set_tick_seconds(a.tick);
  auto report = validate(spec);
  if (!report.empty()) throw ValidationFailure({{"error", "validation"}, {"violations", report_to_json(report)}});
  return spec;
}

ProblemOptions problem_options(const CommonArgs& a) {
  ProblemOptions o;
  auto s = parse_strategy(a.strategy);
  if (!s) throw InputError("--strategy", "unknown strategy " + a.strategy);
  auto d = parse_decoder(a.decoder);
  if (!d) throw InputError("--decoder", "unknown decoder " + a.decoder);
  o.strategy = *s;
  o.decoder = *d;
  o.add_initial_tokens = a.add_initial_tokens;
  o.solver = solver_from_environment(a.timeout);
  return o;
}

int run_validate(const CommonArgs& a, std::ostream& out) {
  SpecificationGraph spec = load_spec(a.app, a.arch);
  auto report = validate(spec);
  out << json{{"ok", report.empty()}, {"violations", report_to_json(report)}}.dump(2) << '\n';
  return report.empty() ? 0 : 1;
}

int run_transform(const std::string& app_path, const std::string& bits, const std::string& out_path,
                  std::ostream& out) {
  ApplicationGraph app = application_from_json(read_json_file(app_path));
  auto report = validate_application(app);
  if (!report.empty()) throw ValidationFailure({{"error", "validation"}, {"violations", report_to_json(report)}});
  ReplacementFunction xi;
  try {
    xi = replacement_from_bits(app, bits);
  } catch (const TransformError& e) {
    throw InputError("--xi", e.what());
  }
  ApplicationGraph t = substitute_mrbs(app, xi);
  Bytes replaced_before = 0;
  Bytes replaced_after = 0;
  for (const auto& [id, c] : app.channels())
    if (!t.channels().contains(id)) replaced_before += static_cast<Bytes>(c.capacity) * c.token_bytes;
  for (const auto& [id, c] : t.channels())
    if (!app.channels().contains(id)) replaced_after += static_cast<Bytes>(c.capacity) * c.token_bytes;
  out << "replaced channels: " << replaced_before << " B -> " << replaced_after << " B\n";
  out << "total footprint: " << memory_footprint(app) << " B -> " << memory_footprint(t) << " B\n";
  if (!out_path.empty()) write_text_file(out_path, application_to_json(t).dump(2) + "\n");
  return 0;
}

json phenotype_json(const Phenotype& ph) {
  return {{"period", ph.period},
          {"footprint", ph.footprint},
          {"cost", ph.cost},
          {"proven_optimal", ph.proven_optimal},
          {"penalty", ph.penalty},
          {"rebinds", ph.decoded.rebinds}};
}

int run_schedule(const CommonArgs& a, const std::string& genotype_path, const std::string& out_dir,
                 std::ostream& out) {
  Problem problem(load_checked(a), problem_options(a));
  Genotype g = genotype_from_json(read_json_file(genotype_path), problem);
  Phenotype ph = problem.decode(g);
  json summary = phenotype_json(ph);
  if (ph.penalty) {
    summary["verify"] = nullptr;
    out << summary.dump(2) << '\n';
    return 2;
  }
  auto report = verify_schedule(ph.decoded.tasks, ph.decoded.schedule);
  summary["verify"] = report_to_json(report);
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    write_text_file(dir / "gantt.svg", gantt_svg(ph.decoded.tasks, ph.decoded.schedule, "schedule"));
    write_text_file(dir / "trace.json", trace_to_json(ph.decoded.tasks, ph.decoded.schedule).dump(2) + "\n");
    write_text_file(dir / "verify.json", report_to_json(report).dump(2) + "\n");
    write_text_file(dir / "phenotype.json", summary.dump(2) + "\n");
  }
  out << summary.dump(2) << '\n';
  return report.empty() ? 0 : 2;
}

int run_verify(const std::string& trace_path, std::ostream& out) {
  auto [tasks, schedule] = trace_from_json(read_json_file(trace_path));
  auto report = verify_schedule(tasks, schedule);
  out << json{{"period", schedule.period}, {"ok", report.empty()}, {"violations", report_to_json(report)}}.dump(2)
      << '\n';
  return report.empty() ? 0 : 1;
}

std::string fronts_csv(const RunLog& log) {
  std::ostringstream os;
  os << "generation,period,footprint,cost\n";
  for (std::size_t g = 0; g < log.fronts.size(); ++g)
    for (const auto& p : log.fronts[g]) os << g << ',' << p[0] << ',' << p[1] << ',' << p[2] << '\n';
  return os.str();
}

std::vector<std::vector<Objectives>> read_fronts_csv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<Objectives>> fronts;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 4) throw InputError(p.string(), "malformed front row");
    const auto g = static_cast<std::size_t>(v[0]);
    if (fronts.size() <= g) fronts.resize(g + 1);
    fronts[g].push_back({v[1], v[2], v[3]});
  }
  return fronts;
}

struct Curves {
  std::vector<std::string> groups;
  std::vector<std::vector<double>> curves;
  std::vector<Objectives> reference;
  std::vector<std::string> reference_owner;
};

// groups[k] holds the per-generation fronts of each run in group k.
Curves compare(const std::vector<std::string>& names, const std::vector<std::vector<std::vector<std::vector<Objectives>>>>& groups) {
  Curves c;
  c.groups = names;
  std::vector<std::vector<Objectives>> all;
  std::vector<Objectives> finals;
  for (const auto& g : groups)
    for (const auto& run : g) {
      for (const auto& f : run) all.push_back(f);
      if (!run.empty()) finals.insert(finals.end(), run.back().begin(), run.back().end());
    }
  c.reference = nondominated(finals);
  const Bounds b = bounds_of(all);
  for (const auto& p : c.reference) {
    std::string owner;
    for (std::size_t k = 0; k < groups.size(); ++k)
      for (const auto& run : groups[k])
        if (!run.empty() && std::find(run.back().begin(), run.back().end(), p) != run.back().end()) {
          if (owner.find(names[k]) == std::string::npos) owner += (owner.empty() ? "" : "|") + names[k];
        }
    c.reference_owner.push_back(owner);
  }
  const auto ref_n = normalize(c.reference, b);
  for (const auto& g : groups) {
    std::vector<std::vector<std::vector<Objectives>>> runs;
    for (const auto& run : g) {
      std::vector<std::vector<Objectives>> nr;
      for (const auto& f : run) nr.push_back(normalize(f, b));
      runs.push_back(std::move(nr));
    }
    c.curves.push_back(relative_avg_hypervolume(runs, ref_n));
  }
  return c;
}

void write_curves(const Curves& c, const fs::path& dir) {
  std::ostringstream os;
  os << "generation";
  for (const auto& g : c.groups) os << ',' << g;
  os << '\n';
  std::size_t gens = 0;
  for (const auto& v : c.curves) gens = std::max(gens, v.size());
  os.precision(10);
  for (std::size_t i = 0; i < gens; ++i) {
    os << i;
    for (const auto& v : c.curves) os << ',' << (v.empty() ? 0.0 : v[std::min(i, v.size() - 1)]);
    os << '\n';
  }
  write_text_file(dir / "hypervolume.csv", os.str());
  std::ostringstream ref;
  ref << "period,footprint,cost,found_by\n";
  for (std::size_t i = 0; i < c.reference.size(); ++i)
    ref << c.reference[i][0] << ',' << c.reference[i][1] << ',' << c.reference[i][2] << ',' << c.reference_owner[i]
        << '\n';
  write_text_file(dir / "reference_front.csv", ref.str());
}

int run_explore(const CommonArgs& a, EvolveParams params, int runs, const std::string& out_dir, std::ostream& out) {
  if (runs < 1) throw InputError("--runs", "run count must be at least 1");
  if (params.generations < 1 || params.population < 1 || params.offspring < 1)
    throw InputError("explore", "generations, population and offspring must be at least 1");
  if (!(params.crossover_rate >= 0 && params.crossover_rate <= 1))
    throw InputError("--crossover", "crossover rate must lie in [0,1]");
  Problem problem(load_checked(a), problem_options(a));
  const fs::path dir(out_dir);
  std::vector<std::vector<std::vector<Objectives>>> group;
  json summary = json::array();
  const std::uint64_t base_seed = params.seed;
  for (int r = 0; r < runs; ++r) {
    params.seed = base_seed + static_cast<std::uint64_t>(r);
    RunLog log = evolve(problem, params);
    json archive;
    archive["strategy"] = std::string(to_string(problem.options().strategy));
    archive["decoder"] = std::string(to_string(problem.options().decoder));
    archive["seed"] = params.seed;
    archive["generations"] = params.generations;
    archive["evaluations"] = log.evaluations;
    archive["entries"] = json::array();
    for (const auto& e : log.archive.entries())
      archive["entries"].push_back({{"period", e.objectives[0]},
                                    {"footprint", e.objectives[1]},
                                    {"cost", e.objectives[2]},
                                    {"proven_optimal", e.proven_optimal},
                                    {"generation", e.generation},
                                    {"genotype", genotype_to_json(e.genotype, problem)}});
    const fs::path rd = dir / ("run" + std::to_string(r));
    write_text_file(rd / "archive.json", archive.dump(2) + "\n");
    write_text_file(rd / "fronts.csv", fronts_csv(log));
    summary.push_back({{"run", r}, {"seed", params.seed}, {"archive_size", log.archive.entries().size()}});
    group.push_back(std::move(log.fronts));
  }
  try {
    write_curves(compare({std::string(to_string(problem.options().strategy))}, {group}), dir);
  } catch (const std::domain_error& e) {
    summary.push_back({{"hypervolume", e.what()}});
  }
  out << summary.dump(2) << '\n';
  return 0;
}

int run_report(const std::vector<std::string>& dirs, const std::string& out_dir, std::ostream& out) {
  std::vector<std::string> names;
  std::vector<std::vector<std::vector<std::vector<Objectives>>>> groups;
  for (const auto& d : dirs) {
    std::vector<std::vector<std::vector<Objectives>>> runs;
    for (int r = 0; fs::exists(fs::path(d) / ("run" + std::to_string(r)) / "fronts.csv"); ++r)
      runs.push_back(read_fronts_csv(fs::path(d) / ("run" + std::to_string(r)) / "fronts.csv"));
    if (runs.empty()) throw InputError(d, "no run directories with fronts.csv");
    names.push_back(fs::path(d).filename().string());
    groups.push_back(std::move(runs));
  }
  Curves c = compare(names, groups);
  write_curves(c, out_dir);
  json j;
  j["reference_front_size"] = c.reference.size();
  j["final_relative_hypervolume"] = json::object();
  for (std::size_t k = 0; k < names.size(); ++k)
    j["final_relative_hypervolume"][names[k]] = c.curves[k].empty() ? 0.0 : c.curves[k].back();
  out << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dataflow mapping and memory exploration"};
  app.require_subcommand(1);

  CommonArgs common;
  auto* validate_cmd = app.add_subcommand("validate", "check application and architecture files");
  add_spec_options(validate_cmd, common);

  std::string bits;
  std::string out_path;
  std::string app_only;
  auto* transform_cmd = app.add_subcommand("transform", "replace multi-cast actors by multi-reader buffers");
  transform_cmd->add_option("--app", app_only, "application JSON")->required();
  transform_cmd->add_option("--xi", bits, "one bit per multi-cast actor in id order")->required();
  transform_cmd->add_option("--out", out_path, "write the transformed application here");

  std::string genotype_path;
  std::string out_dir;
  auto* schedule_cmd = app.add_subcommand("schedule", "decode one genotype and emit Gantt, trace and checks");
  add_spec_options(schedule_cmd, common);
  add_decode_options(schedule_cmd, common);
  schedule_cmd->add_option("--genotype", genotype_path, "genotype JSON")->required();
  schedule_cmd->add_option("--out", out_dir, "output directory");

  std::string trace_path;
  auto* verify_cmd = app.add_subcommand("verify", "re-check a schedule trace");
  verify_cmd->add_option("--trace", trace_path, "trace JSON")->required();

  EvolveParams params;
  int runs = 1;
  auto* explore_cmd = app.add_subcommand("explore", "run the evolutionary exploration");
  add_spec_options(explore_cmd, common);
  add_decode_options(explore_cmd, common);
  explore_cmd->add_option("--generations", params.generations);
  explore_cmd->add_option("--population", params.population);
  explore_cmd->add_option("--offspring", params.offspring);
  explore_cmd->add_option("--crossover", params.crossover_rate);
  explore_cmd->add_option("--seed", params.seed);
  explore_cmd->add_option("--runs", runs);
  explore_cmd->add_option("--threads", params.threads);
  explore_cmd->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> run_dirs;
  auto* report_cmd = app.add_subcommand("report", "relative hypervolume curves across explore outputs");
  report_cmd->add_option("--runs", run_dirs, "explore output directories")->required();
  report_cmd->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }

  try {
    if (*validate_cmd) return run_validate(common, out);
    if (*transform_cmd) return run_transform(app_only, bits, out_path, out);
    if (*schedule_cmd) return run_schedule(common, genotype_path, out_dir, out);
    if (*verify_cmd) return run_verify(trace_path, out);
    if (*explore_cmd) return run_explore(common, params, runs, out_dir, out);
    if (*report_cmd) return run_report(run_dirs, out_dir, out);
  } catch (const ValidationFailure& e) {
    err << e.record().dump() << '\n';
    return 1;
  } catch (const InputError& e) {
    err << json{{"error", "input"}, {"where", e.where()}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", "runtime"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace dfdse
