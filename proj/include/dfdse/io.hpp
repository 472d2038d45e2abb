#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "dfdse/binding.hpp"
#include "dfdse/dse.hpp"
#include "dfdse/model.hpp"

namespace dfdse {

using json = nlohmann::ordered_json;

/// Malformed input document. `where` names the offending element.
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& message)
      : std::runtime_error(message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Numbers pass through; strings like "38 kB", "2.5 MiB" use decimal (kB, MB, GB) or binary (KiB, MiB, GiB) units.
Bytes parse_bytes(const json& v, const std::string& where);
/// As parse_bytes with a trailing "/s"; returns bytes per second.
double parse_bandwidth(const json& v, const std::string& where);

json read_json_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

ApplicationGraph application_from_json(const json& j);
json application_to_json(const ApplicationGraph& app);
ArchitectureGraph architecture_from_json(const json& j);
SpecificationGraph load_spec(const std::filesystem::path& app, const std::filesystem::path& arch);

/// Genotype file: {"xi": {"a2": 1}, "decisions": {"c1": "PROD"}, "binding": {"a1": "p3"}}.
/// Missing multi-cast actors default to 0, missing channels to GLOBAL; every actor needs a core.
Genotype genotype_from_json(const json& j, const Problem& problem);
json genotype_to_json(const Genotype& g, const Problem& problem);

/// Self-contained schedule trace: tasks, resources, channels and start times.
json trace_to_json(const TaskSet& tasks, const Schedule& schedule);
std::pair<TaskSet, Schedule> trace_from_json(const json& j);

json report_to_json(const ValidationReport& r);

std::string gantt_svg(const TaskSet& tasks, const Schedule& schedule, const std::string& title);

}  // namespace dfdse
