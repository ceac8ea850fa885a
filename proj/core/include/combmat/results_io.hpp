#pragma once

#include <string>
#include <vector>

#include "combmat/experiments.hpp"

namespace combmat {

inline constexpr const char* kResultsHeader = "experiment,x,estimate,stderr,reps,n,d,seed";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format, bool with_header = true);

/// Write rows to cfg.output_path in cfg.format.  The file is written to a
/// temporary sibling and renamed into place; with cfg.append the existing
/// rows are kept (and the CSV header is not repeated).  Throws IoError.
void write_results(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg);

std::vector<ResultRow> parse_results(const std::string& text, OutputFormat format);
std::vector<ResultRow> read_results(const std::string& path, OutputFormat format);

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

OutputFormat parse_format(const std::string& name);
const char* to_string(OutputFormat format);

}  // namespace combmat
