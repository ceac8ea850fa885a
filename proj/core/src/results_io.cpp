#include "combmat/results_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "combmat/error.hpp"

namespace combmat {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw InvalidArgument("format_double: conversion failed");
  return std::string(buf, end);
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "jsonl") return OutputFormat::jsonl;
  throw InvalidArgument("unknown format '" + name + "' (expected csv or jsonl)");
}

const char* to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "jsonl"; }

namespace {


std::string row_to_jsonl(const ResultRow& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["x"] = r.x;
  j["estimate"] = r.estimate;
  j["stderr"] = r.std_error;
  j["reps"] = r.reps;
  j["n"] = r.n;
  j["d"] = r.d;
  j["seed"] = r.seed;
  return j.dump();
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return x;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format, bool with_header) {
  std::string out;
  if (format == OutputFormat::csv) {
    if (with_header) {
      out += kResultsHeader;
      out += '\n';
    }
    for (const auto& r : rows) {
      out += r.experiment + ',' + format_double(r.x) + ',' + format_double(r.estimate) + ',' +
             format_double(r.std_error) + ',' + std::to_string(r.reps) + ',' + std::to_string(r.n) + ',' +
             std::to_string(r.d) + ',' + std::to_string(r.seed) + '\n';
    }
  } else {
    for (const auto& r : rows) out += row_to_jsonl(r) + '\n';
  }
  return out;
}

void write_results(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg) {
  const std::string& path = cfg.output_path;
  if (path.empty()) throw IoError("<empty>", "no output path configured");
  std::string content;
  bool existing = false;
  if (cfg.append) {
    std::error_code ec;
    if (fs::exists(path, ec) && fs::file_size(path, ec) > 0) {
      content = read_file(path);
      existing = true;
    }
  }
  content += format_results(rows, cfg.format, !existing);

  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open temporary file " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError(path, "write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError(path, "rename failed: " + ec.message());
  }
}

std::vector<ResultRow> parse_results(const std::string& text, OutputFormat format) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ResultRow r;
    if (format == OutputFormat::csv) {
      if (!header_seen) {
        if (line != kResultsHeader) throw InvalidArgument("results CSV: unexpected header '" + line + "'");
        header_seen = true;
        continue;
      }
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != 8) throw InvalidArgument("results CSV: expected 8 fields in '" + line + "'");
      r.experiment = cells[0];
      r.x = parse_double(cells[1]);
      r.estimate = parse_double(cells[2]);
      r.std_error = parse_double(cells[3]);
      r.reps = std::stol(cells[4]);
      r.n = std::stoi(cells[5]);
      r.d = std::stoi(cells[6]);
      r.seed = std::stoull(cells[7]);
    } else {
      const auto j = json::parse(line);
      r.experiment = j.at("experiment").get<std::string>();
      r.x = j.at("x").get<double>();
      r.estimate = j.at("estimate").get<double>();
      r.std_error = j.at("stderr").get<double>();
      r.reps = j.at("reps").get<long>();
      r.n = j.at("n").get<int>();
      r.d = j.at("d").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_results(const std::string& path, OutputFormat format) {
  return parse_results(read_file(path), format);
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  try {
    if (j.contains("params")) {
      const auto& p = j.at("params");
      cfg.params.n = p.at("n").get<int>();
      cfg.params.d = p.contains("d") ? p.at("d").get<int>() : cfg.params.n / 2;
    }
    if (j.contains("reps")) cfg.reps = j.at("reps").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("eps_grid")) cfg.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    if (j.contains("t_grid")) cfg.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
    if (j.contains("rows") && !j.at("rows").is_null()) cfg.rows = j.at("rows").get<int>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
    if (j.contains("append")) cfg.append = j.at("append").get<bool>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["params"] = {{"n", cfg.params.n}, {"d", cfg.params.d}};
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["eps_grid"] = cfg.eps_grid;
  j["t_grid"] = cfg.t_grid;
  j["delta"] = cfg.delta;
  j["rho"] = cfg.rho;
  j["gamma"] = cfg.gamma;
  j["mu"] = cfg.mu;
  j["rows"] = cfg.rows ? nlohmann::ordered_json(*cfg.rows) : nlohmann::ordered_json(nullptr);
  j["output_path"] = cfg.output_path;
  j["format"] = to_string(cfg.format);
  j["append"] = cfg.append;
  j["workers"] = cfg.workers;
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

}  // namespace combmat
