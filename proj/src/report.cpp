#include "toalab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "toalab/errors.hpp"

namespace toalab {

using json = nlohmann::json;

double median_abs(std::vector<double> values) {
  if (values.empty()) {
    return 0.0;
  }
  for (auto& v : values) {
    v = std::abs(v);
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double rmse(const std::vector<double>& values) {
  if (values.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (double v : values) {
    total += v * v;
  }
  return std::sqrt(total / static_cast<double>(values.size()));
}

std::vector<metrics_entry> compute_metrics(const std::string& estimator, const std::vector<error_sample>& errors,
                                           const std::vector<error_sample>& failures) {
  using key = std::pair<std::uint8_t, double>;
  std::map<key, std::vector<double>> cells;
  std::map<key, std::size_t> failed;
  for (const auto& e : errors) {
    cells[{static_cast<std::uint8_t>(e.which), e.snr_db}].push_back(e.error_ns);
  }
  for (const auto& f : failures) {
    ++failed[{static_cast<std::uint8_t>(f.which), f.snr_db}];
    cells[{static_cast<std::uint8_t>(f.which), f.snr_db}];
  }
  std::vector<metrics_entry> out;
  for (const auto& [k, errs] : cells) {
    metrics_entry m;
    m.estimator = estimator;
    m.which = static_cast<channel_case>(k.first);
    m.snr_db = k.second;
    m.count = errs.size();
    m.failures = failed.contains(k) ? failed.at(k) : 0;
    m.rmse_ns = rmse(errs);
    m.median_ns = median_abs(errs);
    double sum = 0.0;
    for (double e : errs) {
      sum += e;
      m.cdf_ns.push_back(std::abs(e));
    }
    m.bias_ns = errs.empty() ? 0.0 : sum / static_cast<double>(errs.size());
    std::sort(m.cdf_ns.begin(), m.cdf_ns.end());
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

json snr_to_json(double snr) {
  return std::isinf(snr) ? json("inf") : json(snr);
}

double snr_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw format_error("invalid SNR value in report", 0);
  }
  return j.get<double>();
}

std::string format_double(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (s == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw format_error("invalid number '" + s + "' in report", 0);
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) {
    out.push_back(cur);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

} // namespace

void write_report_json(std::ostream& out, const metrics_report& report) {
  json j;
  j["metadata"] = {{"seeds", report.seeds}, {"config_hash", report.config_hash}};
  j["entries"] = json::array();
  for (const auto& e : report.entries) {
    j["entries"].push_back({{"estimator", e.estimator},
                            {"case", to_string(e.which)},
                            {"snr_db", snr_to_json(e.snr_db)},
                            {"count", e.count},
                            {"failures", e.failures},
                            {"rmse_ns", e.rmse_ns},
                            {"median_ns", e.median_ns},
                            {"bias_ns", e.bias_ns},
                            {"cdf_ns", e.cdf_ns}});
  }
  out << j.dump(2) << '\n';
}

metrics_report read_report_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw format_error(std::string("report is not valid JSON: ") + e.what(), e.byte);
  }
  metrics_report report;
  try {
    report.seeds = j.at("metadata").at("seeds").get<std::vector<std::uint64_t>>();
    report.config_hash = j.at("metadata").at("config_hash").get<std::string>();
    for (const auto& e : j.at("entries")) {
      metrics_entry m;
      m.estimator = e.at("estimator").get<std::string>();
      m.which = parse_channel_case(e.at("case").get<std::string>());
      m.snr_db = snr_from_json(e.at("snr_db"));
      m.count = e.at("count").get<std::size_t>();
      m.failures = e.at("failures").get<std::size_t>();
      m.rmse_ns = e.at("rmse_ns").get<double>();
      m.median_ns = e.at("median_ns").get<double>();
      m.bias_ns = e.at("bias_ns").get<double>();
      m.cdf_ns = e.at("cdf_ns").get<std::vector<double>>();
      report.entries.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw format_error(std::string("malformed report: ") + e.what(), 0);
  }
  return report;
}

namespace {
constexpr const char* csv_header = "estimator,case,snr_db,count,failures,rmse_ns,median_ns,bias_ns,cdf_ns";
}

void write_report_csv(std::ostream& out, const metrics_report& report) {
  out << "# seeds=";
  for (std::size_t i = 0; i < report.seeds.size(); ++i) {
    out << (i ? ";" : "") << report.seeds[i];
  }
  out << " config_hash=" << report.config_hash << '\n';
  out << csv_header << '\n';
  for (const auto& e : report.entries) {
    out << e.estimator << ',' << to_string(e.which) << ',' << format_double(e.snr_db) << ',' << e.count << ','
        << e.failures << ',' << format_double(e.rmse_ns) << ',' << format_double(e.median_ns) << ','
        << format_double(e.bias_ns) << ',';
    for (std::size_t i = 0; i < e.cdf_ns.size(); ++i) {
      out << (i ? ";" : "") << format_double(e.cdf_ns[i]);
    }
    out << '\n';
  }
}

metrics_report read_report_csv(std::istream& in) {
  metrics_report report;
  std::string line;
  std::uint64_t offset = 0;
  if (!std::getline(in, line) || line.rfind("# seeds=", 0) != 0) {
    throw format_error("missing report metadata line", offset);
  }
  {
    const auto hash_pos = line.find(" config_hash=");
    if (hash_pos == std::string::npos) {
      throw format_error("missing config hash", offset);
    }
    const std::string seeds = line.substr(8, hash_pos - 8);
    if (!seeds.empty()) {
      for (const auto& s : split(seeds, ';')) {
        report.seeds.push_back(std::stoull(s));
      }
    }
    report.config_hash = line.substr(hash_pos + 13);
  }
  offset += line.size() + 1;
  if (!std::getline(in, line) || line != csv_header) {
    throw format_error("unexpected CSV header", offset);
  }
  offset += line.size() + 1;
  while (std::getline(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() != 9) {
      throw format_error("expected 9 columns", offset);
    }
    try {
      metrics_entry m;
      m.estimator = cols[0];
      m.which = parse_channel_case(cols[1]);
      m.snr_db = parse_double(cols[2]);
      m.count = std::stoull(cols[3]);
      m.failures = std::stoull(cols[4]);
      m.rmse_ns = parse_double(cols[5]);
      m.median_ns = parse_double(cols[6]);
      m.bias_ns = parse_double(cols[7]);
      if (!cols[8].empty()) {
        for (const auto& v : split(cols[8], ';')) {
          m.cdf_ns.push_back(parse_double(v));
        }
      }
      report.entries.push_back(std::move(m));
    } catch (const format_error&) {
      throw;
    } catch (const std::exception& e) {
      throw format_error(std::string("bad CSV row: ") + e.what(), offset);
    }
    offset += line.size() + 1;
  }
  return report;
}

void save_report(const std::filesystem::path& path, const metrics_report& report, const std::string& format) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw error("cannot open " + path.string() + " for writing");
  }
  if (format == "json") {
    write_report_json(out, report);
  } else if (format == "csv") {
    write_report_csv(out, report);
  } else {
    throw argument_error("unknown report format '" + format + "'");
  }
}

} // namespace toalab
