#include "plap/report_io.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace plap {
namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

nlohmann::json row_json(const DiagnosticReport& r) {
  return nlohmann::json{{"name", r.name},
                        {"p1", r.params.p1},
                        {"p2", r.params.p2},
                        {"eps", r.params.eps},
                        {"sigma", r.params.sigma},
                        {"h", r.params.h},
                        {"axis", r.params.axis},
                        {"center_x1", r.params.center.x1},
                        {"center_x2", r.params.center.x2},
                        {"r", r.params.r},
                        {"R", r.params.R},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"ratio", r.ratio},
                        {"slack", r.slack},
                        {"pass", r.pass},
                        {"note", r.note}};
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagnosticReport>& rows) {
  std::string out =
      "name,p1,p2,eps,sigma,h,axis,center_x1,center_x2,r,R,lhs,rhs,ratio,"
      "slack,pass,note\n";
  for (const DiagnosticReport& r : rows) {
    out += csv_quote(r.name);
    out += ',' + g17(r.params.p1) + ',' + g17(r.params.p2);
    out += ',' + g17(r.params.eps) + ',' + g17(r.params.sigma);
    out += ',' + g17(r.params.h) + ',' + std::to_string(r.params.axis);
    out += ',' + g17(r.params.center.x1) + ',' + g17(r.params.center.x2);
    out += ',' + g17(r.params.r) + ',' + g17(r.params.R);
    out += ',' + g17(r.lhs) + ',' + g17(r.rhs) + ',' + g17(r.ratio);
    out += ',' + g17(r.slack) + ',' + (r.pass ? std::string("1")
                                              : std::string("0"));
    out += ',' + csv_quote(r.note) + '\n';
  }
  return out;
}

std::string diagnostics_json(const std::vector<DiagnosticReport>& rows) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["all_pass"] = all_pass(rows);
  doc["reports"] = nlohmann::json::array();
  for (const DiagnosticReport& r : rows) doc["reports"].push_back(row_json(r));
  return doc.dump(2) + "\n";
}

std::string eps_table_csv(const std::vector<EpsConvergenceRow>& rows) {
  std::string out = "eps,lhs,rhs,ratio\n";
  for (const EpsConvergenceRow& r : rows)
    out += g17(r.eps) + ',' + g17(r.lhs) + ',' + g17(r.rhs) + ',' +
           g17(r.ratio) + '\n';
  return out;
}

std::string sigma_table_csv(const std::vector<SigmaComparisonRow>& rows) {
  std::string out = "sigma,energy_min,energy_at_ueps,max_gap,minimality\n";
  for (const SigmaComparisonRow& r : rows)
    out += g17(r.sigma) + ',' + g17(r.energy_min) + ',' +
           g17(r.energy_at_ueps) + ',' + g17(r.max_gap) + ',' +
           (r.minimality ? "1" : "0") + '\n';
  return out;
}

std::string mms_table_csv(const std::vector<MmsRow>& rows) {
  std::string out = "nx,h,max_interior_error,rate\n";
  for (const MmsRow& r : rows)
    out += std::to_string(r.nx) + ',' + g17(r.h) + ',' +
           g17(r.max_interior_error) + ',' + g17(r.rate) + '\n';
  return out;
}

bool all_pass(const std::vector<DiagnosticReport>& rows) {
  for (const DiagnosticReport& r : rows)
    if (!r.pass) return false;
  return true;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  static std::atomic<unsigned> counter{0};
  const fs::path tmp =
      target.parent_path() /
      (".tmp." + target.filename().string() + "." +
       std::to_string(static_cast<unsigned long>(::getpid())) + "." +
       std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "'");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
      throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" +
                             path + "': " + ec.message());
  }
}

}  // namespace plap
