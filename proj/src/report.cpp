#include <cstdio>
#include <fstream>
#include <sstream>

#include "asymptotica/experiments.hpp"
#include "asymptotica/version.hpp"

namespace asymptotica {

bool Report::passed() const { return first_failure() == nullptr; }

const Check* Report::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed && !c.informational) return &c;
  }
  return nullptr;
}

std::vector<const Check*> Report::group(std::string_view name) const {
  std::vector<const Check*> out;
  for (const auto& c : checks) {
    if (c.group == name) out.push_back(&c);
  }
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_real(*v);
  } else {
    return std::to_string(*v);
  }
}

void write_atomic(const std::filesystem::path& target, const std::string& content) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
  }
}

}  // namespace

std::string render_csv(const Report& report) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    os << csv_field(r.section) << ',' << csv_field(r.origin_id) << ',' << csv_field(r.mode) << ','
       << opt(r.m) << ',' << opt(r.residual) << ',' << opt(r.norm) << ',' << opt(r.value) << ','
       << csv_field(r.verdict) << ',' << opt(r.horizon) << ',' << opt(r.tolerance) << '\n';
  }
  return os.str();
}

std::string render_summary(const Report& report) {
  std::ostringstream os;
  os << "asymptotica " << kVersion << '\n';
  os << "experiment: " << report.experiment << '\n';
  if (!report.echo.empty()) os << "config: " << report.echo << '\n';
  os << "seed: " << report.seed << '\n';
  const Check* fail = report.first_failure();
  os << "status: " << (fail ? "FAIL" : "PASS") << '\n';
  if (fail) {
    os << "first_failure: " << fail->group << '/' << fail->name << " value=" << format_real(fail->value)
       << " bound=" << format_real(fail->bound);
    if (!fail->detail.empty()) os << " (" << fail->detail << ')';
    os << '\n';
  }
  if (!report.diagnostics.empty()) {
    os << "\n[diagnostics]\n";
    for (const auto& [k, v] : report.diagnostics) os << k << ": " << v << '\n';
  }
  if (!report.checks.empty()) {
    os << "\n[checks]\n";
    for (const auto& c : report.checks) {
      const char* tag = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
      os << tag << ' ' << c.group << '/' << c.name << " value=" << format_real(c.value)
         << " bound=" << format_real(c.bound);
      if (!c.detail.empty()) os << "  " << c.detail;
      os << '\n';
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", report.wall_seconds);
  os << "\nwall_clock_seconds: " << buf << '\n';
  return os.str();
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_atomic(dir / "report.csv", render_csv(report));
  write_atomic(dir / "summary.txt", render_summary(report));
}

}  // namespace asymptotica
