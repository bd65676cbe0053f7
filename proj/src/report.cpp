#include <fstream>
#include <sstream>
#include <stdexcept>

#include "towerforge/run.hpp"

namespace towerforge {

Json report_to_json(const Report& report) {
  Json results = Json::array();
  std::size_t passed = 0;
  for (const auto& v : report.results) {
    Json r{{"suite", v.suite}, {"lemma", v.lemma}, {"instance", v.instance},
           {"verdict", v.pass ? "pass" : "fail"}, {"data", v.data}};
    if (!v.trace.empty()) r["trace"] = v.trace;
    if (v.millis) r["millis"] = *v.millis;
    results.push_back(std::move(r));
    passed += v.pass;
  }
  return Json{{"schema", "towerforge-report"},
              {"schema_version", kReportSchemaVersion},
              {"command", report.command},
              {"config", report.config},
              {"results", results},
              {"summary", {{"total", report.results.size()}, {"passed", passed},
                           {"failed", report.results.size() - passed}}}};
}

std::string report_to_text(const Report& report) {
  std::ostringstream out;
  out << "towerforge " << report.command << " (report schema " << kReportSchemaVersion << ")\n";
  std::string suite;
  std::size_t passed = 0;
  for (const auto& v : report.results) {
    if (v.suite != suite) {
      suite = v.suite;
      out << "\n" << suite << "\n";
    }
    out << "  [" << (v.pass ? "PASS" : "FAIL") << "] " << v.instance << "\n      checks: " << v.lemma << "\n";
    if (v.millis) out << "      time: " << static_cast<long long>(*v.millis) << " ms\n";
    for (const auto& line : v.trace) out << "      " << line << "\n";
    passed += v.pass;
  }
  out << "\n" << passed << "/" << report.results.size() << " checks passed\n";
  return out.str();
}

void emit_report(const Report& report, const std::string& path) {
  std::ofstream json(path);
  if (!json) throw std::runtime_error(path + ": cannot write report");
  json << report_to_json(report).dump(2) << "\n";
  if (!json) throw std::runtime_error(path + ": write failed");
  std::string text_path = path;
  auto dot = text_path.rfind('.');
  auto slash = text_path.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) text_path.resize(dot);
  text_path += ".txt";
  std::ofstream text(text_path);
  if (!text) throw std::runtime_error(text_path + ": cannot write report");
  text << report_to_text(report);
}

}  // namespace towerforge
