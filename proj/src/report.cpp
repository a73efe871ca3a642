#include "infoadapt/report.hpp"

#include <openssl/sha.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "infoadapt/errors.hpp"

namespace infoadapt {

namespace fs = std::filesystem;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream hex;
  for (unsigned char b : digest) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  return hex.str();
}

std::string input_hash(const std::vector<std::pair<std::string, std::string>>& config_echo,
                       const std::vector<fs::path>& input_files) {
  std::string content;
  for (const auto& [k, v] : config_echo) content += k + "=" + v + "\n";
  for (const auto& path : input_files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read input file: " + path.string());
    content += std::string(std::istreambuf_iterator<char>(in), {});
  }
  return git_blob_sha1(content);
}

namespace {

std::size_t arm_count(const SimulationReport& report) {
  for (const auto& r : report.replicates)
    if (!r.failed) return r.arm_counts.size();
  return 0;
}

std::size_t weight_count(const SimulationReport& report) {
  for (const auto& r : report.replicates)
    for (const auto& s : r.snapshots)
      if (!s.arms.empty()) return s.arms.front().per_parameter.size();
  return 0;
}

std::string csv_safe(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace

std::string summary_text(const SimulationReport& report, const std::string& hash) {
  std::ostringstream out;
  out << "format=infoadapt-summary-1\n";
  for (const auto& [k, v] : report.config_echo) out << "config." << k << "=" << v << "\n";
  out << "seed=" << report.seed << "\n";
  out << "input_hash=" << hash << "\n";
  out << "success_rule=" << to_string(report.success_rule) << "\n";
  out << "replicates.total=" << report.n_replicates << "\n";
  out << "replicates.failed=" << report.n_failed << "\n";
  out << "replicates.incomplete=" << report.n_incomplete << "\n";
  out << "final_n=" << report.final_n() << "\n";
  out << "validation_accuracy=" << format_real(report.validation_accuracy) << "\n";
  out << "mean_rejections=" << format_real(report.mean_rejections) << "\n";
  if (report.imbalance.n_tested > 0) {
    out << "imbalance.tested=" << report.imbalance.n_tested << "\n";
    out << "imbalance.significant=" << report.imbalance.n_significant << "\n";
    out << "imbalance.median_smallest_arm=" << format_real(report.imbalance.median_smallest_arm) << "\n";
    out << "imbalance.median_largest_arm=" << format_real(report.imbalance.median_largest_arm) << "\n";
  }
  for (const auto& [n, m] : report.per_n) {
    const std::string p = "n." + std::to_string(n) + ".";
    out << p << "replicates=" << m.replicates << "\n";
    out << p << "power=" << format_real(m.power) << "\n";
    out << p << "mean_rejections=" << format_real(m.mean_rejections) << "\n";
    out << p << "mse=" << format_real(m.mse) << "\n";
    out << p << "type1_rate=" << format_real(m.type1_rate) << "\n";
  }
  return out.str();
}

void emit_report(const SimulationReport& report, const fs::path& dir, const std::vector<fs::path>& input_files) {
  if (report.n_replicates == 0 || report.replicates.empty())
    throw ConfigError("refusing to emit a report with no replicates");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());

  const auto arms = arm_count(report);
  const auto weights = weight_count(report);

  std::ostringstream snaps;
  snaps << "replicate,n,rejected,success,mse";
  for (std::size_t k = 0; k < arms; ++k) {
    snaps << ",arm" << k << "_chi2,arm" << k << "_dof,arm" << k << "_p,arm" << k << "_reject";
    for (std::size_t j = 0; j < weights; ++j)
      snaps << ",arm" << k << "_w" << j + 1 << "_z,arm" << k << "_w" << j + 1 << "_p,arm" << k << "_w" << j + 1
            << "_reject";
  }
  snaps << "\n";
  for (const auto& r : report.replicates) {
    for (const auto& s : r.snapshots) {
      snaps << r.index << "," << s.n << "," << s.rejected << "," << (s.success ? 1 : 0) << "," << format_real(s.mse);
      for (const auto& a : s.arms) {
        snaps << "," << format_real(a.joint.statistic) << "," << a.joint.dof << "," << format_real(a.joint.p_value)
              << "," << (a.joint.reject ? 1 : 0);
        for (const auto& w : a.per_parameter)
          snaps << "," << format_real(w.statistic) << "," << format_real(w.p_value) << "," << (w.reject ? 1 : 0);
      }
      snaps << "\n";
    }
  }

  std::map<std::size_t, const BalanceTest*> balance;
  for (const auto& row : report.imbalance.rows) balance[row.replicate] = &row.test;
  std::ostringstream reps;
  reps << "replicate,failed,completed,candidates,rejected,validation_accuracy,convergence_warnings";
  for (std::size_t k = 0; k < arms; ++k) reps << ",arm" << k << "_count";
  reps << ",balance_chi2,balance_p,balance_significant,error\n";
  for (const auto& r : report.replicates) {
    reps << r.index << "," << (r.failed ? 1 : 0) << "," << (r.completed ? 1 : 0) << "," << r.candidates_drawn << ","
         << r.rejected << "," << format_real(r.validation_accuracy) << "," << r.convergence_warnings;
    for (std::size_t k = 0; k < arms; ++k) reps << "," << (k < r.arm_counts.size() ? r.arm_counts[k] : 0);
    if (const auto it = balance.find(r.index); it != balance.end())
      reps << "," << format_real(it->second->statistic) << "," << format_real(it->second->p_value) << ","
           << (it->second->significant ? 1 : 0);
    else
      reps << ",,,";
    reps << "," << csv_safe(r.error) << "\n";
  }

  write_file(dir / "snapshots.csv", snaps.str());
  write_file(dir / "replicates.csv", reps.str());
  write_file(dir / "summary.txt", summary_text(report, input_hash(report.config_echo, input_files)));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_real(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad number in table: '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad count in table: '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError("missing header in " + path.string());
  header = split_csv(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(split_csv(line));
  return rows;
}

}  // namespace

std::vector<ReplicateSummary> load_replicate_tables(const fs::path& dir) {
  std::vector<std::string> header;
  std::vector<ReplicateSummary> reps;
  std::map<std::size_t, std::size_t> position;
  for (const auto& row : read_rows(dir / "replicates.csv", header)) {
    const std::size_t arms = header.size() - 11;
    ReplicateSummary r;
    r.index = to_count(row.at(0));
    r.failed = row.at(1) == "1";
    r.completed = row.at(2) == "1";
    r.candidates_drawn = to_count(row.at(3));
    r.rejected = to_count(row.at(4));
    r.validation_accuracy = to_real(row.at(5));
    r.convergence_warnings = to_count(row.at(6));
    for (std::size_t k = 0; k < arms && !r.failed; ++k) r.arm_counts.push_back(to_count(row.at(7 + k)));
    r.error = row.at(header.size() - 1);
    position[r.index] = reps.size();
    reps.push_back(std::move(r));
  }

  const auto rows = read_rows(dir / "snapshots.csv", header);
  std::size_t arms = 0;
  for (const auto& h : header)
    if (h.size() > 5 && h.compare(h.size() - 5, 5, "_chi2") == 0) ++arms;
  const std::size_t weights = arms ? (header.size() - 5 - 4 * arms) / (3 * arms) : 0;
  for (const auto& row : rows) {
    Snapshot s;
    const auto rep = to_count(row.at(0));
    s.n = to_count(row.at(1));
    s.rejected = to_count(row.at(2));
    s.success = row.at(3) == "1";
    s.mse = to_real(row.at(4));
    std::size_t col = 5;
    for (std::size_t k = 0; k < arms; ++k) {
      ArmTests a;
      a.joint.statistic = to_real(row.at(col++));
      a.joint.dof = static_cast<int>(to_count(row.at(col++)));
      a.joint.p_value = to_real(row.at(col++));
      a.joint.reject = row.at(col++) == "1";
      for (std::size_t j = 0; j < weights; ++j) {
        WaldOutcome w;
        w.statistic = to_real(row.at(col++));
        w.p_value = to_real(row.at(col++));
        w.reject = row.at(col++) == "1";
        a.per_parameter.push_back(w);
      }
      s.arms.push_back(std::move(a));
    }
    reps.at(position.at(rep)).snapshots.push_back(std::move(s));
  }
  return reps;
}

}  // namespace infoadapt
