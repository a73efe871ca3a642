#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "infoadapt/trial_engine.hpp"

namespace infoadapt {

/// Numbers in every emitted file use this form (17 significant digits).
std::string format_real(double v);

/// Git blob hash (hex SHA-1 of "blob <size>\0" + content).
std::string git_blob_sha1(const std::string& content);

/// Hash over the config echo and the bytes of each input file, in order.
std::string input_hash(const std::vector<std::pair<std::string, std::string>>& config_echo,
                       const std::vector<std::filesystem::path>& input_files);

/// Writes summary.txt (ordered key=value), snapshots.csv (one row per
/// replicate and recruit count) and replicates.csv (one row per replicate)
/// into `dir`, creating it if needed. Throws ConfigError for an empty report
/// and InputError when the directory cannot be written.
void emit_report(const SimulationReport& report, const std::filesystem::path& dir,
                 const std::vector<std::filesystem::path>& input_files = {});

/// Summary text alone, as written to summary.txt.
std::string summary_text(const SimulationReport& report, const std::string& hash);

/// Reads snapshots.csv and replicates.csv back into replicate summaries.
/// Imbalance rows are not stored per replicate and are recomputed by
/// aggregate_replicates.
std::vector<ReplicateSummary> load_replicate_tables(const std::filesystem::path& dir);

}  // namespace infoadapt
