#ifndef SPARSEDYN_IO_HPP
#define SPARSEDYN_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsedyn/prior.hpp"
#include "sparsedyn/record.hpp"
#include "sparsedyn/tempering.hpp"
#include "sparsedyn/topology.hpp"

namespace sparsedyn {

/// CSV round-trips at 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_topology_csv(const std::filesystem::path& path, const Topology& S);
Topology read_topology_csv(const std::filesystem::path& path);

/// Packed topology samples: 16-byte header (magic "SDTB", u32 n_rows,
/// n_cols, count) followed by row-major LSB-first bitmaps.
void write_topology_bitmaps(const std::filesystem::path& path,
                            const std::vector<Eigen::MatrixXi>& samples);
std::vector<Eigen::MatrixXi> read_topology_bitmaps(
    const std::filesystem::path& path);

/// Chain records as JSONL: iteration, log score, |S|_0, hyperparameters.
void write_chain_jsonl(const std::filesystem::path& path,
                       const ChainRecord& record);

nlohmann::json run_summary(const ChainRecord& record);

/// 64-bit FNV-1a content hash, hex-encoded (manifest provenance).
std::string content_hash(const std::string& text);

void write_manifest(const std::filesystem::path& path,
                    const nlohmann::json& config, std::uint64_t seed,
                    const std::string& version);

// config deserialization
PriorConfig prior_from_json(const nlohmann::json& j);
Schedule schedule_from_json(const nlohmann::json& j);
Ladder ladder_from_json(const nlohmann::json& j);
DynOptions dyn_options_from_json(const nlohmann::json& j);

}  // namespace sparsedyn

#endif
