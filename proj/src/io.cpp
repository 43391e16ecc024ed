#include "sparsedyn/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparsedyn {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& matrix) {
  auto out = open_out(path);
  char buffer[64];
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", matrix(i, j));
      out << (j ? "," : "") << buffer;
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV: " + path.string());
  Eigen::MatrixXd matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) matrix(i, j) = rows[i][j];
  return matrix;
}

void write_topology_csv(const std::filesystem::path& path, const Topology& S) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      out << (j ? "," : "") << S(i, j);
    out << "\n";
  }
}

Topology read_topology_csv(const std::filesystem::path& path) {
  const Eigen::MatrixXd raw = read_matrix_csv(path);
  Eigen::MatrixXi entries(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    for (Eigen::Index j = 0; j < raw.cols(); ++j)
      entries(i, j) = raw(i, j) != 0.0 ? 1 : 0;
  return Topology(entries);
}

namespace {
constexpr char kBitmapMagic[4] = {'S', 'D', 'T', 'B'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return std::uint32_t(bytes[0]) | std::uint32_t(bytes[1]) << 8 |
         std::uint32_t(bytes[2]) << 16 | std::uint32_t(bytes[3]) << 24;
}
}  // namespace

void write_topology_bitmaps(const std::filesystem::path& path,
                            const std::vector<Eigen::MatrixXi>& samples) {
  auto out = open_out(path, true);
  const std::uint32_t rows = samples.empty() ? 0 : samples[0].rows();
  const std::uint32_t cols = samples.empty() ? 0 : samples[0].cols();
  out.write(kBitmapMagic, 4);
  put_u32(out, rows);
  put_u32(out, cols);
  put_u32(out, static_cast<std::uint32_t>(samples.size()));
  const std::size_t bytes_per = (std::size_t(rows) * cols + 7) / 8;
  std::vector<unsigned char> buffer(bytes_per);
  for (const auto& S : samples) {
    std::fill(buffer.begin(), buffer.end(), 0);
    for (std::uint32_t i = 0; i < rows; ++i)
      for (std::uint32_t j = 0; j < cols; ++j)
        if (S(i, j)) {
          const std::size_t bit = std::size_t(i) * cols + j;
          buffer[bit / 8] |= static_cast<unsigned char>(1u << (bit % 8));
        }
    out.write(reinterpret_cast<const char*>(buffer.data()), bytes_per);
  }
}

std::vector<Eigen::MatrixXi> read_topology_bitmaps(
    const std::filesystem::path& path) {
  auto in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kBitmapMagic, 4) != 0)
    throw std::runtime_error("bad topology bitmap header: " + path.string());
  const std::uint32_t rows = get_u32(in), cols = get_u32(in), count = get_u32(in);
  const std::size_t bytes_per = (std::size_t(rows) * cols + 7) / 8;
  std::vector<unsigned char> buffer(bytes_per);
  std::vector<Eigen::MatrixXi> samples;
  samples.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    in.read(reinterpret_cast<char*>(buffer.data()), bytes_per);
    if (!in) throw std::runtime_error("truncated topology bitmap: " + path.string());
    Eigen::MatrixXi S(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
      for (std::uint32_t j = 0; j < cols; ++j) {
        const std::size_t bit = std::size_t(i) * cols + j;
        S(i, j) = (buffer[bit / 8] >> (bit % 8)) & 1;
      }
    samples.push_back(std::move(S));
  }
  return samples;
}

void write_chain_jsonl(const std::filesystem::path& path,
                       const ChainRecord& record) {
  auto out = open_out(path);
  for (const auto& sample : record.samples) {
    nlohmann::json j;
    j["iteration"] = sample.iteration;
    j["log_score"] = sample.log_score;
    j["nnz"] = sample.S.sum();
    j["beta"] = sample.beta;
    if (sample.q.size()) {
      j["q"] = std::vector<double>(sample.q.begin(), sample.q.end());
      j["r"] = std::vector<double>(sample.r.begin(), sample.r.end());
      j["m"] = std::vector<double>(sample.m.begin(), sample.m.end());
    }
    out << j.dump() << "\n";
  }
}

nlohmann::json run_summary(const ChainRecord& record) {
  nlohmann::json j;
  j["retained_samples"] = record.n_retained;
  j["structure_accept_rate"] = record.structure_accept_rate();
  j["trajectory_accept_rate"] = record.trajectory_accept_rate();
  if (record.hyper_proposed)
    j["hyper_accept_rate"] =
        double(record.hyper_accepted) / double(record.hyper_proposed);
  if (!record.swap_attempted.empty()) {
    std::vector<double> rates;
    for (std::size_t k = 0; k < record.swap_attempted.size(); ++k)
      rates.push_back(record.swap_attempted[k]
                          ? double(record.swap_accepted[k]) /
                                double(record.swap_attempted[k])
                          : 0.0);
    j["swap_accept_rates"] = rates;
  }
  return j;
}

std::string content_hash(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

void write_manifest(const std::filesystem::path& path,
                    const nlohmann::json& config, std::uint64_t seed,
                    const std::string& version) {
  nlohmann::json manifest;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["version"] = version;
  manifest["config_hash"] = content_hash(config.dump());
  auto out = open_out(path);
  out << manifest.dump(2) << "\n";
}

PriorConfig prior_from_json(const nlohmann::json& j) {
  PriorConfig cfg;
  cfg.rho = j.value("rho", 0.01);
  const std::string kind = j.value("proposal", "flip");
  if (kind == "flip") {
    cfg.proposal_kind = ProposalKind::Flip;
  } else if (kind == "add-remove") {
    cfg.proposal_kind = ProposalKind::AddRemove;
    cfg.p_add = j.value("p_add", 0.4);
    cfg.p_remove = j.value("p_remove", 0.4);
  } else {
    throw std::invalid_argument("unknown proposal kind: " + kind);
  }
  cfg.validate();
  return cfg;
}

Schedule schedule_from_json(const nlohmann::json& j) {
  Schedule schedule;
  schedule.n_samples = j.value("n_samples", schedule.n_samples);
  schedule.burn_in = j.value("burn_in", schedule.burn_in);
  schedule.thin = j.value("thin", schedule.thin);
  if (schedule.n_samples < 1 || schedule.burn_in < 0 || schedule.thin < 1)
    throw std::invalid_argument("invalid schedule values");
  return schedule;
}

Ladder ladder_from_json(const nlohmann::json& j) {
  Ladder ladder;
  if (j.contains("betas")) {
    ladder.betas = j["betas"].get<std::vector<double>>();
  } else {
    ladder = Ladder::geometric(j.value("count", 16), j.value("ratio", 1.05));
  }
  ladder.swap_period = j.value("swap_period", 10);
  ladder.validate();
  return ladder;
}

DynOptions dyn_options_from_json(const nlohmann::json& j) {
  DynOptions opts;
  opts.gibbs = j.value("gibbs", opts.gibbs);
  opts.sample_hyper = j.value("sample_hyper", opts.sample_hyper);
  opts.output_dynamics = j.value("output_dynamics", opts.output_dynamics);
  opts.exclusive_regulators =
      j.value("exclusive_regulators", opts.exclusive_regulators);
  opts.eps_anchor = j.value("eps_anchor", opts.eps_anchor);
  opts.eps_traj = j.value("eps_traj", opts.eps_traj);
  opts.adapt_eps = j.value("adapt_eps", opts.adapt_eps);
  opts.beta_structure = j.value("beta_structure", opts.beta_structure);
  opts.rw_frac = j.value("rw_frac", opts.rw_frac);
  opts.q_init = j.value("q_init", opts.q_init);
  opts.r_init = j.value("r_init", opts.r_init);
  opts.m_init = j.value("m_init", opts.m_init);
  opts.pole_prior_scale = j.value("pole_prior_scale", opts.pole_prior_scale);
  return opts;
}

}  // namespace sparsedyn
