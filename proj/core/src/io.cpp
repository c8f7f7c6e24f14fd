#include "wrisk/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "wrisk/errors.hpp"

namespace wrisk {
namespace {

using nlohmann::json;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
  return parsed;
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return flat;
}

Eigen::MatrixXd matrix_from_row_major(const std::vector<double>& flat, Eigen::Index rows,
                                      Eigen::Index cols, const std::string& field) {
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
    throw SpecValidationError(field + ": expected " + std::to_string(rows * cols) + " entries, got " +
                              std::to_string(flat.size()));
  Eigen::MatrixXd m(rows, cols);
  std::size_t u = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[u++];
  return m;
}

}  // namespace

void write_sample_csv(const std::filesystem::path& path, const EnvironmentSample& sample) {
  std::ofstream out = open_output(path);
  const Eigen::Index p = sample.x.cols();
  for (Eigen::Index c = 0; c < p; ++c) out << "x" << (c + 1) << ",";
  out << "y\n";
  for (Eigen::Index r = 0; r < sample.x.rows(); ++r) {
    for (Eigen::Index c = 0; c < p; ++c) out << format_full(sample.x(r, c)) << ",";
    out << format_full(sample.y[r]) << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

EnvironmentSample read_sample_csv(const std::filesystem::path& path, std::string env_id) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "': empty file");

  const auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::stringstream stream(text);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    return fields;
  };

  const std::vector<std::string> header = split(line);
  if (header.size() < 2 || header.back() != "y")
    throw IoError("'" + path.string() + "': expected header x1,...,xp,y");
  const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 1;

  std::vector<double> xs;
  std::vector<double> ys;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (static_cast<Eigen::Index>(fields.size()) != p + 1)
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                    std::to_string(p + 1) + " fields");
    try {
      for (Eigen::Index c = 0; c < p; ++c) xs.push_back(std::stod(fields[static_cast<std::size_t>(c)]));
      ys.push_back(std::stod(fields.back()));
    } catch (const std::exception&) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) + ": malformed number");
    }
  }
  if (ys.empty()) throw IoError("'" + path.string() + "': no observations");

  EnvironmentSample sample;
  sample.env_id = env_id.empty() ? path.stem().string() : std::move(env_id);
  const Eigen::Index n = static_cast<Eigen::Index>(ys.size());
  sample.x.resize(n, p);
  sample.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    sample.y[r] = ys[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < p; ++c)
      sample.x(r, c) = xs[static_cast<std::size_t>(r * p + c)];
  }
  return sample;
}

void write_moments_json(const std::filesystem::path& path, const EnvironmentMoments& moments) {
  json doc;
  doc["G"] = row_major(moments.gram);
  doc["Z"] = std::vector<double>(moments.cross.data(), moments.cross.data() + moments.cross.size());
  doc["g_Y"] = moments.target_second_moment;
  if (moments.sample_size)
    doc["n"] = *moments.sample_size;
  else
    doc["n"] = nullptr;
  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
}

EnvironmentMoments read_moments_json(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  try {
    const std::vector<double> z = doc.at("Z").get<std::vector<double>>();
    const Eigen::Index p = static_cast<Eigen::Index>(z.size());
    EnvironmentMoments m;
    m.gram = matrix_from_row_major(doc.at("G").get<std::vector<double>>(), p, p, "G");
    m.cross = Eigen::Map<const Eigen::VectorXd>(z.data(), p);
    m.target_second_moment = doc.at("g_Y").get<double>();
    if (doc.contains("n") && !doc.at("n").is_null())
      m.sample_size = doc.at("n").get<std::int64_t>();
    return m;
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

SemSpec read_sem_spec_json(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  SemSpec spec;
  try {
    spec.covariate_dim = doc.at("p").get<int>();
    spec.num_shifted = doc.at("k").get<int>();
    const int dim = spec.system_dim();

    for (const auto& flat : doc.at("B"))
      spec.transfer.push_back(matrix_from_row_major(flat.get<std::vector<double>>(), dim, dim, "B"));
    spec.probabilities = doc.at("probs").get<std::vector<double>>();
    spec.noise_cov =
        matrix_from_row_major(doc.at("noise_cov").get<std::vector<double>>(), dim, dim, "noise_cov");
    for (const auto& flat : doc.at("shift_covs"))
      spec.shift_covs.push_back(
          matrix_from_row_major(flat.get<std::vector<double>>(), dim, dim, "shift_covs"));
    if (doc.contains("shift_means"))
      for (const auto& entry : doc.at("shift_means")) {
        const std::vector<double> mean = entry.get<std::vector<double>>();
        spec.shift_means.push_back(
            Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())));
      }
    if (doc.contains("noise_family")) {
      const std::string family = doc.at("noise_family").get<std::string>();
      if (family == "gaussian")
        spec.noise_family = NoiseFamily::kGaussian;
      else if (family == "uniform")
        spec.noise_family = NoiseFamily::kSymmetricUniform;
      else
        throw SpecValidationError("noise_family: expected \"gaussian\" or \"uniform\"");
    }
    spec.seed = doc.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw SpecValidationError("'" + path.string() + "': " + e.what());
  }
  spec.validate();
  return spec;
}

void write_sem_spec_json(const std::filesystem::path& path, const SemSpec& spec) {
  json doc;
  doc["p"] = spec.covariate_dim;
  doc["k"] = spec.num_shifted;
  doc["B"] = json::array();
  for (const auto& b : spec.transfer) doc["B"].push_back(row_major(b));
  doc["probs"] = spec.probabilities;
  doc["noise_cov"] = row_major(spec.noise_cov);
  doc["shift_covs"] = json::array();
  for (const auto& cov : spec.shift_covs) doc["shift_covs"].push_back(row_major(cov));
  doc["noise_family"] = spec.noise_family == NoiseFamily::kGaussian ? "gaussian" : "uniform";
  doc["seed"] = spec.seed;
  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
}

std::string file_hash_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::uint64_t hash = 0xCBF29CE484222325ull;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize u = 0; u < in.gcount(); ++u) {
      hash ^= static_cast<unsigned char>(chunk[u]);
      hash *= 0x100000001B3ull;
    }
    if (!in) break;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace wrisk
