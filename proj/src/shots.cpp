#include "qshap/shots.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "qshap/errors.hpp"
#include "qshap/rng.hpp"

namespace qshap {

std::string bitstring(std::uint64_t index, int qubits) {
  std::string s(qubits, '0');
  for (int j = 0; j < qubits; ++j)
    if ((index >> j) & 1) s[j] = '1';
  return s;
}

std::uint64_t parse_bitstring(const std::string& bits) {
  std::uint64_t index = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1')
      index |= std::uint64_t{1} << j;
    else if (bits[j] != '0')
      throw ConfigError("bit string '" + bits + "' contains a character other than 0/1");
  }
  return index;
}

ShotRecord sample(const Eigen::VectorXd& dist, int qubits, std::uint64_t shots,
                  std::uint64_t seed) {
  if (shots == 0) throw ConfigError("sample: shot count must be >= 1");
  if (dist.size() != (std::int64_t{1} << qubits))
    throw ConfigError("sample: distribution size does not match qubit count");
  std::vector<double> cdf(dist.size());
  double acc = 0.0;
  for (std::int64_t i = 0; i < dist.size(); ++i) {
    acc += std::max(0.0, dist[i]);
    cdf[i] = acc;
  }
  if (acc <= 0.0) throw NumericError("sample: distribution has no mass");
  SplitMix64 rng(seed);
  ShotRecord record;
  record.qubits = qubits;
  record.shots = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::uint64_t idx = static_cast<std::uint64_t>(
        std::min<std::ptrdiff_t>(it - cdf.begin(), dist.size() - 1));
    ++record.counts[idx];
  }
  return record;
}

Eigen::VectorXd distribution(const ShotRecord& record) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(std::int64_t{1} << record.qubits);
  for (const auto& [idx, count] : record.counts)
    d[static_cast<std::int64_t>(idx)] =
        static_cast<double>(count) / static_cast<double>(record.shots);
  return d;
}

NoiseModel NoiseModel::uniform(int qubits, double p01, double p10) {
  NoiseModel n;
  n.flip.assign(qubits, {p01, p10});
  n.validate();
  return n;
}

void NoiseModel::validate() const {
  for (std::size_t q = 0; q < flip.size(); ++q)
    for (double p : flip[q])
      if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("noise model: qubit " + std::to_string(q) +
                          " flip probability outside [0, 1]");
}

NoiseModel noise_from_json(const nlohmann::json& j) {
  NoiseModel n;
  if (j.contains("flip")) {
    for (const auto& pair : j.at("flip")) {
      if (!pair.is_array() || pair.size() != 2)
        throw ConfigError("noise model: each 'flip' entry must be [p01, p10]");
      n.flip.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
  } else if (j.contains("qubits")) {
    int q = j.at("qubits").get<int>();
    double p01 = j.value("p01", 0.0);
    double p10 = j.value("p10", 0.0);
    n.flip.assign(q, {p01, p10});
  } else {
    throw ConfigError("noise model: expected 'flip' list or 'qubits' with p01/p10");
  }
  n.seed = j.value("seed", std::uint64_t{0});
  n.validate();
  return n;
}

nlohmann::json noise_to_json(const NoiseModel& noise) {
  nlohmann::json flips = nlohmann::json::array();
  for (const auto& f : noise.flip) flips.push_back({f[0], f[1]});
  return {{"flip", flips}, {"seed", noise.seed}};
}

ShotRecord apply_noise(const ShotRecord& record, const NoiseModel& noise, std::uint64_t seed) {
  if (noise.qubits() != record.qubits)
    throw ConfigError("apply_noise: noise model qubit count mismatch");
  SplitMix64 rng(seed);
  ShotRecord out;
  out.qubits = record.qubits;
  out.shots = record.shots;
  for (const auto& [idx, count] : record.counts) {
    for (std::uint64_t s = 0; s < count; ++s) {
      std::uint64_t flipped = idx;
      for (int q = 0; q < record.qubits; ++q) {
        bool one = (idx >> q) & 1;
        double p = one ? noise.flip[q][1] : noise.flip[q][0];
        if (p > 0.0 && rng.uniform() < p) flipped ^= std::uint64_t{1} << q;
      }
      ++out.counts[flipped];
    }
  }
  return out;
}

CalibrationMatrix calibrate(const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw ConfigError("calibrate: shot count must be >= 1");
  const int q = noise.qubits();
  ShotRecord zeros{q, shots, {{0, shots}}};
  ShotRecord ones{q, shots, {{(std::uint64_t{1} << q) - 1, shots}}};
  ShotRecord noisy0 = apply_noise(zeros, noise, derive_seed(seed, "calibrate-0"));
  ShotRecord noisy1 = apply_noise(ones, noise, derive_seed(seed, "calibrate-1"));
  CalibrationMatrix cal;
  cal.per_qubit.resize(q);
  for (int w = 0; w < q; ++w) {
    std::uint64_t ones_from0 = 0, zeros_from1 = 0;
    for (const auto& [idx, count] : noisy0.counts)
      if ((idx >> w) & 1) ones_from0 += count;
    for (const auto& [idx, count] : noisy1.counts)
      if (!((idx >> w) & 1)) zeros_from1 += count;
    double p01 = static_cast<double>(ones_from0) / static_cast<double>(shots);
    double p10 = static_cast<double>(zeros_from1) / static_cast<double>(shots);
    cal.per_qubit[w] << 1.0 - p01, p10, p01, 1.0 - p10;
  }
  return cal;
}

CalibrationMatrix exact_calibration(const NoiseModel& noise) {
  CalibrationMatrix cal;
  cal.per_qubit.resize(noise.qubits());
  for (int w = 0; w < noise.qubits(); ++w) {
    double p01 = noise.flip[w][0], p10 = noise.flip[w][1];
    cal.per_qubit[w] << 1.0 - p01, p10, p01, 1.0 - p10;
  }
  return cal;
}

Eigen::VectorXd mitigate(const ShotRecord& record, const CalibrationMatrix& calibration) {
  if (static_cast<int>(calibration.per_qubit.size()) != record.qubits)
    throw ConfigError("mitigate: calibration qubit count mismatch");
  Eigen::VectorXd quasi = distribution(record);
  const std::int64_t dim = quasi.size();
  for (int w = 0; w < record.qubits; ++w) {
    const Eigen::Matrix2d& m = calibration.per_qubit[w];
    double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (std::abs(det) < 1e-9)
      throw NumericError("mitigate: singular calibration matrix for qubit " + std::to_string(w));
    Eigen::Matrix2d inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    inv /= det;
    const std::int64_t bit = std::int64_t{1} << w;
    for (std::int64_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      double y0 = quasi[i], y1 = quasi[i | bit];
      quasi[i] = inv(0, 0) * y0 + inv(0, 1) * y1;
      quasi[i | bit] = inv(1, 0) * y0 + inv(1, 1) * y1;
    }
  }
  quasi = quasi.cwiseMax(0.0);
  double total = quasi.sum();
  if (total <= 0.0) throw NumericError("mitigate: clipped distribution has no mass");
  return quasi / total;
}

double hellinger_fidelity(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw ConfigError("hellinger_fidelity: size mismatch");
  double bc = 0.0;
  for (std::int64_t i = 0; i < p.size(); ++i)
    bc += std::sqrt(std::max(0.0, p[i]) * std::max(0.0, q[i]));
  return std::clamp(bc * bc, 0.0, 1.0);
}

void write_counts_csv(std::ostream& out, const ShotRecord& record) {
  out << "bitstring,count\n";
  for (const auto& [idx, count] : record.counts)
    out << bitstring(idx, record.qubits) << ',' << count << '\n';
}

ShotRecord read_counts_csv(std::istream& in) {
  ShotRecord record;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || lineno == 1) continue;  // header
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("counts csv: line " + std::to_string(lineno) + ": missing comma");
    std::string bits = line.substr(0, comma);
    std::uint64_t count = std::stoull(line.substr(comma + 1));
    record.qubits = std::max(record.qubits, static_cast<int>(bits.size()));
    record.counts[parse_bitstring(bits)] += count;
    record.shots += count;
  }
  return record;
}

void write_distribution_csv(std::ostream& out, const Eigen::VectorXd& dist, int qubits) {
  out << "bitstring,probability\n";
  char buf[64];
  for (std::int64_t i = 0; i < dist.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", dist[i]);
    out << bitstring(static_cast<std::uint64_t>(i), qubits) << ',' << buf << '\n';
  }
}

}  // namespace qshap
