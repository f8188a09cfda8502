#include "nnqs/target.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace nnqs {

TargetState build_target(const std::vector<std::pair<std::uint64_t, Complex>>& amplitude_map,
                         int n, double sigma2) {
  if (n < 1 || n > kEnumerationCap) {
    throw std::invalid_argument("build_target: n out of range");
  }
  if (sigma2 < 0.0) {
    throw std::invalid_argument("build_target: sigma2 must be >= 0");
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  TargetState target;
  target.n_visible = n;
  target.sigma2 = sigma2;
  target.entries = amplitude_map;
  target.amplitudes = CVector::Zero(static_cast<Eigen::Index>(dim));

  bool any_nonzero = false;
  for (const auto& [index, amp] : amplitude_map) {
    if (index >= dim) {
      throw std::invalid_argument("build_target: basis index out of range");
    }
    if (amp != Complex{0.0, 0.0}) {
      any_nonzero = true;
    }
  }
  if (!any_nonzero) {
    throw std::invalid_argument("build_target: all declared amplitudes are zero");
  }

  if (sigma2 == 0.0) {
    for (const auto& [index, amp] : amplitude_map) {
      target.amplitudes[static_cast<Eigen::Index>(index)] += amp;
    }
  } else {
    for (std::uint64_t j = 0; j < dim; ++j) {
      Complex sum = 0.0;
      for (const auto& [index, amp] : amplitude_map) {
        const double d = static_cast<double>(index) - static_cast<double>(j);
        sum += amp * std::exp(-d * d / sigma2);
      }
      target.amplitudes[static_cast<Eigen::Index>(j)] = sum;
    }
  }

  const double norm = target.amplitudes.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("build_target: amplitudes cancel to zero");
  }
  target.amplitudes /= norm;
  return target;
}

std::string target_to_json(const TargetState& target) {
  nlohmann::json doc;
  doc["n"] = target.n_visible;
  doc["sigma2"] = target.sigma2;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [index, amp] : target.entries) {
    entries.push_back({index, amp.real(), amp.imag()});
  }
  doc["entries"] = entries;
  return doc.dump();
}

TargetState target_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("target_from_json: ") + e.what());
  }
  if (!doc.contains("n") || !doc.contains("entries")) {
    throw std::invalid_argument("target_from_json: missing 'n' or 'entries'");
  }
  const int n = doc["n"].get<int>();
  const double sigma2 = doc.value("sigma2", 0.0);
  std::vector<std::pair<std::uint64_t, Complex>> entries;
  for (const auto& row : doc["entries"]) {
    if (!row.is_array() || row.size() != 3) {
      throw std::invalid_argument("target_from_json: entries must be [index, re, im]");
    }
    entries.emplace_back(row[0].get<std::uint64_t>(),
                         Complex{row[1].get<double>(), row[2].get<double>()});
  }
  return build_target(entries, n, sigma2);
}

}  // namespace nnqs
