#include "nnqs/states.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nnqs {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

TargetState from_dense(const CVector& amplitudes, int n) {
  std::vector<std::pair<std::uint64_t, Complex>> entries;
  for (Eigen::Index j = 0; j < amplitudes.size(); ++j) {
    if (amplitudes[j] != Complex{0.0, 0.0}) {
      entries.emplace_back(static_cast<std::uint64_t>(j), amplitudes[j]);
    }
  }
  return build_target(entries, n, 0.0);
}

}  // namespace

NamedTarget bell(BellKind which) {
  switch (which) {
    case BellKind::PhiPlus:
      return {"bell:phi+", build_target({{0, kInvSqrt2}, {3, kInvSqrt2}}, 2, 0.0)};
    case BellKind::PhiMinus:
      // (1 x sigma_z) |Phi+>
      return {"bell:phi-", build_target({{0, kInvSqrt2}, {3, -kInvSqrt2}}, 2, 0.0)};
    case BellKind::PsiPlus:
      return {"bell:psi+", build_target({{1, kInvSqrt2}, {2, kInvSqrt2}}, 2, 0.0)};
    case BellKind::PsiMinus:
    default:
      return {"bell:psi-", build_target({{1, kInvSqrt2}, {2, -kInvSqrt2}}, 2, 0.0)};
  }
}

NamedTarget ghz(int n) {
  if (n < 2) {
    throw std::invalid_argument("ghz: n must be >= 2");
  }
  const double amp = kInvSqrt2;
  return {"ghz:" + std::to_string(n),
          build_target({{0, amp}, {(std::uint64_t{1} << n) - 1, amp}}, n, 0.0)};
}

NamedTarget w_state(int n) {
  if (n < 3) {
    throw std::invalid_argument("w_state: n must be >= 3");
  }
  std::vector<std::pair<std::uint64_t, Complex>> entries;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    entries.emplace_back(std::uint64_t{1} << k, amp);
  }
  return {"w:" + std::to_string(n), build_target(entries, n, 0.0)};
}

NamedTarget wbar_state(int n) {
  if (n < 3) {
    throw std::invalid_argument("wbar_state: n must be >= 3");
  }
  std::vector<std::pair<std::uint64_t, Complex>> entries;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (int k = 0; k < n; ++k) {
    entries.emplace_back(full ^ (std::uint64_t{1} << k), amp);
  }
  return {"wbar:" + std::to_string(n), build_target(entries, n, 0.0)};
}

NamedTarget plus_state() {
  return {"plus", build_target({{0, kInvSqrt2}, {1, kInvSqrt2}}, 1, 0.0)};
}

NamedTarget basis_state(const std::string& bits) {
  if (bits.empty()) {
    throw std::invalid_argument("basis_state: empty bit string");
  }
  std::uint64_t index = 0;
  for (char b : bits) {
    if (b != '0' && b != '1') {
      throw std::invalid_argument("basis_state: bits must be 0 or 1");
    }
    index = (index << 1) | (b == '1' ? 1u : 0u);
  }
  return {"basis:" + bits, build_target({{index, 1.0}}, static_cast<int>(bits.size()), 0.0)};
}

NamedTarget tensor(const std::vector<NamedTarget>& factors, const PartitionSpec& assignment) {
  if (factors.size() != static_cast<size_t>(assignment.num_blocks())) {
    throw std::invalid_argument("tensor: factor count does not match block count");
  }
  const int n = assignment.n();
  for (int m = 0; m < assignment.num_blocks(); ++m) {
    if (factors[m].state.n_visible != static_cast<int>(assignment.blocks()[m].size())) {
      throw std::invalid_argument("tensor: factor size does not match block size");
    }
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  CVector amplitudes(static_cast<Eigen::Index>(dim));
  for (std::uint64_t index = 0; index < dim; ++index) {
    Complex amp = 1.0;
    for (int m = 0; m < assignment.num_blocks(); ++m) {
      const auto& block = assignment.blocks()[m];
      std::uint64_t sub = 0;
      for (int q : block) {
        sub = (sub << 1) | ((index >> (n - 1 - q)) & 1u);
      }
      amp *= factors[m].state.amplitudes[static_cast<Eigen::Index>(sub)];
    }
    amplitudes[static_cast<Eigen::Index>(index)] = amp;
  }
  std::ostringstream name;
  for (int m = 0; m < assignment.num_blocks(); ++m) {
    if (m > 0) {
      name << " * ";
    }
    name << factors[m].name << '@';
    const auto& block = assignment.blocks()[m];
    for (size_t i = 0; i < block.size(); ++i) {
      name << (i ? "," : "") << block[i] + 1;
    }
  }
  return {name.str(), from_dense(amplitudes, n)};
}

NamedTarget variable_bell(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("variable_bell: p must be in [0, 1]");
  }
  std::ostringstream name;
  name << "variable_bell:" << p;
  return {name.str(), build_target({{0, std::sqrt(p)}, {3, std::sqrt(1.0 - p)}}, 2, 0.0)};
}

NamedTarget variable_w(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("variable_w: p must be in [0, 1]");
  }
  const NamedTarget w = w_state(3);
  const NamedTarget wbar = wbar_state(3);
  // p|W> + sqrt(1-p)|Wbar> is not normalized for p in (0,1); build_target
  // restores the ray, which is all fidelity sees.
  const CVector amplitudes =
      p * w.state.amplitudes + std::sqrt(1.0 - p) * wbar.state.amplitudes;
  std::ostringstream name;
  name << "variable_w:" << p;
  return {name.str(), from_dense(amplitudes, 3)};
}

NamedTarget cluster_1d(int n) {
  if (n < 2) {
    throw std::invalid_argument("cluster_1d: n must be >= 2");
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  const double amp = std::pow(2.0, -0.5 * n);
  CVector amplitudes(static_cast<Eigen::Index>(dim));
  for (std::uint64_t index = 0; index < dim; ++index) {
    int adjacent_pairs = 0;
    for (int i = 0; i + 1 < n; ++i) {
      const int bi = (index >> (n - 1 - i)) & 1u;
      const int bj = (index >> (n - 2 - i)) & 1u;
      adjacent_pairs += bi & bj;
    }
    amplitudes[static_cast<Eigen::Index>(index)] = (adjacent_pairs % 2 == 0) ? amp : -amp;
  }
  return {"cluster_1d:" + std::to_string(n), from_dense(amplitudes, n)};
}

NamedTarget random_biseparable(const std::vector<int>& block_sizes, std::uint64_t seed) {
  if (block_sizes.empty()) {
    throw std::invalid_argument("random_biseparable: need at least one block");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<NamedTarget> factors;
  std::vector<std::vector<int>> blocks;
  int next_qubit = 0;
  std::ostringstream name;
  name << "random_biseparable:";
  for (size_t m = 0; m < block_sizes.size(); ++m) {
    const int size = block_sizes[m];
    if (size < 1) {
      throw std::invalid_argument("random_biseparable: block sizes must be >= 1");
    }
    CVector amps(Eigen::Index{1} << size);
    for (Eigen::Index j = 0; j < amps.size(); ++j) {
      amps[j] = Complex{gauss(rng), gauss(rng)};
    }
    factors.push_back({"block", from_dense(amps, size)});
    std::vector<int> block(size);
    for (int q = 0; q < size; ++q) {
      block[q] = next_qubit + q;
    }
    next_qubit += size;
    blocks.push_back(std::move(block));
    name << (m ? "," : "") << size;
  }
  name << ':' << seed;
  NamedTarget product = tensor(factors, PartitionSpec(next_qubit, std::move(blocks)));
  return {name.str(), std::move(product.state)};
}

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_target: bad " + what + " '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_target: bad " + what + " '" + text + "'");
  }
}

NamedTarget parse_atom(const std::string& atom) {
  const auto parts = split(atom, ':');
  const std::string& name = parts[0];
  auto arg = [&](size_t i) -> const std::string& {
    if (i >= parts.size()) {
      throw std::invalid_argument("parse_target: '" + name + "' needs more arguments");
    }
    return parts[i];
  };
  if (name == "bell") {
    const std::string& which = arg(1);
    if (which == "phi+") return bell(BellKind::PhiPlus);
    if (which == "phi-") return bell(BellKind::PhiMinus);
    if (which == "psi+") return bell(BellKind::PsiPlus);
    if (which == "psi-") return bell(BellKind::PsiMinus);
    throw std::invalid_argument("parse_target: unknown Bell state '" + which + "'");
  }
  if (name == "phi+" || name == "phi-" || name == "psi+" || name == "psi-") {
    return parse_atom("bell:" + name);
  }
  if (name == "ghz") return ghz(parse_int(arg(1), "qubit count"));
  if (name == "w") return w_state(parse_int(arg(1), "qubit count"));
  if (name == "wbar") return wbar_state(parse_int(arg(1), "qubit count"));
  if (name == "plus") return plus_state();
  if (name == "basis") return basis_state(arg(1));
  if (name == "variable_bell") return variable_bell(parse_real(arg(1), "p"));
  if (name == "variable_w") return variable_w(parse_real(arg(1), "p"));
  if (name == "cluster_1d") return cluster_1d(parse_int(arg(1), "qubit count"));
  if (name == "random_biseparable") {
    std::vector<int> sizes;
    for (const auto& tok : split(arg(1), ',')) {
      sizes.push_back(parse_int(tok, "block size"));
    }
    const std::uint64_t seed = parts.size() > 2
                                   ? static_cast<std::uint64_t>(parse_int(parts[2], "seed"))
                                   : 1234;
    return random_biseparable(sizes, seed);
  }
  if (name == "file") {
    std::ifstream in(arg(1));
    if (!in) {
      throw std::invalid_argument("parse_target: cannot open '" + arg(1) + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return {"file:" + arg(1), target_from_json(buffer.str())};
  }
  throw std::invalid_argument("parse_target: unknown state '" + name + "'");
}

}  // namespace

NamedTarget parse_target(const std::string& descriptor) {
  const auto factor_texts = split(descriptor, '*');
  if (factor_texts.empty()) {
    throw std::invalid_argument("parse_target: empty descriptor");
  }
  if (factor_texts.size() == 1 && factor_texts[0].find('@') == std::string::npos) {
    NamedTarget t = parse_atom(trim(factor_texts[0]));
    return t;
  }
  std::vector<NamedTarget> factors;
  std::vector<std::vector<int>> blocks;
  int n_total = 0;
  for (const auto& raw : factor_texts) {
    const std::string text = trim(raw);
    const auto at = text.find('@');
    if (at == std::string::npos) {
      throw std::invalid_argument("parse_target: every product factor needs '@qubits': '" +
                                  text + "'");
    }
    factors.push_back(parse_atom(trim(text.substr(0, at))));
    std::vector<int> block;
    for (const auto& tok : split(text.substr(at + 1), ',')) {
      block.push_back(parse_int(trim(tok), "qubit index") - 1);
    }
    for (int q : block) {
      n_total = std::max(n_total, q + 1);
    }
    blocks.push_back(std::move(block));
  }
  // PartitionSpec canonicalizes block order; factors must follow it.
  std::vector<size_t> order(blocks.size());
  for (size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return *std::min_element(blocks[a].begin(), blocks[a].end()) <
           *std::min_element(blocks[b].begin(), blocks[b].end());
  });
  std::vector<NamedTarget> sorted_factors;
  std::vector<std::vector<int>> sorted_blocks;
  for (size_t i : order) {
    sorted_factors.push_back(std::move(factors[i]));
    sorted_blocks.push_back(std::move(blocks[i]));
  }
  NamedTarget product = tensor(sorted_factors, PartitionSpec(n_total, std::move(sorted_blocks)));
  product.name = descriptor;
  return product;
}

}  // namespace nnqs
