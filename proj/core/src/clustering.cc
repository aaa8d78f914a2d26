#include "portdecomp/clustering.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"
#include "portdecomp/random.h"

namespace portdecomp {
namespace {

using Group = std::vector<int>;

std::vector<int> CompactLabels(const std::vector<int>& raw) {
  std::map<int, int> remap;
  std::vector<int> labels(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = remap.emplace(raw[i], static_cast<int>(remap.size()));
    labels[i] = it->second;
  }
  return labels;
}

std::vector<int> LabelsFromGroups(const std::vector<Group>& groups, int n) {
  std::vector<int> raw(n, -1);
  for (size_t g = 0; g < groups.size(); ++g) {
    for (int i : groups[g]) raw[i] = static_cast<int>(g);
  }
  return CompactLabels(raw);
}

Group Select(const Group& group, const std::vector<int>& positions) {
  Group out;
  out.reserve(positions.size());
  for (int p : positions) out.push_back(group[p]);
  return out;
}

class WorkList {
 public:
  WorkList(PopStrategy strategy, std::uint64_t seed)
      : strategy_(strategy), rng_(MakeRng(DeriveSeed(seed, "cluster.pop"))) {}

  void Push(Group g) { items_.push_back(std::move(g)); }
  bool empty() const { return items_.empty(); }

  Group Pop() {
    size_t pick = 0;
    switch (strategy_) {
      case PopStrategy::kFifo:
        break;
      case PopStrategy::kLargest:
        for (size_t i = 1; i < items_.size(); ++i) {
          if (items_[i].size() > items_[pick].size()) pick = i;
        }
        break;
      case PopStrategy::kUniform: {
        std::uniform_int_distribution<size_t> dist(0, items_.size() - 1);
        pick = dist(rng_);
        break;
      }
      case PopStrategy::kSizeProportional: {
        std::vector<double> weights;
        for (const Group& g : items_) weights.push_back(static_cast<double>(g.size()));
        std::discrete_distribution<size_t> dist(weights.begin(), weights.end());
        pick = dist(rng_);
        break;
      }
    }
    Group g = std::move(items_[pick]);
    items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(pick));
    return g;
  }

 private:
  PopStrategy strategy_;
  Rng rng_;
  std::deque<Group> items_;
};

Eigen::VectorXd LeadingVector(const Eigen::MatrixXd& m) {
  return SymEig(m).vectors.col(0);
}

}  // namespace

PopStrategy ParsePopStrategy(const std::string& name) {
  if (name == "fifo") return PopStrategy::kFifo;
  if (name == "uniform") return PopStrategy::kUniform;
  if (name == "size_proportional") return PopStrategy::kSizeProportional;
  if (name == "largest") return PopStrategy::kLargest;
  throw std::invalid_argument("unknown pop strategy: " + name);
}

std::string ToString(PopStrategy strategy) {
  switch (strategy) {
    case PopStrategy::kFifo: return "fifo";
    case PopStrategy::kUniform: return "uniform";
    case PopStrategy::kSizeProportional: return "size_proportional";
    case PopStrategy::kLargest: return "largest";
  }
  return "fifo";
}

Partition Partition::FromLabels(std::vector<int> labels, double gamma) {
  Partition p;
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("negative community label");
    k = std::max(k, l + 1);
  }
  p.communities.assign(k, {});
  for (size_t i = 0; i < labels.size(); ++i) {
    p.communities[labels[i]].push_back(static_cast<int>(i));
  }
  for (const auto& c : p.communities) {
    if (c.empty()) throw std::invalid_argument("community labels are not contiguous");
  }
  p.labels = std::move(labels);
  p.gamma = gamma;
  return p;
}

int Partition::LargestSize() const {
  int largest = 0;
  for (const auto& c : communities) largest = std::max(largest, static_cast<int>(c.size()));
  return largest;
}

std::vector<int> Partition::Sizes() const {
  std::vector<int> sizes;
  for (const auto& c : communities) sizes.push_back(static_cast<int>(c.size()));
  return sizes;
}

double ModularityNormalizer(const Eigen::MatrixXd& c_star) {
  return c_star.cwiseAbs().sum();
}

double Modularity(const Eigen::MatrixXd& c_star, const std::vector<int>& labels,
                  double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("modularity needs gamma > 0");
  const Eigen::Index n = c_star.rows();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (labels[i] == labels[j]) sum += c_star(i, j);
    }
  }
  return sum / gamma;
}

std::vector<int> Bisect(const Eigen::MatrixXd& c_star_sub) {
  const Eigen::Index n = c_star_sub.rows();
  if (n == 0) return {};
  const Eigen::VectorXd v = LeadingVector(c_star_sub);
  std::vector<int> z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = v(i) >= 0 ? 1 : -1;
  return z;
}

double ModularityGain(const Eigen::MatrixXd& c_star_sub,
                      const std::vector<int>& z, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("modularity gain needs gamma > 0");
  Eigen::VectorXd zv(z.size());
  for (size_t i = 0; i < z.size(); ++i) zv(i) = z[i];
  return (zv.dot(c_star_sub * zv) - c_star_sub.sum()) / (2.0 * gamma);
}

SplitDecision ValidSplit(const Eigen::MatrixXd& c_star_sub, double gamma,
                         double gain_tolerance) {
  SplitDecision d;
  if (c_star_sub.rows() < 2 || !(gamma > 0)) return d;
  const std::vector<int> z = Bisect(c_star_sub);
  for (size_t i = 0; i < z.size(); ++i) {
    (z[i] > 0 ? d.positive : d.negative).push_back(static_cast<int>(i));
  }
  d.gain = ModularityGain(c_star_sub, z, gamma);
  d.valid = !d.positive.empty() && !d.negative.empty() && d.gain > gain_tolerance;
  return d;
}

ClusterResult DetectCommunities(const Eigen::MatrixXd& c_star,
                                const ClusterConfig& config) {
  const int n = static_cast<int>(c_star.rows());
  if (c_star.cols() != n) throw std::invalid_argument("C* is not square");
  ClusterResult result;
  const double gamma = ModularityNormalizer(c_star);
  Group all(n);
  std::iota(all.begin(), all.end(), 0);
  if (n == 0) return result;
  if (!(gamma > 0)) {
    result.partition = Partition::FromLabels(std::vector<int>(n, 0), 1.0);
    result.trace.push_back({n, 0.0, false, false, 0.0});
    return result;
  }

  WorkList undecided(config.pop_strategy, config.seed);
  undecided.Push(all);
  std::vector<Group> decided;
  std::vector<int> current(n, 0);
  int next_id = 1;
  double q = Modularity(c_star, current, gamma);
  while (!undecided.empty()) {
    Group g = undecided.Pop();
    const SplitDecision d =
        ValidSplit(PrincipalSubmatrix(c_star, g), gamma, config.gain_tolerance);
    if (!d.valid) {
      result.trace.push_back({static_cast<int>(g.size()), d.gain, false, false, q});
      decided.push_back(std::move(g));
      continue;
    }
    Group neg = Select(g, d.negative);
    for (int i : neg) current[i] = next_id;
    ++next_id;
    q = Modularity(c_star, current, gamma);
    result.trace.push_back({static_cast<int>(g.size()), d.gain, true, false, q});
    undecided.Push(Select(g, d.positive));
    undecided.Push(std::move(neg));
  }
  result.partition = Partition::FromLabels(LabelsFromGroups(decided, n), gamma);
  return result;
}

Eigen::MatrixXd NormalizedModularityMatrix(const Eigen::MatrixXd& c_star) {
  const Eigen::VectorXd k = c_star.rowwise().sum();
  const double gamma_prime = k.sum();
  if (std::abs(gamma_prime) <= 1e-12 * std::max(c_star.cwiseAbs().sum(), 1e-300)) {
    throw std::invalid_argument("degenerate null model");
  }
  Eigen::MatrixXd b = c_star - k * k.transpose() / gamma_prime;
  // A block that is exactly its own null model (e.g. rank one) leaves only
  // round-off, whose eigenvectors carry no structure.
  if (b.norm() <= 1e-10 * c_star.norm()) {
    throw std::invalid_argument("degenerate null model");
  }
  return b;
}

ClusterResult DetectCommunitiesThreshold(const Eigen::MatrixXd& c_star,
                                         const ClusterConfig& config) {
  if (!config.threshold_phi) return DetectCommunities(c_star, config);
  const int phi = *config.threshold_phi;
  if (phi < 2) throw std::invalid_argument("threshold phi must be at least 2");
  ClusterResult result = DetectCommunities(c_star, config);
  const double gamma = result.partition.gamma;

  std::deque<Group> oversize;
  for (const auto& c : result.partition.communities) {
    if (static_cast<int>(c.size()) > phi) oversize.push_back(c);
  }
  if (oversize.empty()) return result;

  std::vector<int> current = result.partition.labels;
  int next_id = result.partition.num_communities();
  while (!oversize.empty()) {
    Group g = std::move(oversize.front());
    oversize.pop_front();
    if (static_cast<int>(g.size()) <= phi) continue;
    const Eigen::MatrixXd sub = PrincipalSubmatrix(c_star, g);
    Eigen::VectorXd v;
    bool degenerate = false;
    try {
      v = LeadingVector(NormalizedModularityMatrix(sub));
    } catch (const std::invalid_argument&) {
      v = LeadingVector(sub);
      degenerate = true;
    }
    std::vector<int> pos;
    std::vector<int> neg;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      (v(i) >= 0 ? pos : neg).push_back(static_cast<int>(i));
    }
    if (degenerate || pos.empty() || neg.empty()) {
      std::vector<int> order(g.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return v(a) > v(b); });
      const size_t half = g.size() / 2;
      pos.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
      neg.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
      std::sort(pos.begin(), pos.end());
      std::sort(neg.begin(), neg.end());
      ++result.forced_splits;
      LogWarn("oversize community of " + std::to_string(g.size()) +
              " has no sign split; splitting at the median");
    }
    std::vector<int> z(g.size(), 1);
    for (int i : neg) z[i] = -1;
    const double gain = gamma > 0 ? ModularityGain(sub, z, gamma) : 0.0;
    Group neg_group = Select(g, neg);
    for (int i : neg_group) current[i] = next_id;
    ++next_id;
    const double q = gamma > 0 ? Modularity(c_star, current, gamma) : 0.0;
    result.trace.push_back({static_cast<int>(g.size()), gain, true, true, q});
    oversize.push_back(Select(g, pos));
    oversize.push_back(std::move(neg_group));
  }
  // Keep communities in first-touch order over the nodes.
  result.partition =
      Partition::FromLabels(CompactLabels(current), result.partition.gamma);
  return result;
}

ClusterResult Cluster(const Eigen::MatrixXd& c_star, const ClusterConfig& config) {
  return config.threshold_phi ? DetectCommunitiesThreshold(c_star, config)
                              : DetectCommunities(c_star, config);
}

double AdjustedRandIndex(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto pairs = [](double c) { return c * (c - 1) / 2; };
  double index = 0;
  for (const auto& [key, c] : joint) index += pairs(c);
  double sum_a = 0;
  for (const auto& [key, c] : rows) sum_a += pairs(c);
  double sum_b = 0;
  for (const auto& [key, c] : cols) sum_b += pairs(c);
  const double expected = sum_a * sum_b / pairs(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace portdecomp
