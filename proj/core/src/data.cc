#include "portdecomp/data.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "portdecomp/linalg.h"
#include "portdecomp/logging.h"
#include "portdecomp/random.h"

namespace portdecomp {
namespace {

std::string Trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool IsMissing(const std::string& cell) {
  std::string lower = cell;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower.empty() || lower == "na" || lower == "nan";
}

std::string SynthesizedDate(int day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2000} / January / 1} + days{day}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

Eigen::MatrixXd StandardNormalMatrix(int rows, int cols, std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) g(i, j) = normal(rng);
  }
  return g;
}

std::string AssetName(const std::vector<std::string>& tickers, int i) {
  if (i < static_cast<int>(tickers.size())) return tickers[i];
  return "asset " + std::to_string(i);
}

}  // namespace

LoadedReturns LoadReturnsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open returns file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty returns file: " + path);
  const std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() < 2) throw std::runtime_error("returns header has no tickers");
  const size_t n = header.size() - 1;

  std::vector<std::string> dates;
  std::vector<std::vector<double>> columns(n);
  std::vector<bool> missing(n, false);
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("ragged row at line " + std::to_string(line_number));
    }
    dates.push_back(cells[0]);
    for (size_t i = 0; i < n; ++i) {
      const std::string& cell = cells[i + 1];
      if (IsMissing(cell)) {
        missing[i] = true;
        columns[i].push_back(0.0);
        continue;
      }
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || !std::isfinite(value)) {
        throw std::runtime_error("non-numeric cell '" + cell + "' at line " +
                                 std::to_string(line_number));
      }
      columns[i].push_back(value);
    }
  }
  if (dates.size() < 2) throw std::runtime_error("returns file needs at least 2 days");

  LoadedReturns out;
  std::vector<size_t> kept;
  for (size_t i = 0; i < n; ++i) {
    if (missing[i]) {
      out.dropped.push_back(header[i + 1]);
    } else {
      kept.push_back(i);
    }
  }
  if (kept.size() < 2) {
    throw std::runtime_error("fewer than 2 assets remain after dropping missing data");
  }
  ReturnsMatrix& r = out.returns;
  r.values.resize(static_cast<Eigen::Index>(kept.size()),
                  static_cast<Eigen::Index>(dates.size()));
  for (size_t a = 0; a < kept.size(); ++a) {
    r.tickers.push_back(header[kept[a] + 1]);
    for (size_t t = 0; t < dates.size(); ++t) r.values(a, t) = columns[kept[a]][t];
  }
  r.dates = std::move(dates);
  return out;
}

void WriteReturnsCsv(const std::string& path, const ReturnsMatrix& returns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write returns file: " + path);
  out << "date";
  for (int i = 0; i < returns.num_assets(); ++i) {
    out << ',';
    if (i < static_cast<int>(returns.tickers.size())) {
      out << returns.tickers[i];
    } else {
      out << 'A' << i;
    }
  }
  out << '\n';
  char buf[32];
  for (int t = 0; t < returns.num_days(); ++t) {
    out << (t < static_cast<int>(returns.dates.size()) ? returns.dates[t]
                                                       : SynthesizedDate(t));
    for (int i = 0; i < returns.num_assets(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", returns.values(i, t));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing returns file: " + path);
}

CovarianceModel CovarianceFromSigma(const Eigen::MatrixXd& sigma,
                                    int observations) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("covariance is not square");
  const Eigen::Index n = sigma.rows();
  CovarianceModel model;
  model.sigma = Symmetrize(sigma);
  model.diag = model.sigma.diagonal();
  model.observations = observations;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(model.diag(i) > 0)) {
      throw std::invalid_argument("zero variance for asset " + std::to_string(i));
    }
  }
  const Eigen::VectorXd inv_sd = model.diag.cwiseSqrt().cwiseInverse();
  model.corr = inv_sd.asDiagonal() * model.sigma * inv_sd.asDiagonal();
  model.corr = Symmetrize(model.corr);
  model.corr.diagonal().setOnes();
  return model;
}

CovarianceModel SampleCovariance(const ReturnsMatrix& returns, bool demean) {
  const int n = returns.num_assets();
  const int t = returns.num_days();
  if (t < 2) throw std::invalid_argument("sample covariance needs at least 2 days");
  Eigen::MatrixXd x = returns.values;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  if (demean) {
    mean = x.rowwise().mean();
    x.colwise() -= mean;
  }
  Eigen::MatrixXd sigma = (x * x.transpose()) / static_cast<double>(t);
  for (int i = 0; i < n; ++i) {
    const double scale = returns.values.row(i).cwiseAbs().maxCoeff();
    if (sigma(i, i) <= 1e-28 + 1e-24 * scale * scale) {
      throw std::invalid_argument("zero variance for " +
                                  AssetName(returns.tickers, i));
    }
  }
  return CovarianceFromSigma(sigma, t);
}

CovarianceModel GenerateWishart(int n, int days, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("Wishart generator needs n >= 2");
  if (days < 1) throw std::invalid_argument("Wishart generator needs T >= 1");
  if (days < n) LogWarn("Wishart sample with T < n is rank deficient");
  const Eigen::MatrixXd g = StandardNormalMatrix(n, days, seed);
  return CovarianceFromSigma(g * g.transpose() / static_cast<double>(days), days);
}

std::vector<int> BlockLabels(int n, int blocks) {
  if (blocks < 1 || blocks > n) throw std::invalid_argument("need 1 <= K <= n");
  const int size = n / blocks;
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = std::min(i / size, blocks - 1);
  return labels;
}

Eigen::MatrixXd BlockCorrelation(int n, int blocks, double rho_in,
                                 double rho_out) {
  const std::vector<int> labels = BlockLabels(n, blocks);
  Eigen::MatrixXd c(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      c(i, j) = i == j ? 1.0 : (labels[i] == labels[j] ? rho_in : rho_out);
    }
  }
  return c;
}

BlockModel GenerateBlockModel(int n, int blocks, double rho_in, double rho_out,
                              int noise_days, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("block model needs n >= 2");
  BlockModel model;
  model.population = BlockCorrelation(n, blocks, rho_in, rho_out);
  model.planted_labels = BlockLabels(n, blocks);
  if (MinEigenvalue(model.population) < -1e-10) {
    throw std::invalid_argument("block correlation is not positive semidefinite");
  }
  const ReturnsMatrix returns = GenerateReturns(model.population, noise_days, seed);
  model.covariance = SampleCovariance(returns);
  return model;
}

ReturnsMatrix GenerateReturns(const Eigen::MatrixXd& sigma, int days,
                              std::uint64_t seed) {
  if (days < 2) throw std::invalid_argument("need at least 2 days of returns");
  const int n = static_cast<int>(sigma.rows());
  const SymmetricEigen eig = SymEig(sigma);
  const double scale = std::max(1.0, std::abs(eig.values.size() ? eig.values(0) : 0.0));
  Eigen::VectorXd root(n);
  for (int i = 0; i < n; ++i) {
    if (eig.values(i) < -1e-10 * scale) {
      throw std::runtime_error("covariance factorization failed: matrix is not PSD");
    }
    root(i) = std::sqrt(std::max(eig.values(i), 0.0));
  }
  const Eigen::MatrixXd factor = eig.vectors * root.asDiagonal();
  ReturnsMatrix out;
  out.values = factor * StandardNormalMatrix(n, days, seed);
  for (int i = 0; i < n; ++i) out.tickers.push_back("A" + std::to_string(i));
  return out;
}

Eigen::VectorXd GenerateExpectedReturns(int n, std::uint64_t seed, double scale) {
  if (scale < 0) throw std::invalid_argument("expected-return scale must be >= 0");
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu(i) = scale * uniform(rng);
  return mu;
}

}  // namespace portdecomp
