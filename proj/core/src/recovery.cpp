#include "cyclosense/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cyclosense {

namespace {

constexpr double kDependencyTol = 1e-10;
constexpr double kEarlyStopTol = 1e-13;

double norm2(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  // <a, b> with conjugation on the first argument.
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

/// Solves the Hermitian system (G + delta I) z = rhs in place via Cholesky.
std::vector<cplx> solve_hermitian(std::vector<std::vector<cplx>> g,
                                  std::vector<cplx> rhs) {
  const std::size_t s = rhs.size();
  for (std::size_t k = 0; k < s; ++k) {
    double diag = g[k][k].real();
    for (std::size_t i = 0; i < k; ++i) diag -= std::norm(g[k][i]);
    if (diag <= 0.0)
      throw std::runtime_error("recovery: fallback solve not positive definite");
    const double lkk = std::sqrt(diag);
    g[k][k] = lkk;
    for (std::size_t r = k + 1; r < s; ++r) {
      cplx v = g[r][k];
      for (std::size_t i = 0; i < k; ++i) v -= g[r][i] * std::conj(g[k][i]);
      g[r][k] = v / lkk;
    }
  }
  // Forward then backward substitution: L y = rhs, L^H z = y.
  for (std::size_t i = 0; i < s; ++i) {
    cplx v = rhs[i];
    for (std::size_t k = 0; k < i; ++k) v -= g[i][k] * rhs[k];
    rhs[i] = v / g[i][i].real();
  }
  for (std::size_t ii = s; ii-- > 0;) {
    cplx v = rhs[ii];
    for (std::size_t k = ii + 1; k < s; ++k) v -= std::conj(g[k][ii]) * rhs[k];
    rhs[ii] = v / g[ii][ii].real();
  }
  return rhs;
}

/// Incremental thin QR over the shared phase-free atoms with per-delay
/// right-hand sides carried along. One factorization serves every delay
/// because the per-delay operator columns differ from the atoms only by a
/// unit-modulus scalar. On a linearly dependent atom the state is flagged
/// and the final solve falls back to lightly regularized normal equations,
/// which approach the minimum-norm solution.
class SupportSolver {
 public:
  SupportSolver(const MeasurementOperator& op,
                std::span<const cvec> rhs_columns, std::span<const int> delays)
      : op_(op), delays_(delays.begin(), delays.end()) {
    rhs_.assign(rhs_columns.begin(), rhs_columns.end());
    residuals_ = rhs_;
    proj_.resize(rhs_.size());
    initial_norms_.reserve(rhs_.size());
    for (const auto& col : rhs_) initial_norms_.push_back(norm2(col));
  }

  void add_index(int j) {
    cvec atom = op_.atom(j);
    const double atom_norm = norm2(atom);
    std::vector<cplx> r_col(q_.size() + 1, cplx{0.0, 0.0});
    // MGS with one reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < q_.size(); ++i) {
        const cplx c = dot(q_[i], atom);
        r_col[i] += c;
        for (std::size_t t = 0; t < atom.size(); ++t) atom[t] -= c * q_[i][t];
      }
    }
    const double v_norm = norm2(atom);
    indices_.push_back(j);
    raw_.push_back(op_.atom(j));
    if (v_norm <= kDependencyTol * atom_norm) {
      rank_deficient_ = true;
      return;
    }
    r_col[q_.size()] = v_norm;
    const double inv = 1.0 / v_norm;
    for (auto& t : atom) t *= inv;
    for (std::size_t l = 0; l < residuals_.size(); ++l) {
      const cplx c = dot(atom, residuals_[l]);
      proj_[l].push_back(c);
      for (std::size_t t = 0; t < atom.size(); ++t)
        residuals_[l][t] -= c * atom[t];
    }
    q_.push_back(std::move(atom));
    r_.push_back(std::move(r_col));
  }

  const std::vector<int>& indices() const { return indices_; }
  bool rank_deficient() const { return rank_deficient_; }
  double residual_norm(std::size_t l) const { return norm2(residuals_[l]); }
  const cvec& residual(std::size_t l) const { return residuals_[l]; }
  std::size_t n_rhs() const { return rhs_.size(); }

  bool exhausted() const {
    for (std::size_t l = 0; l < residuals_.size(); ++l) {
      if (residual_norm(l) > kEarlyStopTol * std::max(1.0, initial_norms_[l]))
        return false;
    }
    return true;
  }

  /// Coefficients in support order for rhs column l, with the per-delay
  /// column phase folded in.
  std::vector<cplx> solve(std::size_t l) const {
    std::vector<cplx> y;
    if (!rank_deficient_) {
      y.assign(proj_[l].begin(), proj_[l].end());
      for (std::size_t ii = y.size(); ii-- > 0;) {
        cplx v = y[ii];
        for (std::size_t c = ii + 1; c < y.size(); ++c) v -= r_[c][ii] * y[c];
        y[ii] = v / r_[ii][ii];
      }
    } else {
      const std::size_t s = raw_.size();
      std::vector<std::vector<cplx>> gram(s, std::vector<cplx>(s));
      std::vector<cplx> rhs(s);
      double trace = 0.0;
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k <= i; ++k) {
          gram[i][k] = dot(raw_[k], raw_[i]);
          gram[k][i] = std::conj(gram[i][k]);
        }
        trace += gram[i][i].real();
        rhs[i] = dot(raw_[i], rhs_[l]);
      }
      const double loading = 1e-12 * trace / static_cast<double>(s);
      for (std::size_t i = 0; i < s; ++i) gram[i][i] += loading;
      y = solve_hermitian(std::move(gram), std::move(rhs));
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] *= std::conj(op_.column_phase(indices_[i], delays_[l]));
    }
    return y;
  }

 private:
  const MeasurementOperator& op_;
  std::vector<int> delays_;
  std::vector<cvec> rhs_;
  std::vector<cvec> residuals_;
  std::vector<int> indices_;
  std::vector<cvec> raw_;
  std::vector<cvec> q_;
  std::vector<std::vector<cplx>> r_;
  std::vector<std::vector<cplx>> proj_;
  std::vector<double> initial_norms_;
  bool rank_deficient_ = false;
};

void validate_inputs(const DelayProductMatrix& pu,
                     const MeasurementOperator& op, int n_iter) {
  if (n_iter < 1)
    throw std::invalid_argument("recovery: n_iter must be at least 1");
  if (pu.delays != op.delays())
    throw std::invalid_argument("recovery: delay lists do not match");
  if (pu.rows() != op.m())
    throw std::invalid_argument(
        "recovery: undersampled rows do not match the mask");
  if (pu.full_size != op.n())
    throw std::invalid_argument("recovery: CA sizes do not match");
}

CaMatrix zero_estimate(const MeasurementOperator& op) {
  CaMatrix ca;
  ca.n = op.n();
  ca.delays = op.delays();
  ca.columns.assign(op.delays().size(),
                    cvec(static_cast<std::size_t>(op.n()), cplx{0.0, 0.0}));
  return ca;
}

void fill_estimate(CaMatrix& ca, std::size_t delay_index,
                   const std::vector<int>& support,
                   const std::vector<cplx>& coeffs) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    ca.columns[delay_index][static_cast<std::size_t>(support[i])] = coeffs[i];
  }
}

}  // namespace

RecoveryState somp_estimate(const DelayProductMatrix& undersampled,
                            const MeasurementOperator& op, int n_iter) {
  validate_inputs(undersampled, op, n_iter);
  const int n = op.n();
  const std::size_t n_delays = undersampled.columns.size();
  Dft dft(static_cast<std::size_t>(n));
  SupportSolver solver(op, undersampled.columns, undersampled.delays);

  RecoveryState state;
  state.residual_history.resize(n_delays);
  std::vector<char> selected(static_cast<std::size_t>(n), 0);
  std::vector<double> scores(static_cast<std::size_t>(n));

  for (int iter = 0; iter < n_iter; ++iter) {
    if (solver.exhausted()) break;
    std::fill(scores.begin(), scores.end(), 0.0);
    for (std::size_t l = 0; l < n_delays; ++l) {
      const cvec spectrum = op.scatter_spectrum(solver.residual(l), dft);
      for (int j = 0; j < n; ++j)
        scores[static_cast<std::size_t>(j)] +=
            std::abs(spectrum[static_cast<std::size_t>(j)]);
    }
    int best = -1;
    double best_score = -1.0;
    for (int j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      if (scores[static_cast<std::size_t>(j)] > best_score) {
        best_score = scores[static_cast<std::size_t>(j)];
        best = j;
      }
    }
    if (best < 0) break;
    selected[static_cast<std::size_t>(best)] = 1;
    state.support.push_back(best);
    solver.add_index(best);
    for (std::size_t l = 0; l < n_delays; ++l)
      state.residual_history[l].push_back(solver.residual_norm(l));
    ++state.iterations_run;
  }

  state.estimate = zero_estimate(op);
  state.residual_norms.resize(n_delays);
  for (std::size_t l = 0; l < n_delays; ++l) {
    fill_estimate(state.estimate, l, state.support, solver.solve(l));
    state.residual_norms[l] = solver.residual_norm(l);
  }
  state.column_supports.assign(n_delays, state.support);
  state.rank_deficient = solver.rank_deficient();
  return state;
}

RecoveryState omp_estimate(const DelayProductMatrix& undersampled,
                           const MeasurementOperator& op, int n_iter) {
  validate_inputs(undersampled, op, n_iter);
  const int n = op.n();
  const std::size_t n_delays = undersampled.columns.size();
  Dft dft(static_cast<std::size_t>(n));

  std::vector<SupportSolver> solvers;
  solvers.reserve(n_delays);
  for (std::size_t l = 0; l < n_delays; ++l) {
    solvers.emplace_back(op,
                         std::span<const cvec>(&undersampled.columns[l], 1),
                         std::span<const int>(&undersampled.delays[l], 1));
  }

  RecoveryState state;
  state.residual_history.resize(n_delays);
  std::vector<std::vector<char>> selected(
      n_delays, std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<char> in_union(static_cast<std::size_t>(n), 0);

  for (int iter = 0; iter < n_iter; ++iter) {
    bool all_done = true;
    for (std::size_t l = 0; l < n_delays; ++l) {
      if (!solvers[l].exhausted()) all_done = false;
    }
    if (all_done) break;
    for (std::size_t l = 0; l < n_delays; ++l) {
      if (solvers[l].exhausted()) {
        // Column already fit to numerical precision; history stays flat.
        state.residual_history[l].push_back(solvers[l].residual_norm(0));
        continue;
      }
      const cvec spectrum = op.scatter_spectrum(solvers[l].residual(0), dft);
      int best = -1;
      double best_score = -1.0;
      for (int j = 0; j < n; ++j) {
        if (selected[l][static_cast<std::size_t>(j)]) continue;
        const double score = std::abs(spectrum[static_cast<std::size_t>(j)]);
        if (score > best_score) {
          best_score = score;
          best = j;
        }
      }
      if (best < 0) continue;
      selected[l][static_cast<std::size_t>(best)] = 1;
      solvers[l].add_index(best);
      if (!in_union[static_cast<std::size_t>(best)]) {
        in_union[static_cast<std::size_t>(best)] = 1;
        state.support.push_back(best);
      }
      state.residual_history[l].push_back(solvers[l].residual_norm(0));
    }
    ++state.iterations_run;
  }

  state.estimate = zero_estimate(op);
  state.residual_norms.resize(n_delays);
  state.column_supports.resize(n_delays);
  for (std::size_t l = 0; l < n_delays; ++l) {
    state.column_supports[l] = solvers[l].indices();
    fill_estimate(state.estimate, l, solvers[l].indices(), solvers[l].solve(0));
    state.residual_norms[l] = solvers[l].residual_norm(0);
    if (solvers[l].rank_deficient()) state.rank_deficient = true;
  }
  return state;
}

RecoveryState hades_estimate(
    const DelayProductMatrix& undersampled, const MeasurementOperator& op,
    int n_iter, std::span<const StructureDictionary> dictionaries) {
  validate_inputs(undersampled, op, n_iter);
  const int n = op.n();
  const std::size_t n_delays = undersampled.columns.size();
  if (dictionaries.size() != n_delays)
    throw std::invalid_argument("hades_estimate: one dictionary per delay");
  for (std::size_t l = 0; l < n_delays; ++l) {
    if (dictionaries[l].n != n)
      throw std::invalid_argument("hades_estimate: dictionary size mismatch");
    if (dictionaries[l].kind != dictionaries[0].kind)
      throw std::invalid_argument("hades_estimate: mixed dictionary kinds");
    if (dictionaries[l].kind == DictionaryKind::kAsymptotic &&
        dictionaries[l].delay != undersampled.delays[l])
      throw std::invalid_argument(
          "hades_estimate: dictionary delay does not match column delay");
  }

  Dft dft(static_cast<std::size_t>(n));
  SupportSolver solver(op, undersampled.columns, undersampled.delays);

  RecoveryState state;
  state.residual_history.resize(n_delays);
  std::vector<char> in_support(static_cast<std::size_t>(n), 0);
  std::vector<int> pending;
  const auto flush_pending = [&]() {
    std::sort(pending.begin(), pending.end());
    for (int row : pending) {
      state.support.push_back(row);
      solver.add_index(row);
    }
    pending.clear();
  };

  // The DC row seeds the support and is fitted before the first selection;
  // otherwise the large DC component of the delay products leaks through
  // the non-orthogonal undersampled atoms and can outvote true words.
  in_support[0] = 1;
  pending.push_back(0);
  flush_pending();

  const int n_candidates = n / 2;
  for (int iter = 0; iter < n_iter; ++iter) {
    std::vector<std::vector<double>> corr(n_delays);
    for (std::size_t l = 0; l < n_delays; ++l) {
      const cvec spectrum = op.scatter_spectrum(solver.residual(l), dft);
      corr[l].resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j)
        corr[l][static_cast<std::size_t>(j)] =
            std::abs(spectrum[static_cast<std::size_t>(j)]);
    }
    int best = -1;
    double best_score = -1.0;
    for (int j = 1; j <= n_candidates; ++j) {
      double score = 0.0;
      bool adds_new = false;
      for (std::size_t l = 0; l < n_delays; ++l) {
        for (const auto& [row, weight] : dictionaries[l].column(j)) {
          score += corr[l][static_cast<std::size_t>(row)] * weight;
          if (!in_support[static_cast<std::size_t>(row)]) adds_new = true;
        }
      }
      // A word already inside the support cannot reduce the residual again.
      if (!adds_new) continue;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;
    for (std::size_t l = 0; l < n_delays; ++l) {
      for (const auto& entry : dictionaries[l].column(best)) {
        const int row = entry.first;
        if (!in_support[static_cast<std::size_t>(row)]) {
          in_support[static_cast<std::size_t>(row)] = 1;
          pending.push_back(row);
        }
      }
    }
    flush_pending();
    for (std::size_t l = 0; l < n_delays; ++l)
      state.residual_history[l].push_back(solver.residual_norm(l));
    ++state.iterations_run;
    if (solver.exhausted()) break;
  }
  // Covers an immediate break before any word was selected.
  flush_pending();

  state.estimate = zero_estimate(op);
  state.residual_norms.resize(n_delays);
  for (std::size_t l = 0; l < n_delays; ++l) {
    fill_estimate(state.estimate, l, state.support, solver.solve(l));
    state.residual_norms[l] = solver.residual_norm(l);
  }
  state.column_supports.assign(n_delays, state.support);
  state.rank_deficient = solver.rank_deficient();
  return state;
}

RecoveryState oracle_estimate(const DelayProductMatrix& undersampled,
                              const MeasurementOperator& op,
                              std::span<const int> support) {
  validate_inputs(undersampled, op, 1);
  if (support.empty())
    throw std::invalid_argument("oracle_estimate: support must not be empty");
  const int n = op.n();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int idx : support) {
    if (idx < 0 || idx >= n)
      throw std::invalid_argument("oracle_estimate: support index out of range");
    if (seen[static_cast<std::size_t>(idx)])
      throw std::invalid_argument("oracle_estimate: duplicate support index");
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  const std::size_t n_delays = undersampled.columns.size();
  SupportSolver solver(op, undersampled.columns, undersampled.delays);
  RecoveryState state;
  state.support.assign(support.begin(), support.end());
  state.residual_history.resize(n_delays);
  for (int idx : support) solver.add_index(idx);
  for (std::size_t l = 0; l < n_delays; ++l)
    state.residual_history[l].push_back(solver.residual_norm(l));
  state.iterations_run = 1;
  state.estimate = zero_estimate(op);
  state.residual_norms.resize(n_delays);
  for (std::size_t l = 0; l < n_delays; ++l) {
    fill_estimate(state.estimate, l, state.support, solver.solve(l));
    state.residual_norms[l] = solver.residual_norm(l);
  }
  state.column_supports.assign(n_delays, state.support);
  state.rank_deficient = solver.rank_deficient();
  return state;
}

std::optional<int> primary_cycle_frequency(const RecoveryState& state, int n) {
  for (int idx : state.support) {
    if (idx != 0) return std::min(idx, n - idx);
  }
  return std::nullopt;
}

}  // namespace cyclosense
