#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dfdse/ilp_sched.hpp"

namespace dfdse {

namespace {

constexpr double kEps = 1e-9;
constexpr double kFeasTol = 1e-7;

struct LpResult {
  bool feasible = false;
  double objective = 0;
  std::vector<double> x;
};

// Dense two-phase tableau simplex on  min c.x  s.t. rows, lo <= x <= up.
class Simplex {
 public:
  Simplex(const MilpModel& m, const std::vector<double>& lo, const std::vector<double>& up) : n_(m.variables.size()) {
    struct Row {
      std::vector<double> a;
      RowSense sense;
      double b;
    };
    std::vector<Row> rows;
    for (const auto& r : m.rows) {
      Row row{std::vector<double>(n_, 0.0), r.sense, r.rhs};
      for (const auto& [v, c] : r.terms) {
        row.a[v] += c;
        row.b -= c * lo[v];
      }
      rows.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isinf(up[j])) continue;
      Row row{std::vector<double>(n_, 0.0), RowSense::LessEqual, up[j] - lo[j]};
      row.a[j] = 1;
      rows.push_back(std::move(row));
    }
    for (auto& r : rows) {
      if (r.b < 0) {
        for (auto& x : r.a) x = -x;
        r.b = -r.b;
        if (r.sense == RowSense::LessEqual)
          r.sense = RowSense::GreaterEqual;
        else if (r.sense == RowSense::GreaterEqual)
          r.sense = RowSense::LessEqual;
      }
    }
    m_ = rows.size();
    std::size_t slack = 0;
    std::size_t art = 0;
    for (const auto& r : rows) {
      if (r.sense != RowSense::Equal) ++slack;
      if (r.sense != RowSense::LessEqual) ++art;
    }
    art_begin_ = n_ + slack;
    cols_ = art_begin_ + art;
    t_.assign(m_ * (cols_ + 1), 0.0);
    basis_.assign(m_, 0);
    std::size_t s = n_;
    std::size_t a = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = rows[i].a[j];
      rhs(i) = rows[i].b;
      if (rows[i].sense == RowSense::LessEqual) {
        at(i, s) = 1;
        basis_[i] = s++;
      } else {
        if (rows[i].sense == RowSense::GreaterEqual) at(i, s++) = -1;
        at(i, a) = 1;
        basis_[i] = a++;
      }
    }
    cost_.assign(cols_, 0.0);
    for (const auto& [v, c] : m.objective) {
      cost_[v] += c;
      offset_ += c * lo[v];
    }
    lo_ = lo;
  }

  LpResult run() {
    LpResult res;
    if (art_begin_ < cols_) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = art_begin_; j < cols_; ++j) phase1[j] = 1;
      if (!optimize(phase1, cols_)) return res;
      double infeas = 0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= art_begin_) infeas += rhs(i);
      if (infeas > kFeasTol) return res;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] < art_begin_) continue;
        for (std::size_t j = 0; j < art_begin_; ++j)
          if (std::abs(at(i, j)) > kEps) {
            pivot(i, j);
            break;
          }
      }
    }
    if (!optimize(cost_, art_begin_)) return res;
    res.feasible = true;
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = rhs(i);
    res.objective = offset_;
    for (std::size_t j = 0; j < n_; ++j) {
      res.x[j] += lo_[j];
      res.objective += cost_[j] * (res.x[j] - lo_[j]);
    }
    return res;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return t_[i * (cols_ + 1) + cols_]; }

  void pivot(std::size_t r, std::size_t c) {
    const double pv = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= pv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (std::abs(f) < 1e-15) continue;
      double* ri = &t_[i * (cols_ + 1)];
      const double* rr = &t_[r * (cols_ + 1)];
      for (std::size_t j = 0; j <= cols_; ++j) ri[j] -= f * rr[j];
      at(i, c) = 0;
    }
    basis_[r] = c;
  }

  // False on unboundedness. Columns at or beyond `limit` never enter.
  bool optimize(const std::vector<double>& c, std::size_t limit) {
    std::vector<double> red(cols_);
    const std::size_t bland_after = 50 * (m_ + cols_);
    for (std::size_t iter = 0;; ++iter) {
      for (std::size_t j = 0; j < cols_; ++j) red[j] = c[j];
      for (std::size_t i = 0; i < m_; ++i) {
        const double cb = c[basis_[i]];
        if (cb == 0) continue;
        for (std::size_t j = 0; j < cols_; ++j) red[j] -= cb * at(i, j);
      }
      std::size_t enter = cols_;
      double best = -kEps;
      for (std::size_t j = 0; j < limit; ++j) {
        if (red[j] < best) {
          enter = j;
          if (iter >= bland_after) break;
          best = red[j];
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kEps) continue;
        const double q = rhs(i) / a;
        if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  std::size_t n_;
  std::size_t m_ = 0;
  std::size_t cols_ = 0;
  std::size_t art_begin_ = 0;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  double offset_ = 0;
};

}  // namespace

SolveOutcome solve_internal(const MilpModel& model, double timeout_seconds, long node_limit) {
  if (model.variables.size() > 4000 || model.rows.size() > 20000)
    throw SolverError("model too large for the built-in solver; set DFDSE_MILP_SOLVER");
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                           std::chrono::duration<double>(std::max(0.0, timeout_seconds)));
  struct Node {
    std::vector<double> lo;
    std::vector<double> up;
  };
  Node root;
  for (const auto& v : model.variables) {
    root.lo.push_back(v.lower);
    root.up.push_back(v.upper);
  }
  std::vector<Node> stack{root};
  SolveOutcome out;
  double incumbent = std::numeric_limits<double>::infinity();
  bool aborted = false;
  long nodes = 0;
  while (!stack.empty()) {
    if (++nodes > node_limit || clock::now() > deadline) {
      aborted = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    LpResult lp = Simplex(model, node.lo, node.up).run();
    if (!lp.feasible || lp.objective >= incumbent - kFeasTol) continue;
    int branch = -1;
    double frac_best = 0;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
      if (!model.variables[j].binary) continue;
      const double f = std::abs(lp.x[j] - std::round(lp.x[j]));
      if (f > 1e-6 && f > frac_best + 1e-12) {
        frac_best = f;
        branch = static_cast<int>(j);
      }
    }
    if (branch < 0) {
      incumbent = lp.objective;
      out.values = lp.x;
      for (std::size_t j = 0; j < model.variables.size(); ++j)
        if (model.variables[j].binary) out.values[j] = std::round(out.values[j]);
      out.objective = lp.objective;
      continue;
    }
    Node down = node;
    down.up[branch] = 0;
    Node upn = std::move(node);
    upn.lo[branch] = 1;
    if (lp.x[branch] >= 0.5) {
      stack.push_back(std::move(down));
      stack.push_back(std::move(upn));
    } else {
      stack.push_back(std::move(upn));
      stack.push_back(std::move(down));
    }
  }
  const bool have = std::isfinite(incumbent);
  if (aborted)
    out.status = have ? SolveStatus::FeasibleIncumbent : SolveStatus::TimeoutNoSolution;
  else
    out.status = have ? SolveStatus::Optimal : SolveStatus::Infeasible;
  if (!have) out.values.clear();
  return out;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) {
    if (ch == '\'')
      q += "'\\''";
    else
      q += ch;
  }
  return q + "'";
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

SolveOutcome solve_external(const MilpModel& model, const std::string& executable, double timeout_seconds) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const fs::path dir =
      fs::temp_directory_path() / ("dfdse-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};
  const fs::path lp = dir / "model.lp";
  const fs::path sol = dir / "model.sol";
  const fs::path log = dir / "solver.log";
  {
    std::ofstream f(lp);
    f << write_lp(model);
    if (!f) throw SolverError("cannot write " + lp.string());
  }
  std::ostringstream cmd;
  cmd << shell_quote(executable) << ' ' << shell_quote(lp.string()) << " sec " << std::max(1.0, timeout_seconds)
      << " threads 1 solve printingOptions all solu " << shell_quote(sol.string()) << " > "
      << shell_quote(log.string()) << " 2>&1";
  const int rc = std::system(cmd.str().c_str());
  std::ifstream in(sol);
  std::string status;
  if (!in || !std::getline(in, status)) {
    std::ifstream lf(log);
    std::stringstream tail;
    tail << lf.rdbuf();
    std::string t = tail.str();
    if (t.size() > 400) t = t.substr(t.size() - 400);
    throw SolverError("solver produced no solution (exit " + std::to_string(rc) + "): " + t);
  }
  SolveOutcome out;
  const std::string st = lower(status);
  if (st.find("infeasible") != std::string::npos) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  if (st.find("unbounded") != std::string::npos) throw SolverError("solver reported an unbounded model");
  const bool optimal = st.rfind("optimal", 0) == 0;
  if (!optimal && st.find("stopped") == std::string::npos) throw SolverError("unrecognised solver status: " + status);
  std::map<std::string, int> index;
  for (std::size_t j = 0; j < model.variables.size(); ++j) index[model.variables[j].name] = static_cast<int>(j);
  out.values.assign(model.variables.size(), 0.0);
  for (std::size_t j = 0; j < model.variables.size(); ++j)
    if (std::isfinite(model.variables[j].lower)) out.values[j] = model.variables[j].lower;
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok)
      if (tok != "**") toks.push_back(tok);
    if (toks.size() < 3) continue;
    auto it = index.find(toks[1]);
    if (it == index.end()) continue;
    out.values[it->second] = std::stod(toks[2]);
    any = true;
  }
  const auto pos = st.find("objective value");
  double obj = std::numeric_limits<double>::infinity();
  if (pos != std::string::npos) {
    try {
      obj = std::stod(status.substr(pos + 15));
    } catch (const std::exception&) {
    }
  }
  out.objective = obj;
  if (optimal) {
    out.status = SolveStatus::Optimal;
  } else if (any && obj < 1e40) {
    out.status = SolveStatus::FeasibleIncumbent;
  } else {
    out.status = SolveStatus::TimeoutNoSolution;
    out.values.clear();
  }
  return out;
}

}  // namespace dfdse
