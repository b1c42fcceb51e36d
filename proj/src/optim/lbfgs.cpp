#include "lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace specbound::optim {

namespace {

struct Point {
  double a = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along the search direction
  Eigen::VectorXd x;
  Eigen::VectorXd g;
};

class LineSearch {
 public:
  LineSearch(const Objective& fn, const LbfgsOptions& opts, const Point& origin, const Eigen::VectorXd& dir)
      : fn_(fn), opts_(opts), origin_(origin), dir_(dir),
        // below this the energy differences are rounding noise
        noise_(1e-13 * (1.0 + std::abs(origin.f))) {}

  int evaluations() const { return evals_; }

  bool run(double a_init, Point& out) {
    Point prev = origin_;
    double a = a_init;
    for (int i = 0; i < opts_.max_line_search; ++i) {
      Point cur = eval(a);
      if (!std::isfinite(cur.f)) {
        a = 0.5 * (prev.a + a);
        continue;
      }
      if (!sufficient_decrease(cur) || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur, out);
      if (std::abs(cur.slope) <= -opts_.c2 * origin_.slope) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      prev = std::move(cur);
      a *= 2.0;
    }
    return false;
  }

 private:
  Point eval(double a) {
    ++evals_;
    Point p;
    p.a = a;
    p.x = origin_.x + a * dir_;
    p.g.resize(p.x.size());
    p.f = fn_(p.x, p.g);
    p.slope = p.g.dot(dir_);
    return p;
  }

  bool sufficient_decrease(const Point& p) const {
    if (p.f <= origin_.f + opts_.c1 * p.a * origin_.slope) return true;
    // approximate Wolfe: accept on slope alone once f differences are rounding noise
    return p.f <= origin_.f + noise_ && p.slope <= (2.0 * opts_.c1 - 1.0) * origin_.slope;
  }

  bool zoom(Point lo, Point hi, Point& out) {
    for (int i = 0; i < opts_.max_line_search; ++i) {
      double a = cubic_min(lo, hi);
      const double left = std::min(lo.a, hi.a);
      const double width = std::abs(hi.a - lo.a);
      if (!std::isfinite(a) || a <= left + 0.1 * width || a >= left + 0.9 * width) a = 0.5 * (lo.a + hi.a);
      if (width < 1e-16 * std::max(1.0, std::abs(lo.a))) break;
      Point cur = eval(a);
      if (!std::isfinite(cur.f) || !sufficient_decrease(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opts_.c2 * origin_.slope) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    // Interval collapsed: keep the best point if it still lowers f.
    if (lo.a > 0.0 && lo.f < origin_.f) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  static double cubic_min(const Point& p, const Point& q) {
    const double d1 = p.slope + q.slope - 3.0 * (p.f - q.f) / (p.a - q.a);
    const double disc = d1 * d1 - p.slope * q.slope;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), q.a - p.a);
    return q.a - (q.a - p.a) * (q.slope + d2 - d1) / (q.slope - p.slope + 2.0 * d2);
  }

  const Objective& fn_;
  const LbfgsOptions& opts_;
  const Point& origin_;
  const Eigen::VectorXd& dir_;
  double noise_;
  int evals_ = 0;
};

bool backtrack(const Objective& fn, const Point& origin, const Eigen::VectorXd& dir, double a, Point& out) {
  for (int i = 0; i < 60; ++i, a *= 0.5) {
    Point p;
    p.a = a;
    p.x = origin.x + a * dir;
    p.g.resize(p.x.size());
    p.f = fn(p.x, p.g);
    p.slope = p.g.dot(dir);
    if (std::isfinite(p.f) && p.f < origin.f + 1e-4 * a * origin.slope) {
      out = std::move(p);
      return true;
    }
  }
  return false;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const LbfgsOptions& opts,
                           const std::function<void(int, double, double, double)>& trace) {
  Point cur;
  cur.x = std::move(x0);
  cur.g.resize(cur.x.size());
  cur.f = fn(cur.x, cur.g);

  LbfgsResult res;
  auto finish = [&](int iters) {
    res.x = cur.x;
    res.f = cur.f;
    res.grad_norm = cur.g.size() ? cur.g.cwiseAbs().maxCoeff() : 0.0;
    res.iterations = iters;
    res.converged = res.grad_norm <= opts.grad_tol;
    return res;
  };
  if (cur.x.size() == 0) return finish(0);

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
  if (trace) trace(0, cur.f, cur.g.cwiseAbs().maxCoeff(), 0.0);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (cur.g.cwiseAbs().maxCoeff() <= opts.grad_tol) return finish(iter);

    // two-loop recursion
    Eigen::VectorXd q = cur.g;
    std::vector<double> alphas(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& [s, y] = history[k];
      alphas[k] = s.dot(q) / y.dot(s);
      q -= alphas[k] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& [s, y] = history[k];
      const double beta = y.dot(q) / y.dot(s);
      q += (alphas[k] - beta) * s;
    }
    Eigen::VectorXd dir = -q;
    cur.slope = cur.g.dot(dir);
    if (!(cur.slope < 0.0)) {
      history.clear();
      dir = -cur.g;
      cur.slope = cur.g.dot(dir);
    }
    const double a_init = history.empty() ? std::min(1.0, 1.0 / cur.g.cwiseAbs().maxCoeff()) : 1.0;

    Point next;
    LineSearch search(fn, opts, cur, dir);
    bool ok = search.run(a_init, next);
    if (!ok) {
      history.clear();
      dir = -cur.g;
      cur.slope = cur.g.dot(dir);
      ok = backtrack(fn, cur, dir, std::min(1.0, 1.0 / cur.g.cwiseAbs().maxCoeff()), next);
      if (!ok) return finish(iter);
    }

    Eigen::VectorXd s = next.x - cur.x;
    Eigen::VectorXd y = next.g - cur.g;
    if (y.dot(s) > 1e-300) {
      history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }
    const double step = (next.x - cur.x).norm();
    cur = std::move(next);
    if (trace) trace(iter + 1, cur.f, cur.g.cwiseAbs().maxCoeff(), step);
  }
  return finish(opts.max_iter);
}

}  // namespace specbound::optim
