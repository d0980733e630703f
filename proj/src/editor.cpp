#include "afbench/editor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "afbench/error.hpp"

namespace afbench {

namespace {

constexpr double kFdStep = 1e-6;

int count_targets(const ParsecTargets& t) {
  return static_cast<int>(std::count_if(t.begin(), t.end(), [](const auto& v) { return v.has_value(); }));
}

std::string dump(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace

std::string_view to_string(EditStatus s) {
  switch (s) {
    case EditStatus::converged: return "converged";
    case EditStatus::iteration_limit: return "iteration_limit";
    case EditStatus::infeasible: return "infeasible";
  }
  return "converged";
}

const std::array<double, kParsecCount>& parsec_scales() {
  // Lengths in chords and curvatures in 1/chord are already on the keypoint
  // scale; angles are converted from degrees to radians.
  static const double deg = 180.0 / std::numbers::pi;
  static const std::array<double, kParsecCount> s{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, deg, deg};
  return s;
}

EditProblem::EditProblem(const EditRequest& request) : request_(request) {
  const auto& w = request.weights;
  for (double v : {w.keypoint, w.param, w.reg}) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::invalid_argument, "edit: weights must be finite and >= 0");
  }
  if (request.limits.max_iter < 0 || !(request.limits.tol >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "edit: invalid limits");
  }
  const bool has_kp = request.target_keypoints.has_value() && !request.target_keypoints->empty();
  const bool has_param = request.target_parsec.has_value() && count_targets(*request.target_parsec) > 0;
  if (!has_kp && !has_param) throw Error(ErrorCode::invalid_argument, "edit: no keypoint or PARSEC targets given");
  if (request.target_parsec) {
    for (const auto& v : *request.target_parsec) {
      if (v && !std::isfinite(*v)) throw Error(ErrorCode::invalid_argument, "edit: non-finite PARSEC target");
    }
  }

  const auto& src = request.source;
  const auto issues = validate(src, src.size());
  if (!issues.empty()) throw Error(ErrorCode::invalid_argument, "edit: source is not canonical: " + issues.front());
  fit_ = cst_fit(src).params;
  le_ = leading_edge_index(src.points);

  if (has_kp) {
    const auto& kp = *request.target_keypoints;
    for (const auto& p : kp) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::invalid_argument, "edit: non-finite keypoint");
    }
    kp_index_ = keypoint_indices(src.size(), le_, kp.size());
  }

  const auto nc = static_cast<Eigen::Index>(fit_.degree() + 1);
  dim_ = 2 * nc + 2;
  const auto n = static_cast<Eigen::Index>(src.size());
  basis_ = Eigen::MatrixXd::Zero(n, dim_);
  const int d = static_cast<int>(fit_.degree());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = std::clamp(src.points[static_cast<std::size_t>(i)].x, 0.0, 1.0);
    const bool upper = static_cast<std::size_t>(i) < le_;
    const bool lower = static_cast<std::size_t>(i) > le_;
    if (!upper && !lower) continue;  // the leading edge itself never moves
    const Eigen::Index off = upper ? 0 : nc;
    const double c = cst_class(x, fit_.n1, fit_.n2);
    for (int k = 0; k <= d; ++k) basis_(i, off + k) = c * bernstein(d, k, x);
    basis_(i, 2 * nc + (upper ? 0 : 1)) = x;
  }
}

Airfoil EditProblem::shape(const Eigen::VectorXd& delta) const {
  Airfoil out = request_.source;
  const Eigen::VectorXd dy = basis_ * delta;
  for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].y += dy[static_cast<Eigen::Index>(i)];
  out.provenance = Provenance::edited;
  return out;
}

CstParams EditProblem::params(const Eigen::VectorXd& delta) const {
  CstParams p = fit_;
  const std::size_t nc = p.upper_coeffs.size();
  for (std::size_t k = 0; k < nc; ++k) {
    p.upper_coeffs[k] += delta[static_cast<Eigen::Index>(k)];
    p.lower_coeffs[k] += delta[static_cast<Eigen::Index>(nc + k)];
  }
  p.zeta_te_upper += delta[static_cast<Eigen::Index>(2 * nc)];
  p.zeta_te_lower += delta[static_cast<Eigen::Index>(2 * nc + 1)];
  return p;
}

Eigen::VectorXd EditProblem::residuals_of(const Airfoil& s) const {
  const auto& w = request_.weights;
  const std::size_t nkp = kp_index_.size();
  const int ntarget = request_.target_parsec ? count_targets(*request_.target_parsec) : 0;
  Eigen::VectorXd r(static_cast<Eigen::Index>(2 * nkp) + ntarget);
  Eigen::Index row = 0;
  const double skp = std::sqrt(w.keypoint);
  for (std::size_t j = 0; j < nkp; ++j) {
    const auto& p = s.points[kp_index_[j]];
    const auto& t = (*request_.target_keypoints)[j];
    r[row++] = skp * (p.x - t.x);
    r[row++] = skp * (p.y - t.y);
  }
  if (ntarget > 0) {
    const auto achieved = annotate_parsec(s).to_array();
    const auto& scale = parsec_scales();
    for (std::size_t i = 0; i < kParsecCount; ++i) {
      const auto& t = (*request_.target_parsec)[i];
      if (t) r[row++] = std::sqrt(w.param / scale[i]) * (achieved[i] - *t);
    }
  }
  return r;
}

Eigen::VectorXd EditProblem::residuals(const Eigen::VectorXd& delta) const {
  const Eigen::VectorXd core = residuals_of(shape(delta));
  Eigen::VectorXd r(core.size() + dim_);
  r << core, std::sqrt(request_.weights.reg) * delta;
  return r;
}

double EditProblem::objective(const Eigen::VectorXd& delta) const { return residuals(delta).squaredNorm(); }

Eigen::MatrixXd EditProblem::jacobian(const Eigen::VectorXd& delta) const {
  const Eigen::VectorXd r0 = residuals(delta);
  Eigen::MatrixXd jac(r0.size(), dim_);
  for (Eigen::Index k = 0; k < dim_; ++k) {
    Eigen::VectorXd plus = delta, minus = delta;
    plus[k] += kFdStep;
    minus[k] -= kFdStep;
    std::optional<Eigen::VectorXd> rp, rm;
    try {
      rp = residuals(plus);
    } catch (const Error&) {
    }
    try {
      rm = residuals(minus);
    } catch (const Error&) {
    }
    if (rp && rm) {
      jac.col(k) = (*rp - *rm) / (2.0 * kFdStep);
    } else if (rp) {
      jac.col(k) = (*rp - r0) / kFdStep;
    } else if (rm) {
      jac.col(k) = (r0 - *rm) / kFdStep;
    } else {
      jac.col(k).setZero();
    }
  }
  return jac;
}

Eigen::VectorXd EditProblem::gradient(const Eigen::VectorXd& delta) const {
  return 2.0 * jacobian(delta).transpose() * residuals(delta);
}

bool EditProblem::admissible(const Airfoil& s) const {
  if (!validate(s, s.size()).empty()) return false;
  // Upper surface must stay above the lower one at every interior station.
  const auto& pts = s.points;
  const double x_te = std::min(pts.front().x, pts.back().x);
  std::size_t j = le_;
  for (std::size_t i = le_; i-- > 0;) {
    const auto& u = pts[i];
    if (u.x <= 1e-9 || u.x >= x_te) continue;
    while (j + 1 < pts.size() && pts[j + 1].x < u.x) ++j;
    if (j + 1 >= pts.size()) break;
    const auto& a = pts[j];
    const auto& b = pts[j + 1];
    const double yl = b.x == a.x ? std::max(a.y, b.y) : a.y + (b.y - a.y) * (u.x - a.x) / (b.x - a.x);
    if (!(u.y > yl)) return false;
  }
  return true;
}

bool EditProblem::targets_inconsistent() const {
  if (!request_.target_parsec) return false;
  const auto& t = *request_.target_parsec;
  auto get = [&](const char* name) { return t[parsec_index(name)]; };
  const auto y_up = get("y_up"), y_lo = get("y_lo");
  if (y_up && y_lo && *y_up <= *y_lo) return true;
  for (const char* name : {"x_up", "x_lo"}) {
    const auto x = get(name);
    if (x && !(*x > 0.0 && *x < 1.0)) return true;
  }
  if (const auto r = get("r_le"); r && *r <= 0.0) return true;
  if (const auto dy = get("dy_te"); dy && *dy < 0.0) return true;
  return false;
}

EditResult edit(const EditRequest& request, const EditCallback& progress) {
  const EditProblem problem(request);
  const Eigen::Index dim = problem.dim();
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd r = problem.residuals(delta);
  double f = r.squaredNorm();
  if (!std::isfinite(f)) throw Error(ErrorCode::numerical, "edit: non-finite objective at iterate " + dump(delta));

  EditResult out;
  out.trace.push_back(f);
  if (progress) progress({0, f, problem.shape(delta)});
  out.status = EditStatus::iteration_limit;
  double mu = -1.0;
  int stall = 0;
  int it = 0;
  for (; it < request.limits.max_iter; ++it) {
    if (f <= 1e-30) {
      out.status = EditStatus::converged;
      break;
    }
    const Eigen::MatrixXd jac = problem.jacobian(delta);
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::VectorXd diag = a.diagonal().cwiseMax(1e-12 * std::max(1.0, a.diagonal().maxCoeff()));
    if (mu < 0.0) mu = 1e-3;

    bool accepted = false;
    double f_new = f;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      Eigen::MatrixXd m = a;
      m.diagonal() += mu * diag;
      const Eigen::VectorXd step = m.ldlt().solve(-g);
      const Eigen::VectorXd trial = delta + step;
      if (step.allFinite()) {
        const Airfoil s = problem.shape(trial);
        if (problem.admissible(s)) {
          try {
            const Eigen::VectorXd rt = problem.residuals(trial);
            const double ft = rt.squaredNorm();
            if (!std::isfinite(ft)) {
              throw Error(ErrorCode::numerical, "edit: non-finite objective at iterate " + dump(trial));
            }
            if (ft < f) {
              delta = trial;
              r = rt;
              f_new = ft;
              accepted = true;
            }
          } catch (const Error& e) {
            if (e.code() == ErrorCode::numerical) throw;
          }
        }
      }
      mu = accepted ? std::max(mu / 3.0, 1e-12) : mu * 4.0;
    }

    const double rel = accepted ? (f - f_new) / f : 0.0;
    f = f_new;
    out.trace.push_back(f);
    if (progress) {
      const Airfoil current = problem.shape(delta);
      progress({it + 1, f, current});
    }
    stall = rel < request.limits.tol ? stall + 1 : 0;
    if (stall >= 3) {
      out.status = EditStatus::converged;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.airfoil = problem.shape(delta);
  out.airfoil.name = request.source.name;
  out.params = problem.params(delta);
  out.achieved = annotate_parsec(out.airfoil);
  if (request.target_parsec) {
    const auto a = out.achieved.to_array();
    double sum = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < kParsecCount; ++i) {
      if (const auto& t = (*request.target_parsec)[i]) {
        out.sigma.sigma[i] = std::abs(a[i] - *t);
        sum += out.sigma.sigma[i];
        ++k;
      }
    }
    out.sigma.sigma_bar = k ? sum / k : 0.0;
  }
  if (problem.targets_inconsistent()) out.status = EditStatus::infeasible;
  return out;
}

EditRequest make_ek_request(const Airfoil& source, const std::vector<Point2>& target_keypoints) {
  EditRequest req;
  req.source = source;
  req.target_keypoints = target_keypoints;
  req.target_parsec = full_targets(annotate_parsec(source));
  req.weights = {1.0, 0.01, 1e-4};
  return req;
}

EditRequest make_ep_request(const Airfoil& source, const ParsecTargets& target_parsec) {
  if (count_targets(target_parsec) == 0) throw Error(ErrorCode::invalid_argument, "edit_ep: empty target set");
  EditRequest req;
  req.source = source;
  req.target_parsec = target_parsec;
  req.target_keypoints = extract_keypoints(source);
  req.weights = {0.01, 1.0, 1e-4};
  return req;
}

EditResult edit_ek(const Airfoil& source, const std::vector<Point2>& target_keypoints, const EditCallback& progress) {
  return edit(make_ek_request(source, target_keypoints), progress);
}

EditResult edit_ep(const Airfoil& source, const ParsecTargets& target_parsec, const EditCallback& progress) {
  return edit(make_ep_request(source, target_parsec), progress);
}

}  // namespace afbench
