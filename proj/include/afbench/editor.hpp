#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "afbench/annotation.hpp"
#include "afbench/cst.hpp"
#include "afbench/geometry.hpp"

namespace afbench {

struct EditWeights {
  double keypoint = 1.0;
  double param = 0.01;
  double reg = 1e-4;
};

struct EditLimits {
  int max_iter = 100;
  double tol = 1e-9;
};

struct EditRequest {
  Airfoil source;
  std::optional<std::vector<Point2>> target_keypoints;
  std::optional<ParsecTargets> target_parsec;
  EditWeights weights;
  EditLimits limits;
};

enum class EditStatus { converged, iteration_limit, infeasible };
std::string_view to_string(EditStatus s);

struct EditResult {
  Airfoil airfoil;
  ParsecParams achieved;
  SigmaReport sigma;  // over the requested PARSEC targets only
  std::vector<double> trace;
  EditStatus status = EditStatus::converged;
  CstParams params;  // source fit plus the applied coefficient change
  int iterations = 0;
};

struct EditProgress {
  int iteration;
  double objective;
  const Airfoil& current;
};
using EditCallback = std::function<void(const EditProgress&)>;

/// Typical magnitude of each PARSEC value; the objective weights them by 1/scale.
const std::array<double, kParsecCount>& parsec_scales();

/// The least-squares problem behind edit(). Variables are changes to the
/// upper and lower CST coefficients and both trailing-edge offsets; the shape
/// is the source contour displaced vertically by the corresponding CST
/// difference, so a zero change reproduces the source exactly.
class EditProblem {
 public:
  explicit EditProblem(const EditRequest& request);

  Eigen::Index dim() const { return dim_; }
  const CstParams& source_params() const { return fit_; }

  Airfoil shape(const Eigen::VectorXd& delta) const;
  /// Residual vector whose squared norm is the objective. Throws Error when
  /// the shape cannot be annotated.
  Eigen::VectorXd residuals(const Eigen::VectorXd& delta) const;
  double objective(const Eigen::VectorXd& delta) const;
  /// Central differences, step 1e-6.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& delta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& delta) const;
  CstParams params(const Eigen::VectorXd& delta) const;

  /// True when the shape is canonical with the upper surface above the lower.
  bool admissible(const Airfoil& shape) const;
  /// Targets that no airfoil can satisfy.
  bool targets_inconsistent() const;

 private:
  Eigen::VectorXd residuals_of(const Airfoil& shape) const;

  EditRequest request_;
  CstParams fit_;
  std::size_t le_ = 0;
  Eigen::Index dim_ = 0;
  std::vector<std::size_t> kp_index_;
  Eigen::MatrixXd basis_;  // displacement of each point's y per unit variable
};

/// Damped Gauss-Newton over the CST change, accepting only decreasing steps.
EditResult edit(const EditRequest& request, const EditCallback& progress = {});

/// Requests with the keypoint-editing and parameter-editing default weights.
EditRequest make_ek_request(const Airfoil& source, const std::vector<Point2>& target_keypoints);
EditRequest make_ep_request(const Airfoil& source, const ParsecTargets& target_parsec);

/// Keypoints drive the edit; the source's PARSEC values are held softly.
EditResult edit_ek(const Airfoil& source, const std::vector<Point2>& target_keypoints,
                   const EditCallback& progress = {});

/// Requested PARSEC values drive the edit; source keypoints are held softly.
EditResult edit_ep(const Airfoil& source, const ParsecTargets& target_parsec, const EditCallback& progress = {});

}  // namespace afbench
