#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cocert/complex.hpp"
#include "cocert/exact_linalg.hpp"
#include "cocert/star_algebra.hpp"

namespace cocert {

/// A finite-dimensional orthogonal representation, given by generator images.
/// Exact mode stores rational orthogonal matrices; float mode stores real ones and is
/// only usable for exploratory estimates.
class UnitaryRep {
 public:
  enum class Mode { Exact, Float };
  enum class Provenance { Regular, Permutation, User };

  /// Validates M^T M = I exactly and every defining relation of the group.
  /// Throws InvalidRepresentation.
  static UnitaryRep exact(GroupPtr group, std::vector<QMatrix> generators, Provenance provenance);
  /// Validates orthogonality and relations within 1e-12.
  static UnitaryRep floating(GroupPtr group, std::vector<Eigen::MatrixXd> generators);

  const GroupPtr& group() const { return group_; }
  std::size_t dim() const { return dim_; }
  Mode mode() const { return mode_; }
  Provenance provenance() const { return provenance_; }
  bool is_exact() const { return mode_ == Mode::Exact; }

  const std::vector<QMatrix>& exact_generators() const { return exact_; }
  const std::vector<Eigen::MatrixXd>& float_generators() const { return float_; }

  /// rho(g) for a group element; cached per canonical form.
  const QMatrix& image(const GroupElement& g) const;
  Eigen::MatrixXd float_image(const GroupElement& g) const;

 private:
  UnitaryRep() = default;
  void require_exact() const;

  GroupPtr group_;
  std::size_t dim_ = 0;
  Mode mode_ = Mode::Exact;
  Provenance provenance_ = Provenance::User;
  std::vector<QMatrix> exact_;
  std::vector<Eigen::MatrixXd> float_;

  struct Cache {
    std::mutex mutex;
    std::map<std::vector<int>, QMatrix> images;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

std::string_view provenance_name(UnitaryRep::Provenance p);

UnitaryRep trivial_rep(const GroupPtr& group);
/// rho(g) e_h = e_{h g^-1}. Throws NotFiniteUnderCap.
UnitaryRep regular_rep(const GroupPtr& group);
/// Permutation matrices P[img[i], i] = 1 for each generator image.
UnitaryRep perm_rep(const GroupPtr& group, const std::vector<std::vector<int>>& images);
/// Permutation representation through a declared quotient homomorphism.
UnitaryRep quotient_rep(const GroupPtr& group, const std::string& hom);

/// Block (i, j) of size d x d holds rho(A[i, j]); rows are indexed by i * d + r.
QMatrix ev(const GAMatrix& a, const UnitaryRep& rho);
Eigen::MatrixXd ev_float(const GAMatrix& a, const UnitaryRep& rho);

struct CohomologyDims {
  std::size_t h = 0;          // dim H^n
  std::size_t h_reduced = 0;  // dim of the reduced group; equal to h in finite dimension
  std::size_t kernel = 0;     // dim ker d_n
  std::size_t image = 0;      // dim im d_{n-1}
};

/// Degrees past N+1 are zero spaces. Throws FloatModeUnsupported, DegreeOutOfRange for n < 0.
CohomologyDims cohomology_dims(const EquivariantComplex& c, int n, const UnitaryRep& rho);

/// [lo, hi] with lo certified and hi refuted by the bisection predicate.
struct RationalInterval {
  Rational lo;
  Rational hi;
};

/// Largest eps in [lo, hi] with predicate(eps) true, bisected `steps` times.
/// Assumes predicate(lo) holds and the predicate is monotone.
template <class Pred>
RationalInterval bisect(Rational lo, Rational hi, int steps, Pred pred) {
  for (int i = 0; i < steps; ++i) {
    Rational mid = (lo + hi) / 2;
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

/// Spectral floor interval of a symmetric matrix: psd(S - lo I) passes, psd(S - hi I)
/// fails unless hi is the initial bound trace + 1.
RationalInterval spectral_floor(const QMatrix& s, int steps = 20);
/// Same for the smallest nonzero eigenvalue, via the predicate psd(S (S - eps I)).
RationalInterval reduced_floor(const QMatrix& s, int steps = 20);
/// A positive rational below the smallest eigenvalue of a positive definite S:
/// det(S) / trace(S)^(n-1). Nullopt when S is not positive definite.
std::optional<Rational> definite_floor_bound(const QMatrix& s);

struct CriterionStatus {
  int item = 0;
  bool holds = false;
  /// The rank-based reading agrees with the PSD decision.
  bool cross_check = false;
  /// The operator is zero (top or bottom degree), so the item is vacuous.
  bool vacuous = false;
  std::string detail;
};

struct HodgeReport {
  std::size_t dim = 0;  // k_n * d
  std::vector<QVector> c_minus;
  std::vector<QVector> c_zero;
  std::vector<QVector> c_plus;
  QMatrix lap_full;
  QMatrix lap_plus;
  QMatrix lap_minus;

  std::size_t rank_prev = 0;     // rank B_- = dim im d_{n-1}
  std::size_t rank_next = 0;     // rank B_+ = dim im d_n
  std::size_t ker_d = 0;         // dim ker d_n
  std::size_t ker_partial = 0;   // dim ker of the adjoint of d_{n-1}
  std::size_t ker_laplacian = 0;
  std::size_t h = 0;             // dim ker d_n - dim im d_{n-1}

  bool orthogonal = false;
  bool dims_add_up = false;
  /// Named kernel/image identities and whether each holds exactly.
  std::vector<std::pair<std::string, bool>> identities;

  RationalInterval gap;        // spectral floor of the full Laplacian
  RationalInterval gap_plus;   // smallest nonzero eigenvalue of the plus part
  RationalInterval gap_minus;  // smallest nonzero eigenvalue of the minus part

  bool all_identities_hold() const;
};

/// Hodge decomposition of the middle space of V^a --B_-.--> V^b --B_+.--> V^c, with
/// cochains as row vectors. Requires B_- B_+ = 0; throws ChainConditionViolated.
HodgeReport hodge_chain(const QMatrix& b_minus, const QMatrix& b_plus, int gap_steps = 20);
HodgeReport hodge(const EquivariantComplex& c, int n, const UnitaryRep& rho, int gap_steps = 20);

/// Items 1..5: ker Delta matches H; positivity of D-(D- - eps), D+(D+ - eps),
/// D(D - eps) and D - eps.
std::vector<CriterionStatus> criteria_report(const HodgeReport& report, const Rational& epsilon);
std::vector<CriterionStatus> criteria_report(const EquivariantComplex& c, int n, const UnitaryRep& rho,
                                             const Rational& epsilon);

/// Reads {name: {kind: trivial|regular|permutation|matrices, ...}}.
std::map<std::string, UnitaryRep> parse_representations(const GroupPtr& group, const nlohmann::json& doc);

}  // namespace cocert
