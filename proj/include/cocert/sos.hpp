#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cocert/complex.hpp"
#include "cocert/exact_linalg.hpp"
#include "cocert/rep_lab.hpp"
#include "cocert/star_algebra.hpp"

namespace cocert {

enum class TargetKind { Gap, Reduced };
std::string_view target_kind_name(TargetKind kind);

/// Gap: lhs = base - eps I. Reduced: lhs = base^2 - eps base.
struct SosTarget {
  TargetKind kind = TargetKind::Gap;
  GAMatrix base{GroupPtr{}, 0, 0};
  Rational epsilon;
  GAMatrix lhs{GroupPtr{}, 0, 0};
  nlohmann::json provenance = nlohmann::json::object();
};

/// Requires a Hermitian base and eps > 0.
SosTarget make_gap_target(const GAMatrix& base, const Rational& epsilon,
                          nlohmann::json provenance = nlohmann::json::object());
/// Requires a Hermitian base and eps >= 0.
SosTarget make_reducedness_target(const GAMatrix& q, const Rational& epsilon,
                                  nlohmann::json provenance = nlohmann::json::object());

enum class LaplacianPart { Full, Plus, Minus };
std::string_view part_name(LaplacianPart part);

/// Delta_n - eps I for 0 <= n <= N+1.
SosTarget make_gap_target(const EquivariantComplex& c, int n, const Rational& epsilon);
/// Q^2 - eps Q with Q the selected Laplacian part, for 0 <= n <= N.
SosTarget make_reducedness_target(const EquivariantComplex& c, int n, LaplacianPart which, const Rational& epsilon);

/// The identity first, then (word length, lexicographic word) order, no duplicates.
std::vector<GroupElement> canonical_support(const Group& group, std::vector<GroupElement> elements);
bool is_canonical_support(const Group& group, const std::vector<GroupElement>& support);

/// Gram entries Q[(a,p),(b,q)] with a^-1 b = h sum to the coefficient of h in lhs[p,q].
struct ConstraintClass {
  std::size_t p = 0;
  std::size_t q = 0;
  GroupElement h;
  Rational target;
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  std::size_t mirror = 0;  // the class (q, p, h^-1)
};

struct ConstraintSystem {
  GroupPtr group;
  std::size_t k = 0;
  std::vector<GroupElement> support;
  std::vector<ConstraintClass> classes;
  std::vector<std::size_t> class_of;  // row-major over the Gram index
  /// Orthogonal basis of vectors every feasible Gram matrix must annihilate.
  std::vector<QVector> kernel;

  std::size_t size() const { return support.size() * k; }
  std::size_t index(std::size_t a, std::size_t p) const { return a * k + p; }
  /// Sum of the diagonal classes, which equals the trace of every feasible Gram matrix.
  Rational trace() const;
};

/// Gram index is support x {0..k-1}, flattened as a * k + p. Throws SupportTooSmall
/// naming an uncovered (p, q, h), InvalidSupport for non-canonical E, DimMismatch for
/// non-square lhs.
ConstraintSystem constraints(const GAMatrix& lhs, const std::vector<GroupElement>& support);

/// If lhs = sum y^* y then every y annihilates ker ev(lhs, rho); the returned vectors
/// lie in the kernel of every Gram matrix representing lhs.
std::vector<QVector> forced_kernel(const GAMatrix& lhs, const std::vector<GroupElement>& support,
                                   const UnitaryRep& rho);
/// Merges new vectors into system.kernel, keeping it an orthogonal basis.
void add_forced_kernel(ConstraintSystem& system, const std::vector<QVector>& vectors);

/// Group-algebra matrix encoded by a Gram matrix.
GAMatrix reconstruct(const ConstraintSystem& system, const QMatrix& gram);
GAMatrix reconstruct(const GroupPtr& group, const std::vector<GroupElement>& support, std::size_t k,
                     const QMatrix& gram);

/// Per-class mean shift onto the affine feasible set.
void project_affine(const ConstraintSystem& system, Eigen::MatrixXd& q);
/// Euclidean norm of the per-class residuals.
double affine_residual(const ConstraintSystem& system, const Eigen::MatrixXd& q);

struct SolveOptions {
  int max_iters = 2000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  /// Eigenvalues are clipped to at least this value on the complement of the kernel.
  double floor = 0.0;
};

struct SolveResult {
  Eigen::MatrixXd q;
  double residual = 0;
  double min_eig = 0;  // smallest eigenvalue of the last affine iterate
  int iterations = 0;
  bool converged = false;
};

/// Alternating projections between the affine set and the (floored) PSD cone restricted
/// to the complement of the forced kernel. Deterministic in the seed.
SolveResult solve_numeric(const ConstraintSystem& system, const SolveOptions& opts);

/// Rounds to denominators <= bound and corrects to exact feasibility. Without a forced
/// kernel this is one pass of per-class mean shifts; with one it is the exact minimum
/// norm correction within the kernel's complement. Nullopt when the exact system with
/// the kernel is inconsistent.
std::optional<QMatrix> round_project(const Eigen::MatrixXd& q, const ConstraintSystem& system,
                                     const Integer& denominator_bound);

/// From Q = L D L^T: y_j has entry q equal to sum_a L[(a,q), j] delta_a, weight D_j.
/// Throws NotPsd.
std::vector<WeightedTerm> gram_to_weighted_sos(const GroupPtr& group, const std::vector<GroupElement>& support,
                                               std::size_t k, const QMatrix& gram);

struct Certificate {
  SosTarget target;
  std::vector<GroupElement> support;
  std::optional<QMatrix> gram;
  std::optional<std::vector<WeightedTerm>> weighted;
  std::string lhs_hash;
};

struct VerifyResult {
  bool accept = false;
  std::string reason;
  bool residual_zero = false;
  bool hash_ok = false;
  std::size_t gram_size = 0;
  std::size_t positive_pivots = 0;
  std::size_t weighted_terms = 0;
};

/// Exact; no tolerance. Throws MalformedCert for structurally invalid certificates.
VerifyResult verify(const Certificate& cert);

/// SHA-256 over the canonical serialization of {group, kind, epsilon, lhs}.
std::string lhs_hash(const SosTarget& target);

nlohmann::json certificate_to_json(const Certificate& cert);
/// Throws MalformedCert.
Certificate certificate_from_json(const nlohmann::json& doc);

struct FindOptions {
  /// Nullopt selects AUTO: bisection over (0, upper].
  std::optional<Rational> epsilon;
  /// Explicit support; otherwise ball(radius), radius defaulting to ceil(R/2).
  std::optional<std::vector<GroupElement>> support;
  std::optional<std::size_t> radius;
  /// Extra exact representations consulted for obstructions and forced kernels.
  std::vector<const UnitaryRep*> reps;
  /// The regular representation is consulted when the group order is at most this.
  std::size_t regular_rep_limit = 64;
  int max_iters = 2000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  Integer denominator_bound = Integer(1) << 16;
  Integer max_denominator_bound = Integer(1) << 32;
  int bisection_steps = 16;
  bool weighted_evidence = true;
};

struct Attempt {
  Rational epsilon;
  std::string status;  // ACCEPT, OBSTRUCTED, NOT_PSD, INCONSISTENT, ...
  double residual = 0;
  double min_eig = 0;
  std::string detail;
};

struct FindResult {
  std::optional<Certificate> certificate;
  std::vector<Attempt> attempts;
  std::vector<GroupElement> support;
};

/// Runs solve_numeric, round_project, psd_check_exact and verify. Any returned
/// certificate passes verify; NOT_FOUND never asserts nonexistence.
FindResult find_certificate(TargetKind kind, const GAMatrix& base, const FindOptions& opts,
                            nlohmann::json provenance = nlohmann::json::object());

}  // namespace cocert
